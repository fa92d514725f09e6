//! Symmetry-based error mitigation and the sampled-energy estimator it
//! plugs into.
//!
//! Three schemes operate on measurement data:
//!
//! * **Gauge post-selection** — measured data-qubit bitstrings that violate
//!   the triangle/parity conditions are discarded. It costs no extra gates;
//!   it applies to any measurement whose data qubits are read in the
//!   computational basis.
//! * **Rotation-symmetry projection** — the model is invariant under
//!   swapping two registers, so expectations are projected with
//!   P = (1 + S)/2, estimated as (⟨H⟩ + ⟨HS⟩)/(1 + ⟨S⟩). In pure-state mode
//!   the projection is exact; in sampled mode S enters through its 16-term
//!   Pauli expansion.
//! * **In-bulk verification** — a mid-circuit parity check of the
//!   half-integer flags onto a spare ancilla; shots whose check ancilla
//!   deviates from the even-parity (gauge-consistent) value are discarded.
//!
//! Energy estimates repeat over independent readout rounds (each round is
//! one noise trajectory measured with a fixed shot budget split across
//! qubit-wise-commuting Pauli groups); the summary reports the median and
//! standard deviation after median-absolute-deviation outlier clipping.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::Circuit;
use crate::encoding::{
    group_basis, group_measurements, is_physical_bitstring, pauli_decompose, PauliTerm,
    RegisterLayout, DATA_QUBITS,
};
use crate::linalg::DMat;
use crate::sim::{
    apply_basis_rotation, noisy_state, post_select_zeros, sample_state, trajectory_rng, NoiseSpec,
};
use crate::Error;

/// Which mitigation schemes are active, and the register pair the rotation
/// projector symmetrizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MitigationConfig {
    pub gauge_postselect: bool,
    pub rotation_projector: bool,
    pub inbulk_verification: bool,
    /// 1-based registers the projector swaps.
    pub projector_pair: (usize, usize),
}

impl Default for MitigationConfig {
    fn default() -> Self {
        MitigationConfig::none()
    }
}

impl MitigationConfig {
    pub fn none() -> MitigationConfig {
        MitigationConfig {
            gauge_postselect: false,
            rotation_projector: false,
            inbulk_verification: false,
            projector_pair: (1, 2),
        }
    }

    /// Gauge filter plus rotation projection, the post-processing pair.
    pub fn full() -> MitigationConfig {
        MitigationConfig {
            gauge_postselect: true,
            rotation_projector: true,
            ..MitigationConfig::none()
        }
    }
}

/// Shots kept/rejected by a filter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterStats {
    pub kept: u64,
    pub rejected: u64,
}

impl FilterStats {
    pub fn acceptance(&self) -> f64 {
        let total = self.kept + self.rejected;
        if total == 0 {
            0.0
        } else {
            self.kept as f64 / total as f64
        }
    }
}

/// Removes histogram entries whose data bitstring is gauge-violating.
/// Keys must be data-qubit bitstrings (< 64).
pub fn gauge_filter(
    counts: &BTreeMap<usize, u64>,
) -> Result<(BTreeMap<usize, u64>, FilterStats), Error> {
    let mut stats = FilterStats::default();
    let mut kept = BTreeMap::new();
    for (&bits, &n) in counts {
        if is_physical_bitstring(bits) {
            stats.kept += n;
            kept.insert(bits, n);
        } else {
            stats.rejected += n;
        }
    }
    if stats.kept == 0 {
        return Err(Error::AllShotsRejected);
    }
    Ok((kept, stats))
}

/// Zeroes gauge-violating amplitudes of a 64-dim data state and
/// renormalizes; returns the kept weight (the state-level counterpart of
/// [`gauge_filter`]).
pub fn gauge_project_state(state: &[Complex64]) -> Result<(Vec<Complex64>, f64), Error> {
    assert_eq!(state.len(), 1 << DATA_QUBITS);
    let mut out = state.to_vec();
    let mut kept = 0.0;
    for (bits, amp) in out.iter_mut().enumerate() {
        if is_physical_bitstring(bits) {
            kept += amp.norm_sqr();
        } else {
            *amp = Complex64::new(0.0, 0.0);
        }
    }
    if kept <= f64::MIN_POSITIVE {
        return Err(Error::AllShotsRejected);
    }
    let scale = kept.sqrt().recip();
    out.iter_mut().for_each(|a| *a *= scale);
    Ok((out, kept))
}

/// Data bitstring with registers `a` and `b` (1-based) exchanged.
pub fn register_swap_bits(bits: usize, a: usize, b: usize) -> usize {
    let lay = RegisterLayout::new(0);
    let (fa, ma) = (lay.flag_qubit(a), lay.msb_qubit(a));
    let (fb, mb) = (lay.flag_qubit(b), lay.msb_qubit(b));
    let get = |q: usize| (bits >> q) & 1;
    let mut out = bits & !((1 << fa) | (1 << ma) | (1 << fb) | (1 << mb));
    out |= get(fb) << fa | get(mb) << ma | get(fa) << fb | get(ma) << mb;
    out
}

/// Dense permutation matrix of the register swap on the 64-dim data space.
pub fn swap_matrix(a: usize, b: usize) -> DMat {
    let dim = 1 << DATA_QUBITS;
    let mut m = DMat::zeros(dim);
    for bits in 0..dim {
        m[(register_swap_bits(bits, a, b), bits)] = 1.0;
    }
    m
}

/// The register swap as 16 Pauli strings: S = (1/4) Σ_{P,Q} P_f Q_m P_f' Q_m'
/// over P, Q ∈ {I, X, Y, Z}, with P on the two flag qubits and Q on the two
/// most-significant-bit qubits of the swapped registers.
pub fn swap_pauli_terms(a: usize, b: usize) -> Vec<PauliTerm> {
    let lay = RegisterLayout::new(0);
    let (fa, ma) = (lay.flag_qubit(a), lay.msb_qubit(a));
    let (fb, mb) = (lay.flag_qubit(b), lay.msb_qubit(b));
    let letters = [b'I', b'X', b'Y', b'Z'];
    let mut terms = Vec::with_capacity(16);
    for &p in &letters {
        for &q in &letters {
            let mut l = [b'I'; DATA_QUBITS];
            let set = |l: &mut [u8; DATA_QUBITS], qubit: usize, byte: u8| {
                l[DATA_QUBITS - 1 - qubit] = byte;
            };
            set(&mut l, fa, p);
            set(&mut l, fb, p);
            set(&mut l, ma, q);
            set(&mut l, mb, q);
            terms.push(PauliTerm {
                coeff: 0.25,
                letters: String::from_utf8(l.to_vec()).expect("ascii"),
            });
        }
    }
    terms
}

/// ‖[S, H]‖_F ≈ 0 — precondition of the rotation projector.
pub fn commutes_with_swap(h: &DMat, pair: (usize, usize), tol: f64) -> bool {
    let s = swap_matrix(pair.0, pair.1);
    let mut comm = s.matmul(h);
    comm.add_scaled(-1.0, &h.matmul(&s));
    comm.frob_norm() <= tol
}

/// Exact rotation projection of a 64-dim data state: applies P = (1 + S)/2,
/// renormalizes, and returns the projector weight ⟨P⟩.
pub fn rotation_project_state(
    state: &[Complex64],
    pair: (usize, usize),
) -> Result<(Vec<Complex64>, f64), Error> {
    assert_eq!(state.len(), 1 << DATA_QUBITS);
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (bits, amp) in state.iter().enumerate() {
        let swapped = register_swap_bits(bits, pair.0, pair.1);
        out[bits] += 0.5 * amp;
        out[swapped] += 0.5 * amp;
    }
    let weight: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if weight <= 1e-12 {
        return Err(Error::ProjectorSupportLost { weight });
    }
    let scale = weight.sqrt().recip();
    out.iter_mut().for_each(|a| *a *= scale);
    Ok((out, weight))
}

/// Inserts a parity check of the three half-integer flags onto a fresh
/// ancilla before gate `position`; physical states leave the ancilla in
/// |0⟩ (an even number of half-integer registers), so post-selecting the
/// ancilla on |0⟩ discards gauge-violating shots.
pub fn insert_inbulk_check(c: &Circuit, position: usize) -> (Circuit, usize) {
    assert!(position <= c.len(), "insertion point beyond circuit end");
    let lay = RegisterLayout::new(0);
    let check = c.n_qubits();
    let mut out = Circuit::new(c.n_data(), c.n_ancillas() + 1);
    for _ in 0..c.n_slots() {
        out.alloc_slot();
    }
    for (i, g) in c.gates().iter().enumerate() {
        if i == position {
            for reg in 1..=3 {
                out.cnot(lay.flag_qubit(reg), check);
            }
        }
        out.push(g.kind, g.qubits.clone(), g.param);
    }
    if position == c.len() {
        for reg in 1..=3 {
            out.cnot(lay.flag_qubit(reg), check);
        }
    }
    (out, check)
}

/// The Pauli strings a sampled energy estimate measures: always the
/// Hamiltonian; with rotation projection also H·S and S so the projected
/// quotient can be formed from the same shot data.
///
/// Distinct strings are grouped qubit-wise; each group remembers summed
/// coefficient magnitudes so shot budgets can be split proportionally.
pub struct ShotEstimator {
    /// Distinct non-identity strings as (letters, [c_H, c_HS, c_S]).
    strings: Vec<(String, [f64; 3])>,
    /// Constant (identity-string) offsets of the three observables.
    identity: [f64; 3],
    /// Indices into `strings`, grouped qubit-wise commuting.
    groups: Vec<Vec<usize>>,
    /// Measurement basis per group (length 6, data qubits).
    bases: Vec<Vec<u8>>,
    /// Σ|c| per group, for the shot split.
    weight: Vec<f64>,
    rotation: bool,
}

/// One round's estimated pieces.
#[derive(Clone, Copy, Debug)]
pub struct EstimateParts {
    pub h: f64,
    pub hs: f64,
    pub s: f64,
    /// Fraction of shots surviving ancilla and gauge post-selection.
    pub acceptance: f64,
}

impl ShotEstimator {
    pub fn new(h: &DMat, cfg: &MitigationConfig) -> Result<ShotEstimator, Error> {
        assert_eq!(h.n(), 1 << DATA_QUBITS);
        let mut table: BTreeMap<String, [f64; 3]> = BTreeMap::new();
        let mut identity = [0.0; 3];
        let add = |table: &mut BTreeMap<String, [f64; 3]>,
                   identity: &mut [f64; 3],
                   terms: Vec<PauliTerm>,
                   slot: usize| {
            for t in terms {
                if t.letters.bytes().all(|b| b == b'I') {
                    identity[slot] += t.coeff;
                } else {
                    table.entry(t.letters).or_insert([0.0; 3])[slot] += t.coeff;
                }
            }
        };
        add(&mut table, &mut identity, pauli_decompose(h)?, 0);
        if cfg.rotation_projector {
            if !commutes_with_swap(h, cfg.projector_pair, 1e-9) {
                return Err(Error::NotProjectable);
            }
            let s = swap_matrix(cfg.projector_pair.0, cfg.projector_pair.1);
            add(&mut table, &mut identity, pauli_decompose(&h.matmul(&s))?, 1);
            add(&mut table, &mut identity, swap_pauli_terms(cfg.projector_pair.0, cfg.projector_pair.1), 2);
        }
        let strings: Vec<(String, [f64; 3])> = table.into_iter().collect();
        let as_terms: Vec<PauliTerm> = strings
            .iter()
            .map(|(l, c)| PauliTerm {
                coeff: c.iter().map(|x| x.abs()).sum(),
                letters: l.clone(),
            })
            .collect();
        let index: BTreeMap<&str, usize> =
            strings.iter().enumerate().map(|(i, (l, _))| (l.as_str(), i)).collect();
        let grouped = group_measurements(&as_terms);
        let mut groups = Vec::new();
        let mut bases = Vec::new();
        let mut weight = Vec::new();
        for g in &grouped {
            groups.push(g.iter().map(|t| index[t.letters.as_str()]).collect());
            bases.push(group_basis(g));
            weight.push(g.iter().map(|t| t.coeff.abs()).sum::<f64>().max(1e-12));
        }
        Ok(ShotEstimator {
            strings,
            identity,
            groups,
            bases,
            weight,
            rotation: cfg.rotation_projector,
        })
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    /// Splits `shots` across groups proportionally to coefficient weight,
    /// each group getting at least one shot.
    fn allocate(&self, shots: u64) -> Vec<u64> {
        let total: f64 = self.weight.iter().sum();
        let mut alloc: Vec<u64> = self
            .weight
            .iter()
            .map(|w| ((w / total) * shots as f64).floor() as u64)
            .collect();
        for a in alloc.iter_mut() {
            *a = (*a).max(1);
        }
        // Trim or pad to the exact budget, largest groups first; stalls out
        // when every group already sits at its one-shot floor.
        let mut order: Vec<usize> = (0..alloc.len()).collect();
        order.sort_by(|&i, &j| self.weight[j].total_cmp(&self.weight[i]));
        let mut assigned: u64 = alloc.iter().sum();
        let mut k = 0;
        let mut stalled = 0;
        while assigned != shots && stalled < order.len() {
            let i = order[k % order.len()];
            if assigned < shots {
                alloc[i] += 1;
                assigned += 1;
                stalled = 0;
            } else if alloc[i] > 1 {
                alloc[i] -= 1;
                assigned -= 1;
                stalled = 0;
            } else {
                stalled += 1;
            }
            k += 1;
        }
        alloc
    }

    /// Measures one prepared state. Wires beyond the data register are
    /// conditioned on |0⟩ up front (the state-level limit of discarding
    /// shots whose ancillas read 1); every group is then rotated into its
    /// basis, sampled from the conditional data distribution,
    /// readout-flipped, and — where the data basis is computational and the
    /// gauge filter is on — post-selected on the gauge conditions before
    /// averaging into per-string expectations.
    pub fn estimate(
        &self,
        state: &[Complex64],
        shots: u64,
        readout_error: f64,
        gauge: bool,
        rng: &mut impl Rng,
    ) -> Result<EstimateParts, Error> {
        let n_qubits = state.len().trailing_zeros() as usize;
        assert!(n_qubits >= DATA_QUBITS);
        let (data_state, anc_weight) = if n_qubits > DATA_QUBITS {
            post_select_zeros(state, DATA_QUBITS)?
        } else {
            (state.to_vec(), 1.0)
        };
        let alloc = self.allocate(shots);
        let mut means = vec![0.0f64; self.strings.len()];
        let mut accepted_total = 0u64;
        let mut shots_total = 0u64;
        for (g, indices) in self.groups.iter().enumerate() {
            let mut rotated = data_state.clone();
            apply_basis_rotation(&mut rotated, &self.bases[g]);
            let counts = sample_state(&rotated, alloc[g], rng);
            let z_basis_data =
                self.bases[g].iter().all(|&b| b != b'X' && b != b'Y');
            let mut kept: Vec<usize> = Vec::new();
            for (&bits, &n) in &counts {
                shots_total += n;
                for _ in 0..n {
                    let mut b = bits;
                    if readout_error > 0.0 {
                        for q in 0..DATA_QUBITS {
                            if rng.gen::<f64>() < readout_error {
                                b ^= 1 << q;
                            }
                        }
                    }
                    if gauge && z_basis_data && !is_physical_bitstring(b) {
                        continue;
                    }
                    kept.push(b);
                }
            }
            if kept.is_empty() {
                return Err(Error::AllShotsRejected);
            }
            accepted_total += kept.len() as u64;
            for &i in indices {
                let term = PauliTerm { coeff: 1.0, letters: self.strings[i].0.clone() };
                let (x, z) = term.masks();
                let mask = x | z; // non-identity positions, measured as Z
                let sum: i64 = kept
                    .iter()
                    .map(|&b| if (b & mask).count_ones() % 2 == 0 { 1i64 } else { -1 })
                    .sum();
                means[i] = sum as f64 / kept.len() as f64;
            }
        }
        let mut parts = self.identity;
        for (i, (_, coeffs)) in self.strings.iter().enumerate() {
            for (p, c) in parts.iter_mut().zip(coeffs) {
                *p += c * means[i];
            }
        }
        Ok(EstimateParts {
            h: parts[0],
            hs: parts[1],
            s: parts[2],
            acceptance: anc_weight * accepted_total as f64 / shots_total.max(1) as f64,
        })
    }

    /// Folds the measured pieces into the final energy.
    pub fn combine(&self, parts: EstimateParts) -> Result<f64, Error> {
        if !self.rotation {
            return Ok(parts.h);
        }
        let weight = 0.5 * (1.0 + parts.s);
        if weight <= 0.05 {
            return Err(Error::ProjectorSupportLost { weight });
        }
        Ok((parts.h + parts.hs) / (1.0 + parts.s))
    }
}

/// Median of a non-empty slice (sorted copy; even length averages the pair).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Repeated-readout schedule for [`mitigated_energy`].
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct ReadoutPlan {
    /// Independent readout rounds (one noise trajectory each).
    pub readouts: usize,
    /// Samples per round, split across measurement groups.
    pub shots: u64,
    pub seed: u64,
}

impl Default for ReadoutPlan {
    fn default() -> Self {
        ReadoutPlan { readouts: 200, shots: 1000, seed: 7 }
    }
}

/// Summary over readout rounds.
#[derive(Clone, Debug)]
pub struct MitigatedEnergy {
    pub median: f64,
    pub std_dev: f64,
    /// median − exact ground energy.
    pub delta: f64,
    /// Per-round estimates that survived clipping.
    pub estimates: Vec<f64>,
    /// Rounds lost to post-selection or projector failure.
    pub failed: usize,
    /// Rounds removed as outliers (beyond 5 MAD).
    pub clipped: usize,
    pub mean_acceptance: f64,
}

/// Runs `plan.readouts` rounds: each prepares one (possibly noisy)
/// trajectory of `c`, measures it with `plan.shots` samples, applies the
/// enabled schemes (gauge filter at the shot level, then rotation
/// projection at the estimator level), and summarizes with 5-MAD clipping.
pub fn mitigated_energy(
    c: &Circuit,
    params: &[f64],
    noise: NoiseSpec,
    h: &DMat,
    exact_e0: f64,
    cfg: &MitigationConfig,
    plan: &ReadoutPlan,
) -> Result<MitigatedEnergy, Error> {
    let estimator = ShotEstimator::new(h, cfg)?;
    let rounds = crate::exec::collect_indexed(plan.readouts, |r| {
        let mut rng = trajectory_rng(plan.seed, r as u64);
        let state = noisy_state(c, params, noise, &mut rng)?;
        let parts = estimator.estimate(
            &state,
            plan.shots,
            noise.readout_error,
            cfg.gauge_postselect,
            &mut rng,
        )?;
        estimator.combine(parts).map(|e| (e, parts.acceptance))
    });

    let mut estimates = Vec::new();
    let mut acceptances = Vec::new();
    let mut failed = 0;
    for r in rounds {
        match r {
            Ok((e, a)) => {
                estimates.push(e);
                acceptances.push(a);
            }
            Err(Error::AllShotsRejected | Error::ProjectorSupportLost { .. }) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    if estimates.is_empty() {
        return Err(Error::AllShotsRejected);
    }

    // Outlier removal: drop rounds beyond 5 median-absolute-deviations.
    let med = median(&estimates);
    let deviations: Vec<f64> = estimates.iter().map(|e| (e - med).abs()).collect();
    let mad = median(&deviations);
    let kept: Vec<f64> = if mad > 0.0 {
        estimates.iter().copied().filter(|e| (e - med).abs() <= 5.0 * mad).collect()
    } else {
        estimates.clone()
    };
    let clipped = estimates.len() - kept.len();

    let final_median = median(&kept);
    let mean = kept.iter().sum::<f64>() / kept.len() as f64;
    let std_dev = if kept.len() > 1 {
        (kept.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
            / (kept.len() as f64 - 1.0))
            .sqrt()
    } else {
        0.0
    };
    Ok(MitigatedEnergy {
        median: final_median,
        std_dev,
        delta: final_median - exact_e0,
        estimates: kept,
        failed,
        clipped,
        mean_acceptance: acceptances.iter().sum::<f64>() / acceptances.len() as f64,
    })
}
