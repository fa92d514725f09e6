//! Statevector simulation, shot sampling, ancilla post-selection, and
//! stochastic Pauli-error trajectories.
//!
//! Amplitudes are indexed with qubit 0 as the least-significant bit. Gate
//! application uses specialized bit loops; `gate_matrix` provides the same
//! unitaries as explicit matrices so tests can cross-check the two paths
//! independently.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::linalg::DMat;
use crate::encoding::PauliTerm;
use crate::Error;

/// Depolarizing trajectory-noise strengths.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseSpec {
    pub p2: f64,
    pub p1: f64,
    pub readout_error: f64,
}

impl NoiseSpec {
    /// Error probabilities as measured on the reference chip.
    pub const DEFAULT_P2: f64 = 0.005;
    pub const DEFAULT_P1: f64 = 0.0005;

    pub fn new(p2: f64, p1: f64) -> Result<NoiseSpec, Error> {
        for p in [p2, p1] {
            if !(0.0..=0.5).contains(&p) {
                return Err(Error::BadProbability { p });
            }
        }
        Ok(NoiseSpec { p2, p1, readout_error: 0.0 })
    }

    pub fn with_readout(mut self, readout_error: f64) -> Result<NoiseSpec, Error> {
        if !(0.0..=0.5).contains(&readout_error) {
            return Err(Error::BadProbability { p: readout_error });
        }
        self.readout_error = readout_error;
        Ok(self)
    }

    pub fn ideal() -> NoiseSpec {
        NoiseSpec { p2: 0.0, p1: 0.0, readout_error: 0.0 }
    }

    pub fn is_ideal(self) -> bool {
        self.p2 == 0.0 && self.p1 == 0.0 && self.readout_error == 0.0
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// |0…0⟩ on n qubits.
pub fn zero_state(n_qubits: usize) -> Vec<Complex64> {
    let mut s = vec![ZERO; 1 << n_qubits];
    s[0] = ONE;
    s
}

pub fn norm(state: &[Complex64]) -> f64 {
    state.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Applies a 2×2 matrix to qubit `q` on indices whose bits match
/// `ctrl_mask` (pass 0 for no controls).
fn apply_1q_controlled(
    state: &mut [Complex64],
    ctrl_mask: usize,
    q: usize,
    m: [Complex64; 4],
) {
    let bit = 1 << q;
    for i in 0..state.len() {
        if i & bit == 0 && i & ctrl_mask == ctrl_mask {
            let j = i | bit;
            let a = state[i];
            let b = state[j];
            state[i] = m[0] * a + m[1] * b;
            state[j] = m[2] * a + m[3] * b;
        }
    }
}

fn ry_matrix(theta: f64) -> [Complex64; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    ]
}

/// Applies one gate in place; measurements are rejected here.
pub fn apply_gate(state: &mut [Complex64], gate: &Gate, params: &[f64]) -> Result<(), Error> {
    let theta = gate.param.angle(params);
    let q = &gate.qubits;
    match gate.kind {
        GateKind::Ry => apply_1q_controlled(state, 0, q[0], ry_matrix(theta)),
        GateKind::Rz => {
            let phase = Complex64::from_polar(1.0, theta / 2.0);
            let bit = 1 << q[0];
            for (i, amp) in state.iter_mut().enumerate() {
                *amp *= if i & bit == 0 { phase.conj() } else { phase };
            }
        }
        GateKind::H => {
            let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            apply_1q_controlled(state, 0, q[0], [r, r, r, -r]);
        }
        GateKind::X => apply_1q_controlled(state, 0, q[0], [ZERO, ONE, ONE, ZERO]),
        GateKind::Cnot => {
            apply_1q_controlled(state, 1 << q[0], q[1], [ZERO, ONE, ONE, ZERO]);
        }
        GateKind::Cz => {
            let mask = 1 << q[0] | 1 << q[1];
            for (i, amp) in state.iter_mut().enumerate() {
                if i & mask == mask {
                    *amp = -*amp;
                }
            }
        }
        GateKind::Toffoli => {
            apply_1q_controlled(state, 1 << q[0] | 1 << q[1], q[2], [ZERO, ONE, ONE, ZERO]);
        }
        GateKind::PhasedToffoli => {
            apply_1q_controlled(state, 1 << q[0] | 1 << q[1], q[2], [ZERO, ONE, ONE, ZERO]);
            // Extra −1 on |c1 c2 t⟩ = |101⟩.
            let mask = 1 << q[0] | 1 << q[1] | 1 << q[2];
            let want = 1 << q[0] | 1 << q[2];
            for (i, amp) in state.iter_mut().enumerate() {
                if i & mask == want {
                    *amp = -*amp;
                }
            }
        }
        GateKind::Cswap => {
            let (c, a, b) = (1 << q[0], 1 << q[1], 1 << q[2]);
            for i in 0..state.len() {
                if i & c == c && i & a == a && i & b == 0 {
                    let j = (i & !a) | b;
                    state.swap(i, j);
                }
            }
        }
        GateKind::ControlledRy => {
            apply_1q_controlled(state, 1 << q[0], q[1], ry_matrix(theta));
        }
        GateKind::Measure => return Err(Error::MeasureInPureMode),
    }
    Ok(())
}

/// Runs the circuit on |0…0⟩ and returns the final statevector.
pub fn simulate_state(c: &Circuit, params: &[f64]) -> Result<Vec<Complex64>, Error> {
    if params.len() != c.n_slots() {
        return Err(Error::ParamCount { expected: c.n_slots(), got: params.len() });
    }
    let mut state = zero_state(c.n_qubits());
    for g in c.gates() {
        apply_gate(&mut state, g, params)?;
    }
    Ok(state)
}

/// Explicit unitary of one gate kind on its local qubits: entry (row, col)
/// at `row * 2^arity + col`, with local bit i belonging to the i-th listed
/// qubit. Independent of `apply_gate` by construction.
pub fn gate_matrix(kind: GateKind, theta: f64) -> Vec<Complex64> {
    let dim = 1 << kind.arity();
    let mut m = vec![ZERO; dim * dim];
    let mut set = |r: usize, c: usize, v: Complex64| m[r * dim + c] = v;
    let (s, co) = (theta / 2.0).sin_cos();
    match kind {
        GateKind::Ry => {
            set(0, 0, Complex64::new(co, 0.0));
            set(0, 1, Complex64::new(-s, 0.0));
            set(1, 0, Complex64::new(s, 0.0));
            set(1, 1, Complex64::new(co, 0.0));
        }
        GateKind::Rz => {
            set(0, 0, Complex64::from_polar(1.0, -theta / 2.0));
            set(1, 1, Complex64::from_polar(1.0, theta / 2.0));
        }
        GateKind::H => {
            let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            set(0, 0, r);
            set(0, 1, r);
            set(1, 0, r);
            set(1, 1, -r);
        }
        GateKind::X => {
            set(0, 1, ONE);
            set(1, 0, ONE);
        }
        GateKind::Cnot => {
            // Control is local bit 0, target local bit 1.
            for col in 0..4 {
                let row = if col & 1 == 1 { col ^ 2 } else { col };
                set(row, col, ONE);
            }
        }
        GateKind::Cz => {
            for col in 0..4 {
                set(col, col, if col == 3 { -ONE } else { ONE });
            }
        }
        GateKind::Toffoli | GateKind::PhasedToffoli => {
            for col in 0..8 {
                let row = if col & 3 == 3 { col ^ 4 } else { col };
                let v = if kind == GateKind::PhasedToffoli && col == 0b101 { -ONE } else { ONE };
                set(row, col, v);
            }
        }
        GateKind::Cswap => {
            for col in 0..8 {
                let row = if col & 1 == 1 {
                    let (a, b) = (col >> 1 & 1, col >> 2 & 1);
                    1 | a << 2 | b << 1
                } else {
                    col
                };
                set(row, col, ONE);
            }
        }
        GateKind::ControlledRy => {
            set(0, 0, ONE);
            set(2, 2, ONE);
            set(1, 1, Complex64::new(co, 0.0));
            set(1, 3, Complex64::new(-s, 0.0));
            set(3, 1, Complex64::new(s, 0.0));
            set(3, 3, Complex64::new(co, 0.0));
        }
        GateKind::Measure => panic!("measurement has no unitary"),
    }
    m
}

/// ⟨ψ|H|ψ⟩ for a real symmetric observable.
pub fn expectation_dense(state: &[Complex64], h: &DMat) -> f64 {
    assert_eq!(state.len(), h.n(), "observable dimension mismatch");
    let re: Vec<f64> = state.iter().map(|z| z.re).collect();
    let im: Vec<f64> = state.iter().map(|z| z.im).collect();
    h.quad_form(&re) + h.quad_form(&im)
}

/// ⟨ψ|P|ψ⟩ for one Pauli string on the full state.
pub fn expectation_pauli(state: &[Complex64], term: &PauliTerm) -> f64 {
    let (x, z) = term.masks();
    let n_y = term.letters.bytes().filter(|&b| b == b'Y').count();
    let i_pow = [ONE, Complex64::new(0.0, 1.0), -ONE, Complex64::new(0.0, -1.0)][n_y % 4];
    let mut acc = ZERO;
    for (col, amp) in state.iter().enumerate() {
        let sign = if (col & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += state[col ^ x].conj() * i_pow * sign * amp;
    }
    acc.re
}

/// Rotates each qubit into the measurement basis of a qubit-wise
/// commuting group (X → H, Y → HS†), so a Z-basis read-out measures it.
pub fn apply_basis_rotation(state: &mut [Complex64], basis: &[u8]) {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let h = [r, r, r, -r];
    for (q, &letter) in basis.iter().enumerate() {
        match letter {
            b'X' => apply_1q_controlled(state, 0, q, h),
            b'Y' => {
                // H·S†: maps ±i eigenstates of Y onto |0⟩/|1⟩.
                let sdg = [ONE, ZERO, ZERO, Complex64::new(0.0, -1.0)];
                apply_1q_controlled(state, 0, q, sdg);
                apply_1q_controlled(state, 0, q, h);
            }
            _ => {}
        }
    }
}

/// Projects the listed ancillas onto required bits; returns the
/// renormalized data-qubit state and the acceptance probability.
///
/// Every ancilla must appear in `conditions` exactly once so the result is
/// a pure state on the data qubits.
pub fn post_select(
    state: &[Complex64],
    n_data: usize,
    conditions: &[(usize, bool)],
) -> Result<(Vec<Complex64>, f64), Error> {
    let n_qubits = state.len().trailing_zeros() as usize;
    let mut seen = vec![false; n_qubits];
    for &(q, _) in conditions {
        if q < n_data || q >= n_qubits || seen[q] {
            return Err(Error::NonAncillaCondition { qubit: q });
        }
        seen[q] = true;
    }
    if seen[n_data..].iter().any(|s| !s) {
        return Err(Error::NonAncillaCondition { qubit: n_data });
    }
    let pattern: usize = conditions
        .iter()
        .filter(|&&(_, bit)| bit)
        .map(|&(q, _)| 1 << q)
        .sum();
    let mut data = vec![ZERO; 1 << n_data];
    let mut acceptance = 0.0;
    for (d, slot) in data.iter_mut().enumerate() {
        let amp = state[d | pattern];
        acceptance += amp.norm_sqr();
        *slot = amp;
    }
    if acceptance <= f64::MIN_POSITIVE {
        return Err(Error::AllShotsRejected);
    }
    let scale = acceptance.sqrt().recip();
    data.iter_mut().for_each(|a| *a *= scale);
    Ok((data, acceptance))
}

/// Convenience: post-selects every ancilla onto |0⟩.
pub fn post_select_zeros(
    state: &[Complex64],
    n_data: usize,
) -> Result<(Vec<Complex64>, f64), Error> {
    let n_qubits = state.len().trailing_zeros() as usize;
    let conditions: Vec<(usize, bool)> = (n_data..n_qubits).map(|q| (q, false)).collect();
    post_select(state, n_data, &conditions)
}

/// Expectation of a data-qubit observable after ancilla post-selection
/// onto |0⟩ (applied only when ancillas exist).
pub fn expectation(c: &Circuit, params: &[f64], h: &DMat) -> Result<f64, Error> {
    let state = simulate_state(c, params)?;
    if c.n_ancillas() == 0 {
        return Ok(expectation_dense(&state, h));
    }
    let (data, _) = post_select_zeros(&state, c.n_data())?;
    Ok(expectation_dense(&data, h))
}

/// Draws `shots` bitstrings from |amplitude|², deterministically per seed.
pub fn sample(
    c: &Circuit,
    params: &[f64],
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<usize, u64>, Error> {
    assert!(shots >= 1);
    if params.len() != c.n_slots() {
        return Err(Error::ParamCount { expected: c.n_slots(), got: params.len() });
    }
    let mut state = zero_state(c.n_qubits());
    for g in c.gates() {
        if g.kind != GateKind::Measure {
            apply_gate(&mut state, g, params)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_state(&state, shots, &mut rng))
}

/// Multinomial draw from an explicit state.
pub fn sample_state(
    state: &[Complex64],
    shots: u64,
    rng: &mut impl Rng,
) -> BTreeMap<usize, u64> {
    let weights: Vec<f64> = state.iter().map(Complex64::norm_sqr).collect();
    let total: f64 = weights.iter().sum();
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let mut u = rng.gen::<f64>() * total;
        let mut drawn = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                drawn = i;
                break;
            }
            u -= w;
        }
        *counts.entry(drawn).or_insert(0) += 1;
    }
    counts
}

/// Splits sampled bitstrings on ancilla conditions, keeping data bits of
/// accepted shots; reports the acceptance rate.
pub fn post_select_counts(
    counts: &BTreeMap<usize, u64>,
    n_data: usize,
    conditions: &[(usize, bool)],
) -> Result<(BTreeMap<usize, u64>, f64), Error> {
    for &(q, _) in conditions {
        if q < n_data {
            return Err(Error::NonAncillaCondition { qubit: q });
        }
    }
    let mask: usize = conditions.iter().map(|&(q, _)| 1 << q).sum();
    let pattern: usize =
        conditions.iter().filter(|&&(_, bit)| bit).map(|&(q, _)| 1 << q).sum();
    let data_mask = (1 << n_data) - 1;
    let mut kept = BTreeMap::new();
    let mut accepted = 0u64;
    let mut total = 0u64;
    for (&bits, &n) in counts {
        total += n;
        if bits & mask == pattern {
            accepted += n;
            *kept.entry(bits & data_mask).or_insert(0) += n;
        }
    }
    if accepted == 0 {
        return Err(Error::AllShotsRejected);
    }
    Ok((kept, accepted as f64 / total as f64))
}

fn apply_pauli(state: &mut [Complex64], q: usize, code: u8) {
    let bit = 1 << q;
    match code {
        1 => apply_1q_controlled(state, 0, q, [ZERO, ONE, ONE, ZERO]),
        2 => {
            let i = Complex64::new(0.0, 1.0);
            apply_1q_controlled(state, 0, q, [ZERO, -i, i, ZERO]);
        }
        3 => {
            for (idx, amp) in state.iter_mut().enumerate() {
                if idx & bit != 0 {
                    *amp = -*amp;
                }
            }
        }
        _ => {}
    }
}

/// Per-trajectory RNG stream derived from (seed, trajectory index).
pub fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

/// One noisy trajectory: after each 1- or 2-qubit gate a uniform
/// non-identity Pauli fires with probability p1 / p2.
pub fn noisy_state(
    c: &Circuit,
    params: &[f64],
    noise: NoiseSpec,
    rng: &mut impl Rng,
) -> Result<Vec<Complex64>, Error> {
    if params.len() != c.n_slots() {
        return Err(Error::ParamCount { expected: c.n_slots(), got: params.len() });
    }
    let mut state = zero_state(c.n_qubits());
    for g in c.gates() {
        if g.kind == GateKind::Measure {
            continue;
        }
        apply_gate(&mut state, g, params)?;
        match g.kind.arity() {
            1 => {
                if noise.p1 > 0.0 && rng.gen::<f64>() < noise.p1 {
                    let code = rng.gen_range(1..4u8);
                    apply_pauli(&mut state, g.qubits[0], code);
                }
            }
            2 => {
                if noise.p2 > 0.0 && rng.gen::<f64>() < noise.p2 {
                    let pair = rng.gen_range(1..16u8);
                    apply_pauli(&mut state, g.qubits[0], pair & 3);
                    apply_pauli(&mut state, g.qubits[1], pair >> 2);
                }
            }
            _ => {
                if !noise.is_ideal() {
                    return Err(Error::NotTranspiled { kind: g.kind.name() });
                }
            }
        }
    }
    Ok(state)
}

/// Trajectory-averaged expectation with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct NoisyEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trajectories: usize,
}

/// Monte-Carlo estimate of ⟨H⟩ on the full qubit space under trajectory
/// noise; trajectories are independent streams of `seed`.
pub fn simulate_noisy_expectation(
    c: &Circuit,
    params: &[f64],
    noise: NoiseSpec,
    trajectories: usize,
    seed: u64,
    h: &DMat,
) -> Result<NoisyEstimate, Error> {
    if trajectories < 1 {
        return Err(Error::NoTrajectories);
    }
    let values = crate::exec::collect_indexed(trajectories, |t| {
        let mut rng = trajectory_rng(seed, t as u64);
        noisy_state(c, params, noise, &mut rng).map(|s| expectation_dense(&s, h))
    })
    .into_iter()
    .collect::<Result<Vec<f64>, Error>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (values.len() as f64 - 1.0)
    } else {
        0.0
    };
    Ok(NoisyEstimate {
        mean,
        std_error: (var / values.len() as f64).sqrt(),
        trajectories,
    })
}
