//! Variational circuit families for the three-register spin model.
//!
//! Two families are provided:
//!
//! * **Subspace-search product** circuits (`ssp2`, `ssp3`, `ssp4`), assembled
//!   from excitation blocks that raise register pairs in lockstep. Every
//!   block maps triangle-consistent register triples to triangle-consistent
//!   triples, so after ancilla post-selection the prepared state stays inside
//!   the physical subspace for *every* parameter value.
//! * **Hardware-efficient** circuits (`hea18`, `hea24`, …): alternating RY
//!   layers and CZ chains with no symmetry protection.
//!
//! Register `k ∈ {1,2,3}` occupies qubits `(2k−2, 2k−1)` as laid out in
//! [`crate::encoding`]: the low (flag) qubit is the half-integer digit of
//! `2j` and the high qubit its most significant bit.

use std::collections::BTreeSet;

use crate::circuit::{Circuit, GateKind, Param};
use crate::encoding::{is_physical_bitstring, RegisterLayout, DATA_QUBITS};
use crate::half::Half;
use crate::Error;

/// Increments a register value `2j ∈ {0,1,2,3}` cyclically: CNOT from the
/// flag onto the high bit, then X on the flag.
pub fn raising_block(c: &mut Circuit, lay: &RegisterLayout, reg: usize) {
    let (f, m) = (lay.flag_qubit(reg), lay.msb_qubit(reg));
    c.cnot(f, m);
    c.x(f);
}

/// Inverse of [`raising_block`]: decrements the register value cyclically.
pub fn lowering_block(c: &mut Circuit, lay: &RegisterLayout, reg: usize) {
    let (f, m) = (lay.flag_qubit(reg), lay.msb_qubit(reg));
    c.x(f);
    c.cnot(f, m);
}

/// Seeds the first excitation on a register pair known to sit at `|00⟩`:
/// RY(θ) on the first flag, copied onto the second flag.
///
/// Output: `cos(θ/2)|0,0⟩ + sin(θ/2)|1/2,1/2⟩` on the pair.
pub fn initial_excitation(c: &mut Circuit, lay: &RegisterLayout, a: usize, b: usize, slot: usize) {
    let (fa, fb) = (lay.flag_qubit(a), lay.flag_qubit(b));
    c.ry(fa, Param::Slot(slot));
    c.cnot(fa, fb);
}

/// Flag-pair Givens rotation: rotates `|00⟩ ↔ |11⟩` on the two flag qubits
/// by θ and leaves mixed flag states untouched. Raising both spins by ½ is
/// always triangle-safe; the lowering branch is safe whenever no stretched
/// state (spectator spin equal to the pair sum) with both flags set is in
/// support, which the schedules below arrange by construction.
pub fn simplified_excitation(
    c: &mut Circuit,
    lay: &RegisterLayout,
    a: usize,
    b: usize,
    slot: usize,
) {
    let (fa, fb) = (lay.flag_qubit(a), lay.flag_qubit(b));
    c.cnot(fa, fb);
    c.x(fb);
    c.cry(fb, fa, Param::Slot(slot));
    c.x(fb);
    c.cnot(fa, fb);
}

/// Ancilla-conditioned raise of both registers of a pair: RY(θ) on the
/// ancilla, then a controlled cyclic increment of each register.
///
/// This is the guard-free body of [`guarded_plaquette_excitation`], valid
/// whenever schedule analysis shows neither register can already sit at its
/// top value 3/2 (the increment would otherwise wrap around to 0).
///
/// `phased` selects [`GateKind::PhasedToffoli`] for the doubly-controlled
/// steps; it compiles to fewer native gates but inserts a −1 phase on raise
/// branches leaving spin 1, which single-qubit Z rotations cannot undo.
pub fn controlled_double_raise(
    c: &mut Circuit,
    lay: &RegisterLayout,
    a: usize,
    b: usize,
    slot: usize,
    anc: usize,
    phased: bool,
) {
    c.ry(anc, Param::Slot(slot));
    for reg in [a, b] {
        let (f, m) = (lay.flag_qubit(reg), lay.msb_qubit(reg));
        if phased {
            c.phased_toffoli(anc, f, m);
        } else {
            c.toffoli(anc, f, m);
        }
        c.cnot(anc, f);
    }
}

/// RY(θ) on `target` controlled on both `c1` and `c2`, via the half-angle
/// ladder CRY(θ/2; c2) · CNOT(c1,c2) · CRY(−θ/2; c2) · CNOT(c1,c2) ·
/// CRY(θ/2; c1).
pub fn doubly_controlled_ry(c: &mut Circuit, c1: usize, c2: usize, target: usize, slot: usize) {
    c.cry(c2, target, Param::ScaledSlot(slot, 0.5));
    c.cnot(c1, c2);
    c.cry(c2, target, Param::ScaledSlot(slot, -0.5));
    c.cnot(c1, c2);
    c.cry(c1, target, Param::ScaledSlot(slot, 0.5));
}

/// Plaquette excitation with wrap-around protection. Two guard ancillas are
/// set by Toffolis exactly when a register sits at its top value 3/2; the
/// control ancilla is then rotated only if both guards are clear (negative
/// controls via X conjugation), the conditioned double raise runs, and the
/// guards are uncomputed.
///
/// Uses 3 ancillas (`guards` and `ctrl`), all expected in `|0⟩`. On inputs
/// where a register was raised from spin 1 to 3/2 the trailing uncompute
/// leaves that guard set; those branches carry a raised ancilla and are
/// removed by the final all-ancilla post-selection, costing acceptance
/// rather than physicality.
pub fn guarded_plaquette_excitation(
    c: &mut Circuit,
    lay: &RegisterLayout,
    a: usize,
    b: usize,
    slot: usize,
    guards: (usize, usize),
    ctrl: usize,
    phased: bool,
) {
    let (g1, g2) = guards;
    let regs = [a, b];
    for (g, reg) in [g1, g2].into_iter().zip(regs) {
        c.toffoli(lay.flag_qubit(reg), lay.msb_qubit(reg), g);
    }
    c.x(g1);
    c.x(g2);
    doubly_controlled_ry(c, g1, g2, ctrl, slot);
    c.x(g1);
    c.x(g2);
    for reg in regs {
        let (f, m) = (lay.flag_qubit(reg), lay.msb_qubit(reg));
        if phased {
            c.phased_toffoli(ctrl, f, m);
        } else {
            c.toffoli(ctrl, f, m);
        }
        c.cnot(ctrl, f);
    }
    for (g, reg) in [g1, g2].into_iter().zip(regs) {
        c.toffoli(lay.flag_qubit(reg), lay.msb_qubit(reg), g);
    }
}

/// Ancilla-conditioned swap of two registers: RY(θ) on the ancilla, then a
/// controlled swap of the flag pair and of the high-bit pair. Post-selecting
/// the ancilla realizes cos(θ/2)·1 + sin(θ/2)·SWAP, which at θ = π/2
/// symmetrizes the pair.
pub fn conditional_swap(
    c: &mut Circuit,
    lay: &RegisterLayout,
    a: usize,
    b: usize,
    slot: usize,
    anc: usize,
) {
    c.ry(anc, Param::Slot(slot));
    c.cswap(anc, lay.flag_qubit(a), lay.flag_qubit(b));
    c.cswap(anc, lay.msb_qubit(a), lay.msb_qubit(b));
}

/// Ancilla-conditioned phase: RY(θ) on the ancilla followed by CZ onto a
/// data qubit. Post-selecting the ancilla realizes cos(θ/2)·1 + sin(θ/2)·Z.
pub fn phase_block(c: &mut Circuit, q: usize, slot: usize, anc: usize) {
    c.ry(anc, Param::Slot(slot));
    c.cz(anc, q);
}

fn rz_layer(c: &mut Circuit, slots_share_qubits: &[&[usize]]) {
    for qubits in slots_share_qubits {
        let s = c.alloc_slot();
        for &q in *qubits {
            c.rz(q, Param::Slot(s));
        }
    }
}

/// Builds the n-excitation subspace-search circuit, n ∈ {2, 3, 4}.
///
/// Slots are allocated in program order — excitation blocks first, then
/// conditional swaps, then phase blocks, with the trailing Z-rotation layer
/// last (see [`ssp_rz_slots`]). Parameter totals are 6/10/16 with 1/1/2
/// ancillas engaged; each engaged ancilla receives a final Hadamard and is
/// post-selected onto `|0⟩` by the estimator.
///
/// The Z-rotation layer exists to absorb dephasing in noisy runs; with those
/// slots at zero the prepared amplitudes are real. Its granularity grows
/// with the budget: one shared angle per digit significance (n = 2), one per
/// register (n = 3), one per qubit (n = 4).
pub fn build_ssp(n: usize) -> Result<Circuit, Error> {
    if !(2..=4).contains(&n) {
        return Err(Error::UnknownAnsatz { id: format!("ssp{n}") });
    }
    let lay = RegisterLayout::new(if n == 4 { 2 } else { 1 });
    let mut c = Circuit::new(DATA_QUBITS, lay.n_ancillas());
    let a0 = lay.ancilla(0);
    let flags: Vec<usize> = (1..=3).map(|k| lay.flag_qubit(k)).collect();
    let msbs: Vec<usize> = (1..=3).map(|k| lay.msb_qubit(k)).collect();

    let s = c.alloc_slot();
    initial_excitation(&mut c, &lay, 1, 2, s);
    let s = c.alloc_slot();
    simplified_excitation(&mut c, &lay, 1, 3, s);
    match n {
        2 => {
            let s = c.alloc_slot();
            conditional_swap(&mut c, &lay, 1, 2, s, a0);
            let s = c.alloc_slot();
            phase_block(&mut c, flags[0], s, a0);
            rz_layer(&mut c, &[&flags, &msbs]);
        }
        3 => {
            // The phased raise is safe here: its −1 branch needs a register
            // at spin 1 before the raise, and the support so far only holds
            // spins ≤ 1/2.
            let s = c.alloc_slot();
            controlled_double_raise(&mut c, &lay, 2, 3, s, a0, true);
            for pair in [(1, 2), (2, 3)] {
                let s = c.alloc_slot();
                conditional_swap(&mut c, &lay, pair.0, pair.1, s, a0);
            }
            for q in [flags[0], flags[1]] {
                let s = c.alloc_slot();
                phase_block(&mut c, q, s, a0);
            }
            rz_layer(&mut c, &[&[flags[0], msbs[0]], &[flags[1], msbs[1]], &[flags[2], msbs[2]]]);
        }
        _ => {
            let a1 = lay.ancilla(1);
            // First raise sees spins ≤ 1/2 only, so the phased form is safe;
            // the second can meet a register already at spin 1, where the
            // phased branch would imprint a sign, so it stays exact.
            let s = c.alloc_slot();
            controlled_double_raise(&mut c, &lay, 2, 3, s, a0, true);
            let s = c.alloc_slot();
            controlled_double_raise(&mut c, &lay, 1, 2, s, a0, false);
            for pair in [(1, 2), (2, 3)] {
                let s = c.alloc_slot();
                conditional_swap(&mut c, &lay, pair.0, pair.1, s, a1);
            }
            for q in [flags[0], flags[1], flags[2], msbs[0]] {
                let s = c.alloc_slot();
                phase_block(&mut c, q, s, a1);
            }
            for q in 0..DATA_QUBITS {
                let s = c.alloc_slot();
                c.rz(q, Param::Slot(s));
            }
        }
    }
    for anc in c.ancilla_qubits() {
        c.h(anc);
    }
    Ok(c)
}

/// Slot range of the trailing Z-rotation layer of `sspN`.
pub fn ssp_rz_slots(n: usize) -> std::ops::Range<usize> {
    match n {
        2 => 4..6,
        3 => 7..10,
        4 => 10..16,
        _ => 0..0,
    }
}

/// Builds the hardware-efficient circuit with `m` parameters: an RY layer on
/// all six data qubits, then `m/6 − 1` repetitions of a linear CZ chain
/// followed by another RY layer. No ancillas, `5(m/6 − 1)` two-qubit gates.
pub fn build_hea(m: usize) -> Result<Circuit, Error> {
    if m % DATA_QUBITS != 0 || m < 2 * DATA_QUBITS {
        return Err(Error::UnknownAnsatz { id: format!("hea{m}") });
    }
    let mut c = Circuit::new(DATA_QUBITS, 0);
    let ry_layer = |c: &mut Circuit| {
        for q in 0..DATA_QUBITS {
            let s = c.alloc_slot();
            c.ry(q, Param::Slot(s));
        }
    };
    ry_layer(&mut c);
    for _ in 0..m / DATA_QUBITS - 1 {
        for q in 0..DATA_QUBITS - 1 {
            c.cz(q, q + 1);
        }
        ry_layer(&mut c);
    }
    Ok(c)
}

/// Circuit family of an ansatz identifier.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Ssp,
    Hea,
}

/// A parsed ansatz identifier such as `ssp3` or `hea18`, carrying the
/// register layout the built circuit will use.
#[derive(Clone, Copy, Debug)]
pub struct AnsatzSpec {
    pub family: Family,
    /// Excitation count for SSP, parameter count for HEA.
    pub size: usize,
    pub layout: RegisterLayout,
}

impl AnsatzSpec {
    /// Parses identifiers of the form `ssp<n>` or `hea<m>`.
    pub fn parse(id: &str) -> Result<AnsatzSpec, Error> {
        let unknown = || Error::UnknownAnsatz { id: id.into() };
        let lower = id.to_ascii_lowercase();
        let (family, digits) = if let Some(d) = lower.strip_prefix("ssp") {
            (Family::Ssp, d)
        } else if let Some(d) = lower.strip_prefix("hea") {
            (Family::Hea, d)
        } else {
            return Err(unknown());
        };
        let size: usize = digits.parse().map_err(|_| unknown())?;
        let spec = AnsatzSpec {
            family,
            size,
            layout: RegisterLayout::new(match family {
                Family::Ssp if size == 4 => 2,
                Family::Ssp => 1,
                Family::Hea => 0,
            }),
        };
        spec.build()?;
        Ok(spec)
    }

    pub fn id(&self) -> String {
        let prefix = match self.family {
            Family::Ssp => "ssp",
            Family::Hea => "hea",
        };
        format!("{prefix}{}", self.size)
    }

    pub fn build(&self) -> Result<Circuit, Error> {
        match self.family {
            Family::Ssp => build_ssp(self.size),
            Family::Hea => build_hea(self.size),
        }
    }

    /// Number of optimizable parameters.
    pub fn n_params(&self) -> usize {
        match (self.family, self.size) {
            (Family::Ssp, 2) => 6,
            (Family::Ssp, 3) => 10,
            (Family::Ssp, 4) => 16,
            (Family::Ssp, _) => 0,
            (Family::Hea, m) => m,
        }
    }

    /// Slot range of the trailing Z-rotation layer (empty for HEA).
    pub fn rz_slots(&self) -> std::ops::Range<usize> {
        match self.family {
            Family::Ssp => ssp_rz_slots(self.size),
            Family::Hea => 0..0,
        }
    }
}

/// Qubit requirements of the lattice model at a given cutoff, in three
/// register conventions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitScaling {
    /// Full Hilbert-space registers: `N(3d·log₂(2j+1) + 2d)` qubits.
    pub hilbert: f64,
    /// Vertex-based spin-network registers: drops `3N·log₂(2j+1) − 3`.
    pub spin_network: f64,
    /// Dressed-site fusion registers: `(4d−3)/(3d)` of the full count minus
    /// `4d − 3`.
    pub dressed_site: f64,
}

/// Register-count estimates for an `N`-site lattice in `d ∈ {2, 3}` spatial
/// dimensions truncated at `j_max`.
pub fn qubit_scaling_report(n_sites: usize, dim: usize, j_max: Half) -> QubitScaling {
    assert!(n_sites >= 1, "need at least one lattice site");
    assert!(dim == 2 || dim == 3, "spatial dimension must be 2 or 3");
    let log_d = f64::from(j_max.dim()).log2();
    let n = n_sites as f64;
    let d = dim as f64;
    let hilbert = n * (3.0 * d * log_d + 2.0 * d);
    QubitScaling {
        hilbert,
        spin_network: hilbert - 3.0 * n * log_d + 3.0,
        dressed_site: (4.0 * d - 3.0) / (3.0 * d) * hilbert - (4.0 * d - 3.0),
    }
}

/// Computational bitstrings reachable from `|0…0⟩` when every rotation angle
/// is generic, ignoring amplitude cancellation. A conservative
/// over-approximation of the true support, uniform in the parameters.
pub fn reachable_bitstrings(c: &Circuit) -> BTreeSet<usize> {
    let mut support = BTreeSet::from([0usize]);
    for g in c.gates() {
        let q = &g.qubits;
        let mut next = BTreeSet::new();
        for &b in &support {
            let bit = |i: usize| b >> q[i] & 1 == 1;
            match g.kind {
                GateKind::Ry | GateKind::H => {
                    next.insert(b);
                    next.insert(b ^ (1 << q[0]));
                }
                GateKind::Rz | GateKind::Cz | GateKind::Measure => {
                    next.insert(b);
                }
                GateKind::X => {
                    next.insert(b ^ (1 << q[0]));
                }
                GateKind::Cnot => {
                    next.insert(if bit(0) { b ^ (1 << q[1]) } else { b });
                }
                GateKind::Toffoli | GateKind::PhasedToffoli => {
                    next.insert(if bit(0) && bit(1) { b ^ (1 << q[2]) } else { b });
                }
                GateKind::Cswap => {
                    next.insert(if bit(0) && bit(1) != bit(2) {
                        b ^ (1 << q[1]) ^ (1 << q[2])
                    } else {
                        b
                    });
                }
                GateKind::ControlledRy => {
                    next.insert(b);
                    if bit(0) {
                        next.insert(b ^ (1 << q[1]));
                    }
                }
            }
        }
        support = next;
    }
    support
}

/// Data bitstrings that can survive post-selection of every ancilla onto
/// `|0⟩`, under the same over-approximation as [`reachable_bitstrings`].
pub fn post_selected_support(c: &Circuit) -> Vec<usize> {
    let anc_mask: usize = c.ancilla_qubits().map(|q| 1 << q).sum();
    let data_mask = (1 << c.n_data()) - 1;
    reachable_bitstrings(c)
        .into_iter()
        .filter(|b| b & anc_mask == 0)
        .map(|b| b & data_mask)
        .collect()
}

/// True when every post-selectable data string decodes to a physical state.
/// Because the support computation over-approximates, a `true` answer
/// guarantees gauge preservation for all parameter values.
pub fn preserves_physical_support(c: &Circuit) -> bool {
    post_selected_support(c).iter().all(|&b| is_physical_bitstring(b))
}
