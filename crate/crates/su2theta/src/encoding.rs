//! Qubit registers for the spin triples, Hamiltonian embedding with
//! penalties, and Pauli-string decomposition for sampled measurement.
//!
//! Each of the three spins j ∈ {0, 1/2, 1, 3/2} occupies two data qubits
//! holding the binary value of 2j; the least-significant qubit of each
//! register is therefore the half-integer flag. Register k (1-based) sits on
//! qubits (2k−2, 2k−1), ancillas are appended after the data qubits, and
//! qubit 0 is the least-significant bit of a basis-state index.

use serde::{Deserialize, Serialize};

use crate::half::Half;
use crate::linalg::DMat;
use crate::theta::{hamiltonian, Coupling, ThetaBasis, ThetaState};
use crate::Error;

/// Number of data qubits: three registers of two.
pub const DATA_QUBITS: usize = 6;

/// Largest spin expressible in a register.
pub const REGISTER_J_MAX: Half = Half::new(3);

/// Default energy penalty lifting gauge-violating bitstrings well above
/// the physical spectrum.
pub const DEFAULT_PENALTY: f64 = 50.0;

/// Placement of spin registers and ancillas on a qubit line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    n_ancillas: usize,
}

impl RegisterLayout {
    pub fn new(n_ancillas: usize) -> RegisterLayout {
        assert!(n_ancillas <= 2, "at most two ancillas are ever engaged");
        RegisterLayout { n_ancillas }
    }

    pub fn n_qubits(&self) -> usize {
        DATA_QUBITS + self.n_ancillas
    }

    pub fn n_ancillas(&self) -> usize {
        self.n_ancillas
    }

    /// Half-integer flag qubit of register k ∈ {1,2,3}.
    pub fn flag_qubit(&self, k: usize) -> usize {
        assert!((1..=3).contains(&k));
        2 * k - 2
    }

    /// Most-significant qubit of register k ∈ {1,2,3}.
    pub fn msb_qubit(&self, k: usize) -> usize {
        assert!((1..=3).contains(&k));
        2 * k - 1
    }

    /// i-th ancilla, appended after the data qubits.
    pub fn ancilla(&self, i: usize) -> usize {
        assert!(i < self.n_ancillas);
        DATA_QUBITS + i
    }

    pub fn data_qubits(&self) -> std::ops::Range<usize> {
        0..DATA_QUBITS
    }
}

/// Two-bit register value 2j for j ≤ 3/2.
pub fn encode(j: Half) -> usize {
    let v = j.twice();
    assert!((0..=3).contains(&v), "spin {j} does not fit a two-qubit register");
    v as usize
}

/// Inverse of `encode`.
pub fn decode(value: usize) -> Half {
    assert!(value < 4);
    Half::new(value as i32)
}

/// Bitstring index of a spin triple on the six data qubits.
pub fn state_to_bits(s: &ThetaState) -> usize {
    encode(s.j1) | encode(s.j2) << 2 | encode(s.j3) << 4
}

/// Spin triple encoded by the low six bits of an index.
pub fn bits_to_state(bits: usize) -> ThetaState {
    ThetaState::new(decode(bits & 3), decode(bits >> 2 & 3), decode(bits >> 4 & 3))
}

/// Whether the six-bit string decodes to a triangle-compatible triple.
pub fn is_physical_bitstring(bits: usize) -> bool {
    bits < 64 && bits_to_state(bits).is_physical()
}

/// Embeds H(λ) into the 64-dimensional qubit space.
///
/// Physical bitstrings carry the model Hamiltonian; unphysical ones are
/// decoupled and sit at their bare electric energy plus `penalty`.
pub fn embed_hamiltonian(basis: &ThetaBasis, c: Coupling, penalty: f64) -> Result<DMat, Error> {
    if penalty < 0.0 {
        return Err(Error::BadPenalty { penalty });
    }
    if basis.j_max() != REGISTER_J_MAX {
        return Err(Error::EncodingCutoff { j_max: basis.j_max() });
    }
    let hp = hamiltonian(basis, c);
    let dim = 1 << DATA_QUBITS;
    let mut h = DMat::zeros(dim);
    for row in 0..basis.len() {
        let bi = state_to_bits(&basis.state(row));
        for col in 0..basis.len() {
            let bj = state_to_bits(&basis.state(col));
            h[(bi, bj)] = hp[(row, col)];
        }
    }
    for bits in 0..dim {
        if !is_physical_bitstring(bits) {
            h[(bits, bits)] = bits_to_state(bits).electric_energy() + penalty;
        }
    }
    Ok(h)
}

/// Embeds any operator over the spin basis into the 64-dimensional qubit
/// space, leaving unphysical bitstrings at zero. Suitable for observables,
/// where the gauge-violating remainder must not contribute.
pub fn embed_operator(basis: &ThetaBasis, m: &DMat) -> Result<DMat, Error> {
    if basis.j_max() != REGISTER_J_MAX {
        return Err(Error::EncodingCutoff { j_max: basis.j_max() });
    }
    assert_eq!(m.n(), basis.len(), "operator dimension must match the basis");
    let mut out = DMat::zeros(1 << DATA_QUBITS);
    for row in 0..basis.len() {
        let bi = state_to_bits(&basis.state(row));
        for col in 0..basis.len() {
            out[(bi, state_to_bits(&basis.state(col)))] = m[(row, col)];
        }
    }
    Ok(out)
}

/// One Pauli string with a real weight; letters run most-significant
/// qubit first, so the last letter acts on qubit 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub letters: String,
}

impl PauliTerm {
    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    /// Letter acting on qubit q (q = 0 is the last character).
    pub fn letter(&self, q: usize) -> u8 {
        let bytes = self.letters.as_bytes();
        bytes[bytes.len() - 1 - q]
    }

    /// Bit masks of qubits hit by an X-type flip and a Z-type sign.
    /// Y contributes to both.
    pub fn masks(&self) -> (usize, usize) {
        let mut x = 0;
        let mut z = 0;
        for q in 0..self.n_qubits() {
            match self.letter(q) {
                b'X' => x |= 1 << q,
                b'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                b'Z' => z |= 1 << q,
                _ => {}
            }
        }
        (x, z)
    }

    pub fn is_diagonal(&self) -> bool {
        self.letters.bytes().all(|b| b == b'I' || b == b'Z')
    }
}

impl std::fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.coeff, self.letters)
    }
}

/// ⟨r|P|c⟩ for the one column c coupled to row r, as (target row, phase).
/// The phase is real for even Y-count strings, which is all a real
/// symmetric operator can produce.
fn pauli_action(letters: &[u8], col: usize) -> (usize, f64) {
    let n = letters.len();
    let mut row = col;
    let mut sign = 1.0;
    let mut n_y = 0usize;
    for q in 0..n {
        let bit = col >> q & 1;
        match letters[n - 1 - q] {
            b'X' => row ^= 1 << q,
            b'Y' => {
                row ^= 1 << q;
                n_y += 1;
                if bit == 1 {
                    sign = -sign;
                }
            }
            b'Z' => {
                if bit == 1 {
                    sign = -sign;
                }
            }
            _ => {}
        }
    }
    // i^n_y with even n_y: i² = −1 per pair.
    if n_y % 2 == 1 {
        return (row, 0.0);
    }
    if n_y % 4 == 2 {
        sign = -sign;
    }
    (row, sign)
}

/// Expands a real symmetric 2^n × 2^n matrix as Σ_α c_α P_α with
/// c_α = 2^{−n}·Tr(P_α H), dropping |c| < 1e−12, ordered by letters.
pub fn pauli_decompose(h: &DMat) -> Result<Vec<PauliTerm>, Error> {
    let dim = h.n();
    let n = dim.trailing_zeros() as usize;
    assert!(dim == 1 << n && n <= 8, "expected a 2^n-dimensional operator with n ≤ 8");
    if !h.is_symmetric(1e-12) {
        return Err(Error::NotSymmetric);
    }
    let mut terms = Vec::new();
    let mut letters = vec![b'I'; n];
    let alphabet = [b'I', b'X', b'Y', b'Z'];
    let n_strings = 4usize.pow(n as u32);
    for code in 0..n_strings {
        let mut c = code;
        let mut n_y = 0;
        for letter in letters.iter_mut().take(n) {
            let l = alphabet[c & 3];
            if l == b'Y' {
                n_y += 1;
            }
            *letter = l;
            c >>= 2;
        }
        if n_y % 2 == 1 {
            continue; // purely imaginary trace against a real matrix
        }
        let mut trace = 0.0;
        for col in 0..dim {
            let (row, phase) = pauli_action(&letters, col);
            if phase != 0.0 {
                trace += phase * h[(row, col)];
            }
        }
        let coeff = trace / dim as f64;
        if coeff.abs() >= 1e-12 {
            terms.push(PauliTerm {
                coeff,
                letters: String::from_utf8(letters.clone()).unwrap(),
            });
        }
    }
    terms.sort_by(|a, b| a.letters.cmp(&b.letters));
    Ok(terms)
}

/// Rebuilds the dense operator from a decomposition (test oracle for the
/// reconstruction invariant).
pub fn pauli_reconstruct(terms: &[PauliTerm], n: usize) -> DMat {
    let dim = 1 << n;
    let mut h = DMat::zeros(dim);
    for t in terms {
        let letters = t.letters.as_bytes();
        for col in 0..dim {
            let (row, phase) = pauli_action(letters, col);
            if phase != 0.0 {
                h[(row, col)] += t.coeff * phase;
            }
        }
    }
    h
}

/// ⟨ψ|P|ψ⟩ for a real state vector.
pub fn pauli_expect_real(term: &PauliTerm, psi: &[f64]) -> f64 {
    let letters = term.letters.as_bytes();
    let mut acc = 0.0;
    for col in 0..psi.len() {
        let (row, phase) = pauli_action(letters, col);
        if phase != 0.0 {
            acc += psi[row] * phase * psi[col];
        }
    }
    acc
}

/// Whether two strings can be measured in one shared basis: on every qubit
/// the letters agree or one of them is I.
pub fn qubitwise_compatible(a: &PauliTerm, b: &PauliTerm) -> bool {
    a.letters
        .bytes()
        .zip(b.letters.bytes())
        .all(|(x, y)| x == b'I' || y == b'I' || x == y)
}

/// Greedy first-fit grouping of terms into simultaneously measurable sets.
pub fn group_measurements(terms: &[PauliTerm]) -> Vec<Vec<PauliTerm>> {
    let mut groups: Vec<Vec<PauliTerm>> = Vec::new();
    'next: for t in terms {
        for g in groups.iter_mut() {
            if g.iter().all(|m| qubitwise_compatible(m, t)) {
                g.push(t.clone());
                continue 'next;
            }
        }
        groups.push(vec![t.clone()]);
    }
    groups
}

/// Shared measurement basis of one group: per qubit the non-I letter, or I.
pub fn group_basis(group: &[PauliTerm]) -> Vec<u8> {
    let n = group.first().map_or(0, PauliTerm::n_qubits);
    let mut basis = vec![b'I'; n];
    for t in group {
        for (q, b) in basis.iter_mut().enumerate() {
            let l = t.letter(q);
            if l != b'I' {
                *b = l;
            }
        }
    }
    basis
}

/// Deterministic text export, one `<coeff> <letters>` line per term.
pub fn export_pauli(terms: &[PauliTerm]) -> String {
    let mut out = String::new();
    for t in terms {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::enumerate_basis;
    use approx::assert_abs_diff_eq;

    fn test_basis() -> ThetaBasis {
        enumerate_basis(REGISTER_J_MAX)
    }

    #[test]
    fn embedded_observable_reproduces_the_spin_basis_correlator() {
        use crate::theta::{correlator, h_magnetic_plaquette, solve, Pair};
        let basis = test_basis();
        let c = Coupling::new(0.7).unwrap();
        let spectrum = solve(&basis, c);
        let (_, omega) = spectrum.ground_state();
        let reference = correlator(omega, &basis, Pair::P12).unwrap();

        let embedded = embed_operator(&basis, &h_magnetic_plaquette(&basis, Pair::P12)).unwrap();
        let mut omega64 = vec![0.0; 1 << DATA_QUBITS];
        for (i, s) in basis.states().iter().enumerate() {
            omega64[state_to_bits(s)] = omega[i];
        }
        assert_abs_diff_eq!(0.5 * embedded.quad_form(&omega64), reference, epsilon = 1e-12);
    }

    #[test]
    fn register_round_trip() {
        for twice in 0..4 {
            let j = Half::new(twice);
            assert_eq!(decode(encode(j)), j);
        }
        let s = ThetaState::new(Half::HALF, Half::ONE, Half::new(3));
        assert_eq!(bits_to_state(state_to_bits(&s)), s);
        assert_eq!(state_to_bits(&s), 0b11_10_01);
    }

    #[test]
    fn flag_qubit_marks_half_integers() {
        for twice in 0..4 {
            let j = Half::new(twice);
            assert_eq!(encode(j) & 1 == 1, !j.is_integer());
        }
    }

    #[test]
    fn layout_positions() {
        let l = RegisterLayout::new(2);
        assert_eq!(l.flag_qubit(1), 0);
        assert_eq!(l.msb_qubit(1), 1);
        assert_eq!(l.flag_qubit(3), 4);
        assert_eq!(l.ancilla(0), 6);
        assert_eq!(l.ancilla(1), 7);
        assert_eq!(l.n_qubits(), 8);
    }

    #[test]
    fn physical_bitstring_census() {
        assert!(is_physical_bitstring(0));
        // (1/2, 1/2, 0) couples; (1/2, 0, 0) violates the triad.
        assert!(is_physical_bitstring(0b00_01_01));
        assert!(!is_physical_bitstring(0b00_00_01));
        let count = (0..64).filter(|&b| is_physical_bitstring(b)).count();
        assert_eq!(count, test_basis().len());
    }

    #[test]
    fn embedding_restricts_to_model_hamiltonian() {
        let basis = test_basis();
        let c = Coupling::new(0.6).unwrap();
        let h = embed_hamiltonian(&basis, c, 0.0).unwrap();
        let hp = hamiltonian(&basis, c);
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let bi = state_to_bits(&basis.state(i));
                let bj = state_to_bits(&basis.state(j));
                assert_eq!(h[(bi, bj)], hp[(i, j)]);
            }
        }
    }

    #[test]
    fn unphysical_diagonal_is_shifted() {
        let basis = test_basis();
        let h = embed_hamiltonian(&basis, Coupling::new(0.3).unwrap(), 50.0).unwrap();
        let bits = state_to_bits(&ThetaState::new(Half::HALF, Half::ZERO, Half::ZERO));
        assert_abs_diff_eq!(h[(bits, bits)], 0.75 + 50.0, epsilon = 1e-14);
        for col in 0..64 {
            if col != bits {
                assert_eq!(h[(bits, col)], 0.0);
                assert_eq!(h[(col, bits)], 0.0);
            }
        }
    }

    #[test]
    fn embedding_rejects_bad_inputs() {
        let basis = test_basis();
        let c = Coupling::new(0.5).unwrap();
        assert!(embed_hamiltonian(&basis, c, -1.0).is_err());
        let wrong = enumerate_basis(Half::ONE);
        assert!(embed_hamiltonian(&wrong, c, 10.0).is_err());
    }

    #[test]
    fn single_register_electric_expansion() {
        let mut h = DMat::zeros(4);
        for (i, e) in [0.0, 0.75, 2.0, 3.75].into_iter().enumerate() {
            h[(i, i)] = e;
        }
        let terms = pauli_decompose(&h).unwrap();
        let want = [("II", 1.625), ("IZ", -0.625), ("ZI", -1.25), ("ZZ", 0.25)];
        assert_eq!(terms.len(), 4);
        for (t, (letters, coeff)) in terms.iter().zip(want) {
            assert_eq!(t.letters, letters);
            assert_abs_diff_eq!(t.coeff, coeff, epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_expands_to_one_term() {
        let terms = pauli_decompose(&DMat::identity(8)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].letters, "III");
        assert_abs_diff_eq!(terms[0].coeff, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn free_hamiltonian_is_diagonal_in_z() {
        let basis = test_basis();
        let h = embed_hamiltonian(&basis, Coupling::new(0.0).unwrap(), 50.0).unwrap();
        let terms = pauli_decompose(&h).unwrap();
        assert!(terms.iter().all(PauliTerm::is_diagonal));
    }

    #[test]
    fn decomposition_reconstructs_the_operator() {
        let basis = test_basis();
        let h = embed_hamiltonian(&basis, Coupling::new(0.5).unwrap(), 50.0).unwrap();
        let terms = pauli_decompose(&h).unwrap();
        let back = pauli_reconstruct(&terms, DATA_QUBITS);
        for i in 0..64 {
            for j in 0..64 {
                assert_abs_diff_eq!(back[(i, j)], h[(i, j)], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn grouping_collapses_diagonals_and_splits_clashes() {
        let diag = |letters: &str| PauliTerm { coeff: 1.0, letters: letters.into() };
        let groups = group_measurements(&[diag("IZ"), diag("ZI"), diag("ZZ")]);
        assert_eq!(groups.len(), 1);
        let groups = group_measurements(&[diag("XI"), diag("ZI")]);
        assert_eq!(groups.len(), 2);
        // group_basis is indexed by qubit: qubit 0 is the last letter.
        let basis = group_basis(&[diag("IZ"), diag("XI")]);
        assert_eq!(basis, vec![b'Z', b'X']);
    }

    #[test]
    fn export_is_line_per_term() {
        let terms = vec![
            PauliTerm { coeff: 1.625, letters: "IIIIZZ".into() },
            PauliTerm { coeff: -0.625, letters: "IIIIZI".into() },
        ];
        let text = export_pauli(&terms);
        assert_eq!(text, "1.625 IIIIZZ\n-0.625 IIIIZI\n");
    }
}
