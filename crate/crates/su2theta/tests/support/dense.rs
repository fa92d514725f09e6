//! Dense matrix oracle: builds full 2^n unitaries from the per-gate
//! matrices and evolves states/density matrices by explicit products.
//! Deliberately independent of the simulator's bit-loop kernels.

#![allow(dead_code)]

use num_complex::Complex64;
use su2theta::circuit::{Circuit, Gate, GateKind};
use su2theta::sim::gate_matrix;

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major complex matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct CMat {
    pub dim: usize,
    pub a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> CMat {
        CMat { dim, a: vec![C0; dim * dim] }
    }

    pub fn identity(dim: usize) -> CMat {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m.a[i * dim + i] = C1;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.a[r * self.dim + c] = v;
    }

    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let v = self.get(r, k);
                if v != C0 {
                    for c in 0..d {
                        out.a[r * d + c] += v * rhs.get(k, c);
                    }
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        let mut out = vec![C0; d];
        for r in 0..d {
            for c in 0..d {
                out[r] += self.get(r, c) * v[c];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&mut self, s: f64) {
        self.a.iter_mut().for_each(|v| *v *= s);
    }

    pub fn add(&mut self, rhs: &CMat) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.a.iter_mut().zip(&rhs.a) {
            *a += b;
        }
    }

    pub fn max_abs_diff(&self, rhs: &CMat) -> f64 {
        self.a
            .iter()
            .zip(&rhs.a)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Expands a small operator on the listed qubits (local bit i = qubits[i])
/// to the full 2^n space.
pub fn embed_local(n_qubits: usize, qubits: &[usize], small: &[Complex64]) -> CMat {
    let k = qubits.len();
    let sdim = 1 << k;
    assert_eq!(small.len(), sdim * sdim);
    let dim = 1 << n_qubits;
    let mut full = CMat::zeros(dim);
    for col in 0..dim {
        let mut local_in = 0;
        let mut base = col;
        for (i, &q) in qubits.iter().enumerate() {
            local_in |= (col >> q & 1) << i;
            base &= !(1 << q);
        }
        for local_out in 0..sdim {
            let amp = small[local_out * sdim + local_in];
            if amp != C0 {
                let mut row = base;
                for (i, &q) in qubits.iter().enumerate() {
                    row |= (local_out >> i & 1) << q;
                }
                full.set(row, col, amp);
            }
        }
    }
    full
}

/// Full-space unitary of one gate.
pub fn embed_gate(n_qubits: usize, g: &Gate, params: &[f64]) -> CMat {
    let theta = g.param.angle(params);
    embed_local(n_qubits, &g.qubits, &gate_matrix(g.kind, theta))
}

/// Evolves |0…0⟩ by explicit matrix products.
pub fn run_dense(c: &Circuit, params: &[f64]) -> Vec<Complex64> {
    let mut v = vec![C0; 1 << c.n_qubits()];
    v[0] = C1;
    for g in c.gates() {
        if g.kind == GateKind::Measure {
            continue;
        }
        v = embed_gate(c.n_qubits(), g, params).matvec(&v);
    }
    v
}

/// 2×2 Pauli matrix for code 0..3 = I, X, Y, Z.
pub fn pauli_2x2(code: u8) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    match code {
        0 => vec![C1, C0, C0, C1],
        1 => vec![C0, C1, C1, C0],
        2 => vec![C0, -i, i, C0],
        3 => vec![C1, C0, C0, -C1],
        _ => panic!("bad Pauli code"),
    }
}

/// ρ → U ρ U†.
pub fn conjugate(rho: &CMat, u: &CMat) -> CMat {
    u.matmul(rho).matmul(&u.dagger())
}

/// Exact 1-qubit depolarizing channel on qubit q.
pub fn depolarize_1q(rho: &CMat, n_qubits: usize, q: usize, p: f64) -> CMat {
    let mut out = rho.clone();
    out.scale(1.0 - p);
    for code in 1..4u8 {
        let u = embed_local(n_qubits, &[q], &pauli_2x2(code));
        let mut term = conjugate(rho, &u);
        term.scale(p / 3.0);
        out.add(&term);
    }
    out
}

/// Exact 2-qubit depolarizing channel on qubits (a, b).
pub fn depolarize_2q(rho: &CMat, n_qubits: usize, a: usize, b: usize, p: f64) -> CMat {
    let mut out = rho.clone();
    out.scale(1.0 - p);
    for pair in 1..16u8 {
        let ua = embed_local(n_qubits, &[a], &pauli_2x2(pair & 3));
        let ub = embed_local(n_qubits, &[b], &pauli_2x2(pair >> 2));
        let mut term = conjugate(rho, &ua.matmul(&ub));
        term.scale(p / 15.0);
        out.add(&term);
    }
    out
}

/// Exact noisy evolution of |0…0⟩⟨0…0| under the trajectory noise model.
pub fn exact_noisy_density(c: &Circuit, params: &[f64], p2: f64, p1: f64) -> CMat {
    let n = c.n_qubits();
    let mut rho = CMat::zeros(1 << n);
    rho.set(0, 0, C1);
    for g in c.gates() {
        if g.kind == GateKind::Measure {
            continue;
        }
        rho = conjugate(&rho, &embed_gate(n, g, params));
        match g.kind.arity() {
            1 => rho = depolarize_1q(&rho, n, g.qubits[0], p1),
            2 => rho = depolarize_2q(&rho, n, g.qubits[0], g.qubits[1], p2),
            _ => panic!("channel oracle only handles 1- and 2-qubit gates"),
        }
    }
    rho
}
