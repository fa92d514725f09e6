//! Simulator cross-validation against dense matrix products and exact
//! depolarizing-channel arithmetic.

#[path = "support/dense.rs"]
mod dense;

use dense::{exact_noisy_density, run_dense, CMat, C1};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use su2theta::circuit::{Circuit, GateKind, Param};
use su2theta::linalg::DMat;
use su2theta::sim::{
    expectation_dense, gate_matrix, norm, simulate_noisy_expectation, simulate_state, NoiseSpec,
};

fn random_circuit(rng: &mut StdRng, n_qubits: usize, n_gates: usize) -> Circuit {
    let kinds = [
        GateKind::Ry,
        GateKind::Rz,
        GateKind::H,
        GateKind::X,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Toffoli,
        GateKind::PhasedToffoli,
        GateKind::Cswap,
        GateKind::ControlledRy,
    ];
    let mut c = Circuit::new(n_qubits, 0);
    let slots: Vec<usize> = (0..3).map(|_| c.alloc_slot()).collect();
    for _ in 0..n_gates {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let mut qubits = Vec::new();
        while qubits.len() < kind.arity() {
            let q = rng.gen_range(0..n_qubits);
            if !qubits.contains(&q) {
                qubits.push(q);
            }
        }
        let param = if kind.takes_angle() {
            if rng.gen_bool(0.5) {
                Param::Slot(slots[rng.gen_range(0..slots.len())])
            } else {
                Param::Fixed(rng.gen_range(-3.2..3.2))
            }
        } else {
            Param::None
        };
        c.push(kind, qubits, param);
    }
    c
}

#[test]
fn random_circuits_match_the_dense_matrix_oracle() {
    let mut rng = StdRng::seed_from_u64(42);
    for round in 0..10 {
        let c = random_circuit(&mut rng, 5, 30);
        let params: Vec<f64> = (0..c.n_slots()).map(|_| rng.gen_range(-3.2..3.2)).collect();
        let fast = simulate_state(&c, &params).unwrap();
        let slow = run_dense(&c, &params);
        let max_diff = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-10, "round {round}: state mismatch {max_diff}");
        assert!((norm(&fast) - 1.0).abs() < 1e-12);

        let mut h = DMat::zeros(32);
        for i in 0..32 {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let fast_e = expectation_dense(&fast, &h);
        let mut slow_e = Complex64::new(0.0, 0.0);
        for i in 0..32 {
            for j in 0..32 {
                slow_e += slow[i].conj() * h[(i, j)] * slow[j];
            }
        }
        assert!(slow_e.im.abs() < 1e-10);
        assert!((fast_e - slow_e.re).abs() < 1e-10, "round {round}: expectation mismatch");
    }
}

#[test]
fn every_gate_kind_has_a_unitary_matrix() {
    for kind in GateKind::ALL {
        if kind == GateKind::Measure {
            continue;
        }
        let m = gate_matrix(kind, 0.7321);
        let dim = 1 << kind.arity();
        let full = CMat { dim, a: m };
        let product = full.dagger().matmul(&full);
        let dev = product.max_abs_diff(&CMat::identity(dim));
        assert!(dev <= 1e-14, "{} deviates from unitarity by {dev}", kind.name());
    }
}

#[test]
fn phased_toffoli_differs_from_toffoli_by_one_phase() {
    let t = CMat { dim: 8, a: gate_matrix(GateKind::Toffoli, 0.0) };
    let pt = CMat { dim: 8, a: gate_matrix(GateKind::PhasedToffoli, 0.0) };
    let d = pt.dagger().matmul(&t);
    for r in 0..8 {
        for c in 0..8 {
            let want = if r != c {
                Complex64::new(0.0, 0.0)
            } else if r == 0b101 {
                -C1
            } else {
                C1
            };
            assert!((d.get(r, c) - want).norm() < 1e-14, "entry ({r},{c})");
        }
    }
}

fn zz_observable() -> DMat {
    let mut h = DMat::zeros(4);
    for i in 0..4 {
        let sign = if (i & 1) ^ (i >> 1 & 1) == 0 { 1.0 } else { -1.0 };
        h[(i, i)] = sign;
    }
    h
}

#[test]
fn trajectory_noise_is_unbiased_against_the_exact_channel() {
    let mut c = Circuit::new(2, 0);
    c.ry(0, Param::Fixed(0.7));
    c.cz(0, 1);
    c.ry(1, Param::Fixed(0.4));
    c.cz(1, 0);
    let (p2, p1) = (0.2, 0.1);

    let rho = exact_noisy_density(&c, &[], p2, p1);
    let h = zz_observable();
    let mut exact = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        exact += rho.get(i, i) * h[(i, i)];
    }
    assert!(exact.im.abs() < 1e-12);

    let noise = NoiseSpec::new(p2, p1).unwrap();
    let est = simulate_noisy_expectation(&c, &[], noise, 100_000, 2024, &h).unwrap();
    let dev = (est.mean - exact.re).abs();
    assert!(
        dev < 5.0 * est.std_error,
        "trajectory mean {} vs exact {}, dev {dev} > 5·SE {}",
        est.mean,
        exact.re,
        est.std_error
    );
    assert!(est.std_error > 0.0);
}

#[test]
fn fully_depolarizing_two_qubit_gate() {
    // A CZ on |00⟩ acts trivially, so with p2 = 1 the state is the uniform
    // non-identity Pauli mixture and ⟨Z accepting either qubit⟩ = −1/15.
    let mut c = Circuit::new(2, 0);
    c.cz(0, 1);
    let rho = exact_noisy_density(&c, &[], 1.0, 0.0);
    let mut z0 = DMat::zeros(4);
    for i in 0..4 {
        z0[(i, i)] = if i & 1 == 0 { 1.0 } else { -1.0 };
    }
    let exact: f64 = (0..4).map(|i| (rho.get(i, i) * z0[(i, i)]).re).sum();
    assert!((exact - (-1.0 / 15.0)).abs() < 1e-12, "channel value {exact}");

    let noise = NoiseSpec { p2: 1.0, p1: 0.0, readout_error: 0.0 };
    let est = simulate_noisy_expectation(&c, &[], noise, 60_000, 5, &z0).unwrap();
    assert!((est.mean - exact).abs() < 5.0 * est.std_error);
}

#[test]
fn ideal_noise_reproduces_the_pure_state_exactly() {
    let mut rng = StdRng::seed_from_u64(1);
    let c = random_circuit(&mut rng, 3, 12);
    let params: Vec<f64> = (0..c.n_slots()).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let pure = simulate_state(&c, &params).unwrap();
    let mut h = DMat::zeros(8);
    for i in 0..8 {
        h[(i, i)] = i as f64;
    }
    let est = simulate_noisy_expectation(&c, &params, NoiseSpec::ideal(), 3, 0, &h).unwrap();
    assert!((est.mean - expectation_dense(&pure, &h)).abs() < 1e-12);
    assert!(est.std_error < 1e-12);
}
