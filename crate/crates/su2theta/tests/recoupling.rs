//! Recoupling kernel against independent oracles.
//!
//! The Racah-sum 3j is checked against a Clebsch-Gordan ladder recursion,
//! the Racah-sum 6j against the brute-force contraction of four 3j symbols,
//! and both orthogonality relations are verified over all spins ≤ 2.

mod support;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use su2theta::half::Half;
use su2theta::wigner::{triangle_ok, wigner_3j, wigner_6j};
use support::{contract_6j, coupling_triads, clebsch_gordan, magnetics, oracle_3j};

fn h(twice: i32) -> Half {
    Half::new(twice)
}

#[test]
fn oracle_reproduces_textbook_clebsch_gordan() {
    // Two spin-1/2: singlet and triplet.
    let r = 0.5f64.sqrt();
    assert_abs_diff_eq!(clebsch_gordan(h(1), h(1), h(0), h(1), h(-1), h(0)), r, epsilon = 1e-14);
    assert_abs_diff_eq!(clebsch_gordan(h(1), h(1), h(0), h(-1), h(1), h(0)), -r, epsilon = 1e-14);
    assert_abs_diff_eq!(clebsch_gordan(h(1), h(1), h(2), h(1), h(-1), h(0)), r, epsilon = 1e-14);
    // Two spin-1 into j=2, m=0: (1/√6, √(2/3), 1/√6).
    assert_abs_diff_eq!(
        clebsch_gordan(h(2), h(2), h(4), h(2), h(-2), h(0)),
        (1.0f64 / 6.0).sqrt(),
        epsilon = 1e-14
    );
    assert_abs_diff_eq!(
        clebsch_gordan(h(2), h(2), h(4), h(0), h(0), h(0)),
        (2.0f64 / 3.0).sqrt(),
        epsilon = 1e-14
    );
}

/// Frozen values, first produced by the ladder-recursion oracle.
#[test]
fn golden_symbols() {
    let v = wigner_3j(h(1), h(1), h(0), h(1), h(-1), h(0)).unwrap();
    assert_abs_diff_eq!(v, 0.7071067811865475, epsilon = 1e-15);
    let v = wigner_3j(h(2), h(2), h(2), h(2), h(-2), h(0)).unwrap();
    assert_abs_diff_eq!(v, GOLDEN_3J_111, epsilon = 1e-15);
    let v = wigner_6j(h(0), h(0), h(0), h(1), h(1), h(1));
    assert_abs_diff_eq!(v, -0.7071067811865475, epsilon = 1e-15);
    let v = wigner_6j(h(1), h(1), h(2), h(1), h(1), h(2));
    assert_abs_diff_eq!(v, GOLDEN_6J_HALF, epsilon = 1e-15);
}

/// 3j(1,1,1; 1,−1,0), from the oracle.
const GOLDEN_3J_111: f64 = 0.40824829046386296;
/// {1/2 1/2 1; 1/2 1/2 1}, from the four-3j contraction.
const GOLDEN_6J_HALF: f64 = 0.16666666666666666;

#[test]
fn racah_3j_matches_ladder_oracle_for_spins_up_to_two() {
    let mut checked = 0usize;
    for (j1, j2, j3) in coupling_triads(Half::from_int(2)) {
        for m1 in magnetics(j1) {
            for m2 in magnetics(j2) {
                let m3 = -(m1 + m2);
                if m3.abs() > j3 {
                    continue;
                }
                let racah = wigner_3j(j1, j2, j3, m1, m2, m3).unwrap();
                let oracle = oracle_3j(j1, j2, j3, m1, m2, m3);
                assert_abs_diff_eq!(racah, oracle, epsilon = 1e-12);
                checked += 1;
            }
        }
    }
    assert!(checked > 300, "only {checked} symbols checked");
}

#[test]
fn racah_6j_matches_contraction_for_args_up_to_two() {
    let spins: Vec<Half> = Half::ladder(Half::from_int(2)).collect();
    let mut checked = 0usize;
    for &a in &spins {
        for &b in &spins {
            for &c in &spins {
                if !triangle_ok(a, b, c) {
                    continue;
                }
                for &d in &spins {
                    for &e in &spins {
                        for &f in &spins {
                            if !(triangle_ok(a, e, f) && triangle_ok(d, b, f) && triangle_ok(d, e, c)) {
                                continue;
                            }
                            let racah = wigner_6j(a, b, c, d, e, f);
                            let brute = contract_6j(a, b, c, d, e, f);
                            assert_abs_diff_eq!(racah, brute, epsilon = 1e-10);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 500, "only {checked} symbols checked");
}

/// Σ_{j3,m3} d_{j3} (3j)(3j)' = δ_{m1,m1'} δ_{m2,m2'}.
#[test]
fn orthogonality_over_coupled_spin() {
    for j1 in Half::ladder(Half::from_int(2)) {
        for j2 in Half::ladder(Half::from_int(2)) {
            for m1 in magnetics(j1) {
                for m2 in magnetics(j2) {
                    for m1p in magnetics(j1) {
                        for m2p in magnetics(j2) {
                            let mut sum = 0.0;
                            for tj3 in ((j1 - j2).abs().twice()..=(j1 + j2).twice()).step_by(2) {
                                let j3 = h(tj3);
                                for m3 in magnetics(j3) {
                                    sum += f64::from(j3.dim())
                                        * wigner_3j(j1, j2, j3, m1, m2, m3).unwrap()
                                        * wigner_3j(j1, j2, j3, m1p, m2p, m3).unwrap();
                                }
                            }
                            let want = f64::from(m1 == m1p && m2 == m2p);
                            assert_abs_diff_eq!(sum, want, epsilon = 1e-12);
                        }
                    }
                }
            }
        }
    }
}

/// Σ_{m1,m2} d_{j3} (3j)(3j)' = δ_{j3,j3'} δ_{m3,m3'}.
#[test]
fn orthogonality_over_magnetic_numbers() {
    for j1 in Half::ladder(Half::from_int(2)) {
        for j2 in Half::ladder(Half::from_int(2)) {
            for tj3 in ((j1 - j2).abs().twice()..=(j1 + j2).twice()).step_by(2) {
                for tj3p in ((j1 - j2).abs().twice()..=(j1 + j2).twice()).step_by(2) {
                    let (j3, j3p) = (h(tj3), h(tj3p));
                    for m3 in magnetics(j3) {
                        for m3p in magnetics(j3p) {
                            let mut sum = 0.0;
                            for m1 in magnetics(j1) {
                                for m2 in magnetics(j2) {
                                    sum += f64::from(j3.dim())
                                        * wigner_3j(j1, j2, j3, m1, m2, m3).unwrap()
                                        * wigner_3j(j1, j2, j3p, m1, m2, m3p).unwrap();
                                }
                            }
                            let want = f64::from(j3 == j3p && m3 == m3p);
                            assert_abs_diff_eq!(sum, want, epsilon = 1e-12);
                        }
                    }
                }
            }
        }
    }
}

fn spin_pair() -> impl Strategy<Value = (Half, Half)> {
    (0i32..=8).prop_flat_map(|tj| {
        (Just(tj), 0..=tj).prop_map(|(tj, k)| (Half::new(tj), Half::new(-tj + 2 * k)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Cyclic column permutations leave 3j invariant; odd ones and a global
    /// m-flip contribute (−1)^{j1+j2+j3}.
    #[test]
    fn three_j_symmetries(
        (j1, m1) in spin_pair(),
        (j2, m2) in spin_pair(),
        tj3 in 0i32..=8,
    ) {
        let j3 = h(tj3);
        let m3 = -(m1 + m2);
        prop_assume!(m3.abs() <= j3 && (j3.twice() + m3.twice()) % 2 == 0);
        let v = wigner_3j(j1, j2, j3, m1, m2, m3).unwrap();
        let sign = if (j1 + j2 + j3).twice() % 4 == 0 { 1.0 } else { -1.0 };
        let cyc = wigner_3j(j3, j1, j2, m3, m1, m2).unwrap();
        let odd = wigner_3j(j1, j3, j2, m1, m3, m2).unwrap();
        let neg = wigner_3j(j1, j2, j3, -m1, -m2, -m3).unwrap();
        prop_assert!((cyc - v).abs() < 1e-12);
        prop_assert!((odd - sign * v).abs() < 1e-12);
        prop_assert!((neg - sign * v).abs() < 1e-12);
    }

    /// The 6j is invariant under column permutations and pairwise
    /// upper-lower exchange.
    #[test]
    fn six_j_symmetries(
        ta in 0i32..=6, tb in 0i32..=6, tc in 0i32..=6,
        td in 0i32..=6, te in 0i32..=6, tf in 0i32..=6,
    ) {
        let (a, b, c, d, e, f) = (h(ta), h(tb), h(tc), h(td), h(te), h(tf));
        let v = wigner_6j(a, b, c, d, e, f);
        prop_assert!((wigner_6j(b, a, c, e, d, f) - v).abs() < 1e-12);
        prop_assert!((wigner_6j(c, b, a, f, e, d) - v).abs() < 1e-12);
        prop_assert!((wigner_6j(a, e, f, d, b, c) - v).abs() < 1e-12);
        prop_assert!((wigner_6j(d, e, c, a, b, f) - v).abs() < 1e-12);
    }

    /// Zero whenever any selection rule fails.
    #[test]
    fn three_j_selection_rules(
        (j1, m1) in spin_pair(),
        (j2, m2) in spin_pair(),
        (j3, m3) in spin_pair(),
    ) {
        if m1.twice() + m2.twice() + m3.twice() != 0
            || !su2theta::wigner::triangle_ok(j1, j2, j3)
        {
            prop_assert_eq!(wigner_3j(j1, j2, j3, m1, m2, m3).unwrap(), 0.0);
        }
    }
}
