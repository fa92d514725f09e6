//! Gauge preservation of the subspace-search circuits: for any parameter
//! values, the post-selected state must stay inside the physical
//! (triangle-consistent) subspace.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

use su2theta::ansatz::{build_hea, build_ssp, post_selected_support, preserves_physical_support};
use su2theta::encoding::is_physical_bitstring;
use su2theta::sim::{post_select_zeros, simulate_state};

fn unphysical_weight(data: &[num_complex::Complex64]) -> f64 {
    data.iter()
        .enumerate()
        .filter(|&(b, _)| !is_physical_bitstring(b))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

#[test]
fn random_parameters_never_populate_unphysical_states() {
    let mut rng = StdRng::seed_from_u64(2718);
    for n in 2..=4 {
        let c = build_ssp(n).unwrap();
        for trial in 0..100 {
            let params: Vec<f64> =
                (0..c.n_slots()).map(|_| rng.gen_range(-PI..PI)).collect();
            let state = simulate_state(&c, &params).unwrap();
            let (data, acceptance) = post_select_zeros(&state, c.n_data()).unwrap();
            let leak = unphysical_weight(&data);
            assert!(leak < 1e-10, "ssp{n} trial {trial} leaked {leak:.3e}");
            assert!(acceptance > 0.0);
        }
    }
}

#[test]
fn static_support_analysis_agrees_with_simulation() {
    for n in 2..=4 {
        let c = build_ssp(n).unwrap();
        assert!(preserves_physical_support(&c), "ssp{n}");

        // Every string the static analysis reports must actually be
        // populated by some parameter choice; probe with a generic vector.
        let params: Vec<f64> = (0..c.n_slots()).map(|i| 0.9 + 0.37 * i as f64).collect();
        let state = simulate_state(&c, &params).unwrap();
        let (data, _) = post_select_zeros(&state, c.n_data()).unwrap();
        let support = post_selected_support(&c);
        for (b, amp) in data.iter().enumerate() {
            if amp.norm_sqr() > 1e-20 {
                assert!(support.contains(&b), "ssp{n} populated {b:#08b} outside analysis");
            }
        }
    }
}

#[test]
fn hardware_efficient_layers_offer_no_such_protection() {
    let c = build_hea(18).unwrap();
    assert!(!preserves_physical_support(&c));

    let params: Vec<f64> = (0..c.n_slots()).map(|i| 0.5 + 0.21 * i as f64).collect();
    let state = simulate_state(&c, &params).unwrap();
    let weight: f64 = state
        .iter()
        .enumerate()
        .filter(|&(b, _)| !is_physical_bitstring(b))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    assert!(weight > 1e-3, "a generic unconstrained state mostly leaves the subspace");
}
