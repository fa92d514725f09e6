//! Circuit resource budgets: parameter counts, ancilla counts, entangler
//! counts, and routed native-gate totals on the bundled 17-qubit chip.
//!
//! The routed totals are frozen from the first verified run so that changes
//! to the ansatz schedules, the gate decompositions, the layout heuristic, or
//! the router cannot silently drift the circuit costs.

use su2theta::ansatz::{build_hea, build_ssp, AnsatzSpec, Family};
use su2theta::transpile::{transpile, CouplingMap};

/// Reference per-family costs: (params, ancillas, routed 1Q, routed 2Q, swaps).
const SSP_BUDGETS: [(usize, usize, usize, usize, usize); 3] =
    [(6, 1, 169, 34, 4), (10, 1, 430, 92, 15), (16, 2, 585, 126, 21)];

/// Published reference totals the routed circuits must sit within ±30% of.
const SSP_REFERENCE: [(usize, usize); 3] = [(216, 34), (394, 73), (524, 104)];

fn within_30pct(got: usize, reference: usize) -> bool {
    let lo = (reference as f64 * 0.7).ceil() as usize;
    let hi = (reference as f64 * 1.3).floor() as usize;
    (lo..=hi).contains(&got)
}

#[test]
fn sequential_ansatz_parameter_and_ancilla_counts_are_exact() {
    for (n, &(params, ancillas, _, _, _)) in (2..=4).zip(SSP_BUDGETS.iter()) {
        let c = build_ssp(n).unwrap();
        assert_eq!(c.n_slots(), params, "ssp{n} parameter count");
        assert_eq!(c.n_ancillas(), ancillas, "ssp{n} ancilla count");
    }
}

#[test]
fn hardware_efficient_parameter_and_entangler_counts_are_exact() {
    for m in [12, 18, 24, 30] {
        let c = build_hea(m).unwrap();
        assert_eq!(c.n_slots(), m, "hea{m} parameter count");
        assert_eq!(c.n_ancillas(), 0, "hea{m} uses no ancillas");
        let (_, q2, _) = c.gate_census();
        assert_eq!(q2, 5 * (m / 6 - 1), "hea{m} entangler count");
    }
}

#[test]
fn routed_sequential_circuits_stay_within_the_published_band() {
    let chip = CouplingMap::square17();
    for (i, n) in (2..=4).enumerate() {
        let c = build_ssp(n).unwrap();
        let routed = transpile(&c, &chip, None).unwrap();
        let (q1, q2, q3plus) = routed.circuit.gate_census();
        assert_eq!(q3plus, 0, "routed circuits are 1Q/2Q only");
        let (params, _, frozen_1q, frozen_2q, frozen_swaps) = SSP_BUDGETS[i];
        assert_eq!(routed.circuit.n_slots(), params, "routing preserves slots");
        assert_eq!((q1, q2, routed.swaps), (frozen_1q, frozen_2q, frozen_swaps), "ssp{n} frozen routed census");
        let (ref_1q, ref_2q) = SSP_REFERENCE[i];
        assert!(within_30pct(q1, ref_1q), "ssp{n} 1Q {q1} vs reference {ref_1q}");
        assert!(within_30pct(q2, ref_2q), "ssp{n} 2Q {q2} vs reference {ref_2q}");
    }
}

#[test]
fn hardware_efficient_circuits_route_without_swaps() {
    let chip = CouplingMap::square17();
    for m in [18, 24, 30] {
        let c = build_hea(m).unwrap();
        let routed = transpile(&c, &chip, None).unwrap();
        let (q1, q2, _) = routed.circuit.gate_census();
        assert_eq!(routed.swaps, 0, "hea{m} fits the chip linearly");
        assert_eq!((q1, q2), (m, 5 * (m / 6 - 1)), "hea{m} routes 1:1");
    }
}

#[test]
fn ansatz_specs_report_the_same_budgets() {
    for (id, params) in [("ssp2", 6), ("ssp3", 10), ("ssp4", 16), ("hea18", 18), ("hea30", 30)] {
        let spec = AnsatzSpec::parse(id).unwrap();
        assert_eq!(spec.n_params(), params, "{id}");
        assert_eq!(spec.id(), id);
        match spec.family {
            Family::Ssp => assert!(spec.size >= 2 && spec.size <= 4),
            Family::Hea => assert_eq!(spec.size % 6, 0),
        }
    }
}
