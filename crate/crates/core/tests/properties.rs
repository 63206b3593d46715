// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use qwass::channels::{threshold_delta, NoiseChannel};
use qwass::experiments::{binary_entropy, lambda_c};
use qwass::metrics::{hamming_metric, trace_metric, PluginConfig};
use qwass::norms::{w1h_norm, TracelessHermitian};
use qwass::rng::rng;
use qwass::states::measures::{trace_norm, two_norm};
use qwass::states::random::{haar_pure_seeded, haar_unitary, random_mixed};
use qwass::states::DensityOperator;
use qwass::transport::{estimate_wp, plan_value, random_plan, schmidt_flatten, Order, SearchBudget, TransportPlan};

fn quick() -> SearchBudget {
    SearchBudget { restarts: 2, iterations: 60, ..SearchBudget::default() }
}

fn pair(dim: usize, seed: u64) -> (DensityOperator, DensityOperator) {
    (random_mixed(&[dim], dim, seed).unwrap(), random_mixed(&[dim], dim, seed ^ 0x9e37_79b9).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_is_ordered_and_witnessed(dim in 2usize..=3, seed in any::<u64>()) {
        let (rho, sigma) = pair(dim, seed);
        let m = trace_metric(&[dim]).unwrap();
        let b = estimate_wp(&rho, &sigma, &m, 1.0, &quick()).unwrap();
        prop_assert!(b.lower <= b.upper);
        b.witness.check_marginals(&rho, &sigma).unwrap();
        let v = plan_value(&b.witness, &m, Order::Finite(1.0)).unwrap();
        prop_assert!((v - b.upper).abs() <= 1e-9);
    }

    #[test]
    fn swapping_states_keeps_brackets_consistent(seed in any::<u64>()) {
        let (rho, sigma) = pair(3, seed);
        let m = trace_metric(&[3]).unwrap();
        let ab = estimate_wp(&rho, &sigma, &m, 2.0, &quick()).unwrap();
        let ba = estimate_wp(&sigma, &rho, &m, 2.0, &quick()).unwrap();
        prop_assert!(ab.lower <= ba.upper + 1e-9 && ba.lower <= ab.upper + 1e-9);
        let rev = ab.witness.reversed();
        rev.check_marginals(&sigma, &rho).unwrap();
    }

    #[test]
    fn unitary_conjugation_preserves_plan_costs(dim in 2usize..=4, n in 1usize..8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let plan = random_plan(&[dim], n, &mut r).unwrap();
        let u = haar_unitary(dim, &mut r);
        let conj = NoiseChannel::mixed_unitary(vec![(1.0, u)], vec![dim]).unwrap().lift_plan(&plan).unwrap();
        let m = trace_metric(&[dim]).unwrap();
        for o in [Order::Finite(1.0), Order::Finite(2.0), Order::Infinity] {
            let (a, b) = (plan_value(&plan, &m, o).unwrap(), plan_value(&conj, &m, o).unwrap());
            prop_assert!((a - b).abs() <= 1e-10, "{o:?}: {a} vs {b}");
        }
    }

    #[test]
    fn mixed_unitary_channels_do_not_raise_cost(dim in 2usize..=3, terms in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let plan = random_plan(&[dim], 5, &mut r).unwrap();
        let units: Vec<_> = (0..terms).map(|_| (1.0 / terms as f64, haar_unitary(dim, &mut r))).collect();
        let ch = NoiseChannel::mixed_unitary(units, vec![dim]).unwrap();
        let lifted = ch.lift_plan(&plan).unwrap();
        let src = DensityOperator::new(plan.source_marginal(), vec![dim]).unwrap();
        let tgt = DensityOperator::new(plan.target_marginal(), vec![dim]).unwrap();
        lifted.check_marginals(&ch.apply(&src).unwrap(), &ch.apply(&tgt).unwrap()).unwrap();
        let m = trace_metric(&[dim]).unwrap();
        for o in [Order::Finite(1.0), Order::Finite(2.0), Order::Infinity] {
            prop_assert!(plan_value(&lifted, &m, o).unwrap() <= plan_value(&plan, &m, o).unwrap() + 1e-10);
        }
    }

    #[test]
    fn mixtures_average_first_order_costs(lam in 0.01f64..0.99, seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_plan(&[3], 4, &mut r).unwrap(), random_plan(&[3], 6, &mut r).unwrap());
        let mix = TransportPlan::mixture(&[(lam, &a), (1.0 - lam, &b)]).unwrap();
        let m = trace_metric(&[3]).unwrap();
        let v = |p: &TransportPlan| plan_value(p, &m, Order::Finite(1.0)).unwrap();
        prop_assert!((v(&mix) - (lam * v(&a) + (1.0 - lam) * v(&b))).abs() <= 1e-10);
    }

    #[test]
    fn schmidt_flattening_keeps_marginals(d in 2usize..=3, q in 0.05f64..1.0, seed in any::<u64>()) {
        let chi = haar_pure_seeded(&[d, d], seed).unwrap();
        let flat = schmidt_flatten(q, &chi).unwrap();
        let joint = DensityOperator::from_pure(&chi);
        let (ra, rb) = (joint.partial_trace(&[0]).unwrap(), joint.partial_trace(&[1]).unwrap());
        let da = (flat.source_marginal() - ra.matrix() * qwass::states::linalg::c(q, 0.0)).norm();
        let db = (flat.target_marginal() - rb.matrix() * qwass::states::linalg::c(q, 0.0)).norm();
        prop_assert!(da <= 1e-10 && db <= 1e-10, "{da} {db}");
        prop_assert!((flat.mass() - q).abs() <= 1e-10);
    }

    #[test]
    fn hoelder_bound_sits_below_plan_costs(dim in 2usize..=4, n in 1usize..10, seed in any::<u64>()) {
        let mut r = rng(seed);
        let plan = random_plan(&[dim], n, &mut r).unwrap();
        let fs = PluginConfig { kind: "fubini_study".into(), diameter: None, diameter_exact: None, hoelder: None, seed: None }
            .build(&[dim])
            .unwrap();
        let x = plan.source_marginal() - plan.target_marginal();
        for m in [trace_metric(&[dim]).unwrap(), fs] {
            let h = m.hoelder.expect("declared constants");
            prop_assert!(h.lower_bound(two_norm(&x)) <= plan_value(&plan, &m, Order::Finite(1.0)).unwrap() + 1e-12);
        }
    }

    #[test]
    fn lambda_c_solves_its_equation(d in 2usize..=4, c in 0.0f64..0.95) {
        let l = lambda_c(d, c).unwrap();
        let g = binary_entropy(l) + l * ((d * d - 1) as f64).ln();
        prop_assert!((g - (1.0 - c) * (d as f64).ln()).abs() <= 1e-9);
    }

    #[test]
    fn threshold_delta_is_a_weight(m in 0.0f64..1.0, p2 in 1.5f64..4.0) {
        let t = threshold_delta(m, 1.0, 1.0, p2);
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!(threshold_delta(1.0, 1.0, 1.0, p2).abs() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn w1h_norm_is_sandwiched_by_trace_norm(s in 1usize..=4, seed in any::<u64>()) {
        let rho = random_mixed(&[2, 2], s, seed).unwrap();
        let sigma = random_mixed(&[2, 2], s, seed.wrapping_add(1)).unwrap();
        let x = TracelessHermitian::difference(&rho, &sigma).unwrap();
        let w = w1h_norm(&x).unwrap().value;
        let t = trace_norm(x.matrix()).unwrap();
        prop_assert!(0.5 * t <= w + 1e-6 && w <= t + 1e-6, "trace {t} w1h {w}");
    }

    #[test]
    fn hamming_distance_dominates_trace_distance(seed in any::<u64>()) {
        let h = hamming_metric(2, 2).unwrap();
        let t = trace_metric(&[2, 2]).unwrap();
        let a = haar_pure_seeded(&[2, 2], seed).unwrap();
        let b = haar_pure_seeded(&[2, 2], seed.wrapping_add(1)).unwrap();
        let (dh, dt) = (h.distance(&a, &b), t.distance(&a, &b));
        prop_assert!(dt <= dh + 1e-6 && dh <= 2.0 + 1e-9);
        prop_assert!((dh - h.distance(&b, &a)).abs() <= 1e-6);
    }
}
