// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

use super::{Order, PlanEntry, TransportPlan};
use crate::error::Result;
use crate::metrics::MetricSpec;
use nalgebra::DMatrix;

/// Real coordinates of `|ψ><ψ| ⊕ |φ><φ|`: `2 D²` numbers per entry.
fn coordinates(e: &PlanEntry) -> Vec<f64> {
    let mut out = Vec::new();
    for s in [&e.psi, &e.phi] {
        let v = s.amplitudes();
        let d = v.len();
        for i in 0..d {
            out.push(v[i].norm_sqr());
            for j in (i + 1)..d {
                let z = v[i] * v[j].conj();
                out.push(z.re);
                out.push(z.im);
            }
        }
    }
    out
}

/// First null vector of `a` from its reduced row echelon form, if any.
fn null_vector(a: &DMatrix<f64>) -> Option<Vec<f64>> {
    let (rows, cols) = a.shape();
    let mut m = a.clone();
    let scale = m.amax().max(1.0);
    let tol = 1e-10 * scale;
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            // Every further column is free.
            return Some(free_column_vector(&m, &pivots, col, cols));
        }
        let (best, val) = (r..rows).map(|i| (i, m[(i, col)].abs())).fold((r, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if val <= tol {
            return Some(free_column_vector(&m, &pivots, col, cols));
        }
        m.swap_rows(r, best);
        let p = m[(r, col)];
        for k in col..cols {
            m[(r, k)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, col)];
                if f != 0.0 {
                    for k in col..cols {
                        m[(i, k)] -= f * m[(r, k)];
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    None
}

fn free_column_vector(m: &DMatrix<f64>, pivots: &[usize], free: usize, cols: usize) -> Vec<f64> {
    let mut c = vec![0.0; cols];
    c[free] = 1.0;
    for (row, &pc) in pivots.iter().enumerate() {
        c[pc] = -m[(row, free)];
    }
    c
}

/// Remove entries along linear relations between the stacked projector
/// pairs until they are independent; at most `2 D²` entries remain.
///
/// Each step finds `c ≠ 0` with `Σ c_j (|ψ_j><ψ_j|, |φ_j><φ_j|) = 0`,
/// orients it so `Σ c_j d_j^p ≥ 0` and subtracts `t c` with
/// `t = min_{c_k > 0} q_k / c_k`. Marginals are unchanged and the cost does
/// not increase. For `p = ∞` no pair is added, so the bottleneck cannot grow.
pub fn reduce_plan(plan: &TransportPlan, metric: &MetricSpec, order: Order) -> Result<TransportPlan> {
    metric.check_dims(plan.dims())?;
    let mut entries: Vec<PlanEntry> = plan.entries().to_vec();
    let mut dist: Vec<f64> = entries.iter().map(|e| metric.distance(&e.psi, &e.phi)).collect();
    let cost = |d: f64| match order {
        Order::Finite(p) => d.powf(p),
        Order::Infinity => 0.0,
    };
    let max_steps = entries.len();
    for _ in 0..max_steps {
        let coords: Vec<Vec<f64>> = entries.iter().map(coordinates).collect();
        let rows = coords[0].len();
        if entries.len() <= 1 {
            break;
        }
        let a = DMatrix::from_fn(rows, entries.len(), |i, j| coords[j][i]);
        let Some(mut c) = null_vector(&a) else { break };
        let residual = (&a * DMatrix::from_column_slice(c.len(), 1, &c)).amax();
        if residual > 1e-9 {
            log::warn!("plan reduction: null vector residual {residual:e}, stopping");
            break;
        }
        let slope: f64 = c.iter().zip(&dist).map(|(ci, &d)| ci * cost(d)).sum();
        if slope < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        let Some((kmin, t)) = c
            .iter()
            .enumerate()
            .filter(|(_, &ci)| ci > 1e-12)
            .map(|(k, &ci)| (k, entries[k].q / ci))
            .min_by(|x, y| x.1.total_cmp(&y.1))
        else {
            log::warn!("plan reduction: degenerate null vector, stopping");
            break;
        };
        for (e, ci) in entries.iter_mut().zip(&c) {
            e.q -= t * ci;
        }
        entries[kmin].q = 0.0;
        let keep: Vec<bool> = entries.iter().map(|e| e.q > 1e-15).collect();
        let mut k = 0;
        entries.retain(|_| {
            k += 1;
            keep[k - 1]
        });
        let mut k = 0;
        dist.retain(|_| {
            k += 1;
            keep[k - 1]
        });
    }
    TransportPlan::from_weights(entries)
}

#[cfg(test)]
mod tests {
    use super::super::plan_cost;
    use super::*;
    use crate::metrics::trace_metric;
    use crate::rng;
    use crate::states::DensityOperator;
    use proptest::prelude::*;

    fn sample_plan(d: usize, n: usize, seed: u64) -> TransportPlan {
        super::super::random_plan(&[d], n, &mut rng::rng(seed)).unwrap()
    }

    fn check(d: usize, n: usize, seed: u64, p: f64) {
        let q = sample_plan(d, n, seed);
        let m = trace_metric(&[d]).unwrap();
        let r = reduce_plan(&q, &m, Order::Finite(p)).unwrap();
        assert!(r.len() <= 2 * d * d, "{} entries", r.len());
        let rho = DensityOperator::new(q.source_marginal(), vec![d]).unwrap();
        let sigma = DensityOperator::new(q.target_marginal(), vec![d]).unwrap();
        assert!(r.marginal_error(&rho, &sigma) <= 1e-8);
        assert!(plan_cost(&r, &m, p).unwrap() <= plan_cost(&q, &m, p).unwrap() + 1e-10);
    }

    #[test]
    fn reduces_oversized_plan() {
        check(2, 2 * 4 + 5, 9, 1.0);
        check(3, 40, 10, 2.0);
    }

    #[test]
    fn minimal_plan_unchanged() {
        let q = sample_plan(2, 2, 3);
        let r = reduce_plan(&q, &trace_metric(&[2]).unwrap(), Order::Finite(1.0)).unwrap();
        assert_eq!(r.len(), 2);
        for (a, b) in q.entries().iter().zip(r.entries()) {
            assert!((a.q - b.q).abs() < 1e-15);
        }
    }

    #[test]
    fn bottleneck_never_grows() {
        let q = sample_plan(2, 30, 5);
        let m = trace_metric(&[2]).unwrap();
        let r = reduce_plan(&q, &m, Order::Infinity).unwrap();
        let before = super::super::plan_cost_inf(&q, &m).unwrap();
        assert!(super::super::plan_cost_inf(&r, &m).unwrap() <= before);
        assert!(r.len() <= 8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reduction_invariants(d in 2usize..4, n in 1usize..50, seed in 0u64..1000, p in 1.0f64..3.0) {
            check(d, n, seed, p);
        }
    }
}
