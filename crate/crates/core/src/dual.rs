// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Dual side of `W_1`: the Lipschitz constant of an observable with respect
//! to a pure-state metric, and certified lower bounds on the double-dual norm.
//!
//! [`lipschitz_estimate`] probes `L_d(O)` from below by multi-start ascent
//! over pure pairs. It treats the metric as a black box, so plugin metrics
//! work too. [`dw1_lower_estimate`] only uses certified bounds on `L_d(O)`
//! supplied by the metric, so its value is a valid lower bound on `W_1`.

use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::metrics::MetricSpec;
use crate::norms::TracelessHermitian;
use crate::rng::child_rng;
use crate::states::linalg::{c, CMat, CVec};
use crate::states::random::haar_pure;
use crate::states::{eig_hermitian, DensityOperator, PureState};
use serde::{Deserialize, Serialize};

/// Ascent configuration for [`lipschitz_estimate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualBudget {
    pub restarts: usize,
    pub iterations: usize,
    /// Central-difference step on the real coordinates.
    pub fd_step: f64,
    pub seed: u64,
    pub exec: ExecMode,
}

impl Default for DualBudget {
    fn default() -> Self {
        DualBudget { restarts: 64, iterations: 100, fd_step: 1e-5, seed: 0, exec: ExecMode::default() }
    }
}

impl DualBudget {
    /// Caps restarts and iterations for metrics whose evaluation solves an SDP.
    pub fn for_metric(&self, metric: &MetricSpec) -> DualBudget {
        let mut b = self.clone();
        if metric.expensive {
            b.restarts = b.restarts.min(4);
            b.iterations = b.iterations.min(10);
        }
        b
    }
}

/// Best ratio `Tr[O(ψψ† - φφ†)] / d(ψ, φ)` found, with its witness pair.
#[derive(Clone, Debug)]
pub struct LipschitzEstimate {
    /// Never exceeds the true `L_d(O)`.
    pub value: f64,
    pub psi: PureState,
    pub phi: PureState,
    /// Certified upper bound on `L_d(O)` from the metric, if any.
    pub bound: Option<f64>,
    /// The bound is the exact dual constant.
    pub certified: bool,
    pub restart: usize,
}

fn expectation(o: &CMat, v: &CVec) -> f64 {
    (v.adjoint() * o * v)[(0, 0)].re
}

fn unit(x: &[f64]) -> CVec {
    let d = x.len() / 2;
    let v = CVec::from_fn(d, |i, _| c(x[2 * i], x[2 * i + 1]));
    let n = v.norm();
    v.unscale(n)
}

fn coords(v: &CVec) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

struct Ratio<'a> {
    o: &'a CMat,
    metric: &'a MetricSpec,
    dims: &'a [usize],
}

impl Ratio<'_> {
    /// Ratio at the point `x = (ψ coords, φ coords)`; zero on the diagonal.
    fn eval(&self, x: &[f64]) -> f64 {
        let (a, b) = x.split_at(x.len() / 2);
        let (va, vb) = (unit(a), unit(b));
        let gap = expectation(self.o, &va) - expectation(self.o, &vb);
        let psi = PureState::from_trusted(va, self.dims.to_vec());
        let phi = PureState::from_trusted(vb, self.dims.to_vec());
        let d = self.metric.distance(&psi, &phi);
        if d > 1e-12 {
            gap / d
        } else {
            0.0
        }
    }

    fn gradient(&self, x: &[f64], h: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        (0..x.len())
            .map(|i| {
                y[i] = x[i] + h;
                let fp = self.eval(&y);
                y[i] = x[i] - h;
                let fm = self.eval(&y);
                y[i] = x[i];
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    /// Normalized-gradient ascent with step halving on rejection.
    fn ascend(&self, mut x: Vec<f64>, budget: &DualBudget) -> (Vec<f64>, f64) {
        let mut f = self.eval(&x);
        let mut step = 0.5;
        for _ in 0..budget.iterations {
            let g = self.gradient(&x, budget.fd_step);
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn < 1e-14 {
                break;
            }
            loop {
                let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + step * gi / gn).collect();
                let fy = self.eval(&y);
                if fy > f {
                    x = renormalize(y);
                    f = fy;
                    step = (step * 1.5).min(1.0);
                    break;
                }
                step *= 0.5;
                if step < 1e-9 {
                    return (x, f);
                }
            }
        }
        (x, f)
    }
}

fn renormalize(mut x: Vec<f64>) -> Vec<f64> {
    let half = x.len() / 2;
    for part in [0..half, half..x.len()] {
        let n = x[part.clone()].iter().map(|v| v * v).sum::<f64>().sqrt();
        x[part].iter_mut().for_each(|v| *v /= n);
    }
    x
}

/// Lower estimate of `L_d(O) = sup Tr[O(ψψ† - φφ†)] / d(ψ, φ)` over pure pairs.
///
/// Restart 0 starts from the extreme eigenvectors of `O`, the rest from
/// Haar-random pairs.
pub fn lipschitz_estimate(o: &TracelessHermitian, metric: &MetricSpec, budget: &DualBudget) -> Result<LipschitzEstimate> {
    let dims = o.dims();
    metric.check_dims(dims)?;
    let budget = budget.for_metric(metric);
    let spec = eig_hermitian(o.matrix())?;
    let ratio = Ratio { o: o.matrix(), metric, dims };
    let n = spec.values.len();
    let starts = budget.restarts.max(1);
    let runs = budget.exec.try_map(starts, |i| -> Result<(Vec<f64>, f64)> {
        let x = if i == 0 {
            let (top, bottom) = extreme_vectors(&spec.vectors, &spec.values, n);
            [coords(&top), coords(&bottom)].concat()
        } else {
            let mut r = child_rng(budget.seed, i as u64);
            let a = haar_pure(dims, &mut r)?;
            let b = haar_pure(dims, &mut r)?;
            [coords(a.amplitudes()), coords(b.amplitudes())].concat()
        };
        Ok(ratio.ascend(x, &budget))
    })?;
    let (restart, (x, value)) = runs
        .into_iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(b.0.cmp(&a.0)))
        .expect("at least one restart");
    let (a, b) = x.split_at(x.len() / 2);
    let (bound, certified) = match metric.exact_lower_norm() {
        Some(cert) => {
            let (u, exact) = cert.lipschitz_bound(o.matrix(), dims)?;
            (Some(u), exact)
        }
        None => (None, false),
    };
    Ok(LipschitzEstimate {
        value: value.max(0.0),
        psi: PureState::from_trusted(unit(a), dims.to_vec()),
        phi: PureState::from_trusted(unit(b), dims.to_vec()),
        bound,
        certified,
        restart,
    })
}

fn extreme_vectors(vectors: &CMat, values: &[f64], n: usize) -> (CVec, CVec) {
    let imax = (0..n).max_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    let imin = (0..n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    (vectors.column(imax).into_owned(), vectors.column(imin).into_owned())
}

/// Certified lower bound on the double-dual norm of `ρ - σ`.
#[derive(Clone, Debug)]
pub struct Dw1Estimate {
    pub value: f64,
    /// Observable attaining `value`.
    pub probe: CMat,
    /// `Tr[O(ρ - σ)]` for the probe.
    pub pairing: f64,
    /// Certified upper bound on `L_d(probe)`.
    pub bound: f64,
}

/// `max_O Tr[O(ρ - σ)] / U(O)` over the probes supplied by the metric, where
/// `U(O) ≥ L_d(O)` is certified. Fails for metrics without a certified dual.
pub fn dw1_lower_estimate(rho: &DensityOperator, sigma: &DensityOperator, metric: &MetricSpec) -> Result<Dw1Estimate> {
    let x = TracelessHermitian::difference(rho, sigma)?;
    metric.check_dims(x.dims())?;
    let cert = metric.exact_lower_norm().ok_or_else(|| {
        Error::validation("certified_dual", format!("metric {} has no certified dual; estimates are heuristic", metric.name))
    })?;
    let (probe, u0) = cert.dual_probe(&x)?;
    let (u1, _) = cert.lipschitz_bound(&probe, x.dims())?;
    let bound = u0.min(u1);
    let pairing = crate::states::linalg::trace_product(&probe, x.matrix()).re;
    let value = if bound > 0.0 { (pairing / bound).max(0.0) } else { 0.0 };
    Ok(Dw1Estimate { value, probe, pairing, bound })
}
