// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Local search over pure-state decompositions of the two marginals.
//!
//! Every decomposition of `ρ` into `m` vectors is `G = B V` with
//! `B = E Λ^{1/2}` on the support and `V` an `r x m` matrix with orthonormal
//! rows. For fixed `(V, W)` the best plan is a classical transport problem on
//! the induced weights; its value `L(V, W)` is differentiated through the LP
//! duals and the metric gradient, then minimized with Adam steps followed by
//! a polar retraction onto `V V† = I`. Metrics without a gradient fall back
//! to random perturbations with greedy acceptance.

use super::{Order, PlanEntry, TransportPlan};
use crate::classical_ot::{transport_simplex, winf_discrete};
use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::metrics::MetricSpec;
use crate::rng::{child_rng, Rng};
use crate::states::linalg::{c, CMat, CVec};
use crate::states::random::{gaussian_mat, haar_coisometry};
use crate::states::{DensityOperator, PureState};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Surrogate order used to steer the bottleneck search.
const BOTTLENECK_SURROGATE: f64 = 8.0;
const REG_START: f64 = 1e-1;
const REG_DECAY: f64 = 1e-3;
const EPS_START: f64 = 1e-3;
const EPS_DECAY: f64 = 1e-6;
const SINKHORN_SWEEPS: usize = 100;

/// Weighted pure states summing to a density operator.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Self {
        assert_eq!(weights.len(), states.len());
        Decomposition { weights, states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn normalized_weights(&self) -> Vec<f64> {
        let s: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / s).collect()
    }

    /// Unnormalized vectors `√w_k ψ_k` as columns.
    pub fn vectors(&self) -> CMat {
        let cols: Vec<CVec> =
            self.weights.iter().zip(&self.states).map(|(w, s)| s.amplitudes() * c(w.max(0.0).sqrt(), 0.0)).collect();
        CMat::from_columns(&cols)
    }
}

/// Search configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBudget {
    /// Independent restarts; restart 0 starts from the best spectral seed.
    pub restarts: usize,
    /// Iterations per restart.
    pub iterations: usize,
    /// Vectors per decomposition; defaults to `2 D` (`rank + 1` for
    /// expensive metrics).
    pub plan_size: Option<usize>,
    /// Step size, decayed geometrically from `step_start` to `step_end`.
    pub step_start: f64,
    pub step_end: f64,
    pub seed: u64,
    pub exec: ExecMode,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 8,
            iterations: 300,
            plan_size: None,
            step_start: 0.03,
            step_end: 1e-4,
            seed: 0,
            exec: ExecMode::default(),
        }
    }
}

impl SearchBudget {
    /// Budget scaled down for metrics whose evaluations are SDPs.
    pub fn for_metric(&self, metric: &MetricSpec) -> SearchBudget {
        let mut b = self.clone();
        if metric.expensive {
            b.restarts = b.restarts.min(4);
            b.iterations = b.iterations.min(25);
        }
        b
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::validation("restarts_positive", "restarts = 0"));
        }
        if !(self.step_start > 0.0 && self.step_end > 0.0) {
            return Err(Error::validation("step_positive", format!("{} -> {}", self.step_start, self.step_end)));
        }
        Ok(())
    }

    fn step(&self, t: usize) -> f64 {
        if self.iterations <= 1 {
            return self.step_start;
        }
        let f = t as f64 / (self.iterations - 1) as f64;
        self.step_start * (self.step_end / self.step_start).powf(f)
    }
}

/// `B = E Λ^{1/2}` on the numerical support.
struct Factor {
    b: CMat,
    dims: Vec<usize>,
}

impl Factor {
    fn new(rho: &DensityOperator) -> Result<Self> {
        let spec = rho.spectrum()?;
        let cutoff = tolerances().rank_cutoff;
        let cols: Vec<CVec> = (0..spec.dim())
            .filter(|&k| spec.values[k] > cutoff)
            .map(|k| spec.vector(k) * c(spec.values[k].sqrt(), 0.0))
            .collect();
        Ok(Factor { b: CMat::from_columns(&cols), dims: rho.dims().to_vec() })
    }

    fn rank(&self) -> usize {
        self.b.ncols()
    }

    /// `V = Λ^{-1/2} E† G`, padded with zero columns to width `m`.
    fn coordinates(&self, d: &Decomposition, m: usize) -> CMat {
        let g = d.vectors();
        let mut pinv = self.b.adjoint();
        for k in 0..self.rank() {
            let n2 = self.b.column(k).norm_squared();
            pinv.row_mut(k).scale_mut(1.0 / n2);
        }
        let v = pinv * g;
        let mut out = CMat::zeros(self.rank(), m.max(v.ncols()));
        out.view_mut((0, 0), (v.nrows(), v.ncols())).copy_from(&v);
        out
    }

    fn split(&self, v: &CMat) -> (Vec<f64>, Vec<PureState>, Vec<f64>) {
        let g = &self.b * v;
        let mut w = Vec::with_capacity(g.ncols());
        let mut states = Vec::with_capacity(g.ncols());
        let mut norms = Vec::with_capacity(g.ncols());
        for k in 0..g.ncols() {
            let col = g.column(k).into_owned();
            let n = col.norm();
            w.push(n * n);
            norms.push(n);
            let s = if n > 1e-150 {
                PureState::normalized(col, self.dims.clone())
            } else {
                PureState::basis(self.dims.clone(), 0)
            };
            states.push(s.expect("nonzero column"));
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        (w, states, norms)
    }
}

/// Polar factor `(V V†)^{-1/2} V`, computed from the SVD.
fn retract(v: &CMat) -> CMat {
    let svd = v.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) if svd.singular_values.min() > 1e-12 => u * vt,
        _ => v.clone(),
    }
}

/// Entropic and metric smoothing used to steer the gradient steps.
#[derive(Clone, Copy, Debug)]
struct Smoothing {
    /// Entropic regularization.
    reg: f64,
    /// `d ↦ √(d² + ε) - √ε`.
    eps: f64,
}

/// Dual potentials of the entropic problem, warm-started across steps.
#[derive(Clone, Default)]
struct Potentials {
    f: Vec<f64>,
    g: Vec<f64>,
}

struct Evaluation {
    /// `T_p^{1/p}` of the exact coupling, or its bottleneck.
    value: f64,
    psi: Vec<PureState>,
    phi: Vec<PureState>,
    na: Vec<f64>,
    nb: Vec<f64>,
    dist: DMatrix<f64>,
    coupling: Vec<(usize, usize, f64)>,
}

/// Smoothed objective with the ingredients of its gradient.
struct Smoothed {
    #[cfg_attr(not(test), allow(dead_code))]
    objective: f64,
    plan: DMatrix<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

fn logsumexp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Log-domain Sinkhorn for `min <P, C> + reg Σ P (ln P - 1)`.
fn sinkhorn(a: &[f64], b: &[f64], cost: &DMatrix<f64>, reg: f64, pot: &mut Potentials, sweeps: usize) -> Smoothed {
    let (n, m) = cost.shape();
    let la: Vec<f64> = a.iter().map(|x| x.max(1e-300).ln()).collect();
    let lb: Vec<f64> = b.iter().map(|x| x.max(1e-300).ln()).collect();
    if pot.f.len() != n || pot.g.len() != m || pot.f.iter().chain(&pot.g).any(|x| !x.is_finite()) {
        pot.f = vec![0.0; n];
        pot.g = vec![0.0; m];
    }
    let (f, g) = (&mut pot.f, &mut pot.g);
    for _ in 0..sweeps {
        for j in 0..m {
            g[j] = reg * (lb[j] - logsumexp((0..n).map(|i| (f[i] - cost[(i, j)]) / reg)));
        }
        for i in 0..n {
            f[i] = reg * (la[i] - logsumexp((0..m).map(|j| (g[j] - cost[(i, j)]) / reg)));
        }
        let err: f64 = (0..m)
            .map(|j| ((0..n).map(|i| ((f[i] + g[j] - cost[(i, j)]) / reg).exp()).sum::<f64>() - b[j]).abs())
            .sum();
        if err < 1e-11 {
            break;
        }
    }
    let plan = DMatrix::from_fn(n, m, |i, j| ((f[i] + g[j] - cost[(i, j)]) / reg).exp());
    let objective = a.iter().zip(f.iter()).map(|(x, y)| x * y).sum::<f64>()
        + b.iter().zip(g.iter()).map(|(x, y)| x * y).sum::<f64>()
        - reg * plan.sum();
    Smoothed { objective, plan, f: f.clone(), g: g.clone() }
}

struct Problem<'a> {
    a: Factor,
    b: Factor,
    metric: &'a MetricSpec,
    order: Order,
    m: usize,
}

impl Problem<'_> {
    fn p(&self) -> f64 {
        match self.order {
            Order::Finite(p) => p,
            Order::Infinity => BOTTLENECK_SURROGATE,
        }
    }

    fn evaluate(&self, va: &CMat, vb: &CMat) -> Result<Evaluation> {
        let (wa, psi, na) = self.a.split(va);
        let (wb, phi, nb) = self.b.split(vb);
        let dist = DMatrix::from_fn(psi.len(), phi.len(), |i, j| {
            if wa[i] > 0.0 && wb[j] > 0.0 {
                self.metric.distance(&psi[i], &phi[j])
            } else {
                0.0
            }
        });
        let (value, coupling) = match self.order {
            Order::Finite(p) => {
                let sol = transport_simplex(&wa, &wb, &dist.map(|d| d.powf(p)));
                (sol.cost.max(0.0).powf(1.0 / p), sol.basis)
            }
            Order::Infinity => {
                let r = winf_discrete(&wa, &wb, &dist)?;
                let g = r.coupling;
                let cells = (0..g.nrows()).flat_map(|k| (0..g.ncols()).map(move |l| (k, l))).collect::<Vec<_>>();
                (r.value, cells.into_iter().map(|(k, l)| (k, l, g[(k, l)])).collect())
            }
        };
        Ok(Evaluation { value, psi, phi, na, nb, dist, coupling })
    }

    fn smoothed_cost(&self, e: &Evaluation, sm: Smoothing) -> DMatrix<f64> {
        let p = self.p();
        let r = sm.eps.sqrt();
        e.dist.map(|d| ((d * d + sm.eps).sqrt() - r).powf(p))
    }

    fn smooth(&self, e: &Evaluation, sm: Smoothing, pot: &mut Potentials, sweeps: usize) -> Smoothed {
        let cost = self.smoothed_cost(e, sm);
        let wa: Vec<f64> = e.na.iter().map(|x| x * x).collect();
        let wb: Vec<f64> = e.nb.iter().map(|x| x * x).collect();
        sinkhorn(&wa, &wb, &cost, sm.reg, pot, sweeps)
    }

    /// Wirtinger gradients `(∂L/∂V̄, ∂L/∂W̄)` of the smoothed objective.
    fn gradient(&self, e: &Evaluation, s: &Smoothed, sm: Smoothing) -> (CMat, CMat) {
        let d = self.a.b.nrows();
        let p = self.p();
        let r = sm.eps.sqrt();
        let mut ga = CMat::zeros(d, e.psi.len());
        let mut gb = CMat::zeros(d, e.phi.len());
        // Weight terms: ∂w_k/∂ḡ_k = g_k.
        for k in 0..e.psi.len() {
            let g = e.psi[k].amplitudes() * c(e.na[k], 0.0);
            ga.column_mut(k).axpy(c(s.f[k], 0.0), &g, c(1.0, 0.0));
        }
        for l in 0..e.phi.len() {
            let g = e.phi[l].amplitudes() * c(e.nb[l], 0.0);
            gb.column_mut(l).axpy(c(s.g[l], 0.0), &g, c(1.0, 0.0));
        }
        // Cost terms through ψ = g / |g|.
        let floor = 1e-12 * s.plan.amax();
        for k in 0..e.psi.len() {
            for l in 0..e.phi.len() {
                let flow = s.plan[(k, l)];
                if flow <= floor || e.na[k] <= 1e-150 || e.nb[l] <= 1e-150 {
                    continue;
                }
                let dkl = e.dist[(k, l)];
                let root = (dkl * dkl + sm.eps).sqrt();
                let sd = root - r;
                let dc = p * if p == 1.0 { 1.0 } else { sd.powf(p - 1.0) } * dkl / root;
                let scale = flow * dc;
                if scale == 0.0 {
                    continue;
                }
                let Some((da, db)) = self.metric.gradient(&e.psi[k], &e.phi[l]) else { continue };
                let pa = tangent(e.psi[k].amplitudes(), &da) / c(e.na[k], 0.0);
                let pb = tangent(e.phi[l].amplitudes(), &db) / c(e.nb[l], 0.0);
                ga.column_mut(k).axpy(c(scale, 0.0), &pa, c(1.0, 0.0));
                gb.column_mut(l).axpy(c(scale, 0.0), &pb, c(1.0, 0.0));
            }
        }
        (self.a.b.adjoint() * ga, self.b.b.adjoint() * gb)
    }

    fn plan(&self, e: &Evaluation) -> Result<TransportPlan> {
        let entries = e
            .coupling
            .iter()
            .filter(|(_, _, q)| *q > 0.0)
            .map(|&(k, l, q)| PlanEntry { q, psi: e.psi[k].clone(), phi: e.phi[l].clone() })
            .collect();
        TransportPlan::from_weights(entries)
    }
}

/// `(I - ψψ†) x`.
fn tangent(psi: &CVec, x: &CVec) -> CVec {
    x - psi * psi.dotc(x)
}

struct Adam {
    m: CMat,
    v_re: DMatrix<f64>,
    v_im: DMatrix<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;

    fn new(r: usize, m: usize) -> Self {
        Adam { m: CMat::zeros(r, m), v_re: DMatrix::zeros(r, m), v_im: DMatrix::zeros(r, m), t: 0 }
    }

    fn step(&mut self, g: &CMat, lr: f64) -> CMat {
        self.t += 1;
        self.m = &self.m * c(Self::B1, 0.0) + g * c(1.0 - Self::B1, 0.0);
        self.v_re = &self.v_re * Self::B2 + g.map(|z| z.re * z.re) * (1.0 - Self::B2);
        self.v_im = &self.v_im * Self::B2 + g.map(|z| z.im * z.im) * (1.0 - Self::B2);
        let b1 = 1.0 - Self::B1.powi(self.t);
        let b2 = 1.0 - Self::B2.powi(self.t);
        CMat::from_fn(g.nrows(), g.ncols(), |i, j| {
            let mh = self.m[(i, j)] / b1;
            let re = mh.re / ((self.v_re[(i, j)] / b2).sqrt() + 1e-12);
            let im = mh.im / ((self.v_im[(i, j)] / b2).sqrt() + 1e-12);
            c(-lr * re, -lr * im)
        })
    }
}

/// Best plan found by the search, with its value (`T_p^{1/p}` or the bottleneck).
pub(crate) struct SearchOutcome {
    pub plan: TransportPlan,
    #[cfg_attr(not(test), allow(dead_code))]
    pub value: f64,
    pub restart: usize,
}

fn perturb(v: &CMat, scale: f64, rng: &mut Rng) -> CMat {
    let n = (v.nrows() * v.ncols()) as f64;
    retract(&(v + gaussian_mat(v.nrows(), v.ncols(), rng) * c(scale / n.sqrt(), 0.0)))
}

fn run_restart(pb: &Problem, start: (CMat, CMat), budget: &SearchBudget, rng: &mut Rng) -> Result<Evaluation> {
    let (mut va, mut vb) = start;
    let mut cur = pb.evaluate(&va, &vb)?;
    let mut best = pb.evaluate(&va, &vb)?;
    let use_grad = pb.metric.has_gradient();
    let mut adam_a = Adam::new(va.nrows(), va.ncols());
    let mut adam_b = Adam::new(vb.nrows(), vb.ncols());
    let mut pot = Potentials::default();
    let iters = budget.iterations.max(1) as f64;
    let reg_scale = pb.metric.diameter.value.max(1e-12).powf(pb.p());
    for t in 0..budget.iterations {
        let lr = budget.step(t);
        let frac = t as f64 / iters;
        let sm = Smoothing {
            reg: reg_scale * REG_START * REG_DECAY.powf(frac),
            eps: EPS_START * EPS_DECAY.powf(frac),
        };
        let (na, nb) = if use_grad {
            let s = pb.smooth(&cur, sm, &mut pot, SINKHORN_SWEEPS);
            let (ga, gb) = pb.gradient(&cur, &s, sm);
            (retract(&(&va + adam_a.step(&ga, lr))), retract(&(&vb + adam_b.step(&gb, lr))))
        } else {
            (perturb(&va, lr, rng), perturb(&vb, lr, rng))
        };
        let next = pb.evaluate(&na, &nb)?;
        if use_grad || next.value < cur.value {
            va = na;
            vb = nb;
            cur = next;
            if cur.value < best.value {
                best = pb.evaluate(&va, &vb)?;
            }
        }
    }
    Ok(best)
}

/// Multi-start decomposition search from the given seed decompositions.
pub(crate) fn search(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    order: Order,
    seeds: &[(Decomposition, Decomposition)],
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    budget.validate()?;
    let a = Factor::new(rho)?;
    let b = Factor::new(sigma)?;
    let r = a.rank().max(b.rank());
    let d = rho.dim();
    let default_m = if metric.expensive { r + 1 } else { 2 * d };
    let m = budget.plan_size.unwrap_or(default_m).max(r);
    let pb = Problem { a, b, metric, order, m };
    let results = budget.exec.try_map(budget.restarts, |i| {
        let mut rng = child_rng(budget.seed, i as u64);
        let start = match seeds.get(i) {
            Some((sa, sb)) => {
                let va = pb.a.coordinates(sa, pb.m);
                let vb = pb.b.coordinates(sb, pb.m);
                (perturb(&va, 1e-3, &mut rng), perturb(&vb, 1e-3, &mut rng))
            }
            None => (haar_coisometry(pb.a.rank(), pb.m, &mut rng), haar_coisometry(pb.b.rank(), pb.m, &mut rng)),
        };
        run_restart(&pb, start, budget, &mut rng)
    })?;
    let (restart, eval) = results
        .into_iter()
        .enumerate()
        .min_by(|x, y| x.1.value.total_cmp(&y.1.value).then(x.0.cmp(&y.0)))
        .expect("at least one restart");
    Ok(SearchOutcome { plan: pb.plan(&eval)?, value: eval.value, restart })
}
