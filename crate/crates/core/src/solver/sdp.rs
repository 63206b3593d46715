// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Primal-dual interior-point method for real block-diagonal SDPs.
//!
//! Primal: `min <C, X>  s.t.  <A_k, X> = b_k, X ⪰ 0`.
//! Dual:   `max b^T y   s.t.  C - Σ y_k A_k = S ⪰ 0`.
//!
//! Infeasible-start path following with Nesterov-Todd scaling and a Mehrotra
//! predictor-corrector. The Schur complement is assembled from sparse
//! constraint entries and factored by Cholesky.

use super::{debug, relative_gap, SolveReport, SolveStatus};
use crate::config::tolerances;
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde_json::json;

/// Sparse symmetric entry `(block, row, col, value)` with `row <= col`.
/// Off-diagonal entries stand for both `(row, col)` and `(col, row)`.
pub type SdpTerm = (usize, usize, usize, f64);

#[derive(Clone, Copy, Debug)]
pub struct SdpBlock {
    pub size: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SdpConstraint {
    pub terms: Vec<SdpTerm>,
    pub rhs: f64,
}

impl SdpConstraint {
    pub fn new(rhs: f64) -> Self {
        SdpConstraint { terms: Vec::new(), rhs }
    }

    pub fn add(&mut self, block: usize, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.terms.push((block, i, j, v));
    }
}

#[derive(Clone, Debug, Default)]
pub struct SemidefiniteProgram {
    pub blocks: Vec<SdpBlock>,
    pub objective: Vec<SdpTerm>,
    pub constraints: Vec<SdpConstraint>,
}

impl SemidefiniteProgram {
    pub fn add_block(&mut self, size: usize) -> usize {
        self.blocks.push(SdpBlock { size });
        self.blocks.len() - 1
    }

    pub fn add_objective(&mut self, block: usize, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.objective.push((block, i, j, v));
    }

    pub fn add_constraint(&mut self, c: SdpConstraint) -> usize {
        self.constraints.push(c);
        self.constraints.len() - 1
    }

    pub fn total_size(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub report: SolveReport,
    pub x: Vec<DMatrix<f64>>,
    pub s: Vec<DMatrix<f64>>,
}

type Blocks = Vec<DMatrix<f64>>;

/// Constraint entries regrouped by block: `(constraint, i, j, v)`.
struct ByBlock {
    terms: Vec<Vec<(usize, usize, usize, f64)>>,
    /// Per block, constraints with entries there and the index range into `terms`.
    ranges: Vec<Vec<(usize, std::ops::Range<usize>)>>,
}

fn group(p: &SemidefiniteProgram) -> ByBlock {
    let nb = p.blocks.len();
    let mut terms: Vec<Vec<(usize, usize, usize, f64)>> = vec![Vec::new(); nb];
    for (k, c) in p.constraints.iter().enumerate() {
        for &(b, i, j, v) in &c.terms {
            terms[b].push((k, i, j, v));
        }
    }
    let mut ranges = vec![Vec::new(); nb];
    for b in 0..nb {
        terms[b].sort_by_key(|t| t.0);
        let t = &terms[b];
        let mut s = 0;
        while s < t.len() {
            let mut e = s;
            while e < t.len() && t[e].0 == t[s].0 {
                e += 1;
            }
            ranges[b].push((t[s].0, s..e));
            s = e;
        }
    }
    ByBlock { terms, ranges }
}

fn dense_from_terms(sizes: &[usize], terms: &[SdpTerm], scale: f64) -> Blocks {
    let mut out: Blocks = sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    for &(b, i, j, v) in terms {
        out[b][(i, j)] += scale * v;
        if i != j {
            out[b][(j, i)] += scale * v;
        }
    }
    out
}

fn inner(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn fro(a: &Blocks) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn apply_a(g: &ByBlock, m: usize, x: &Blocks) -> DVector<f64> {
    let mut out = DVector::zeros(m);
    for (b, ts) in g.terms.iter().enumerate() {
        for &(k, i, j, v) in ts {
            out[k] += if i == j { v * x[b][(i, j)] } else { 2.0 * v * x[b][(i, j)] };
        }
    }
    out
}

fn apply_at(g: &ByBlock, sizes: &[usize], y: &DVector<f64>) -> Blocks {
    let mut out: Blocks = sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    for (b, ts) in g.terms.iter().enumerate() {
        for &(k, i, j, v) in ts {
            out[b][(i, j)] += y[k] * v;
            if i != j {
                out[b][(j, i)] += y[k] * v;
            }
        }
    }
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// NT scaling data for one block.
struct Scaling {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    w: DMatrix<f64>,
    lambda: DVector<f64>,
    lx: DMatrix<f64>,
    ls: DMatrix<f64>,
}

fn scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let lx = Cholesky::new(x.clone())?.unpack();
    let ls = Cholesky::new(s.clone())?.unpack();
    let prod = ls.transpose() * &lx;
    let svd = prod.svd(true, true);
    let u = svd.u?;
    let vt = svd.v_t?;
    let sig = svd.singular_values;
    if sig.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let mut g = &lx * vt.transpose();
    let mut ginv = u.transpose() * ls.transpose();
    for k in 0..sig.len() {
        let r = sig[k].sqrt();
        g.column_mut(k).unscale_mut(r);
        ginv.row_mut(k).unscale_mut(r);
    }
    let w = &g * g.transpose();
    Some(Scaling { g, ginv, w, lambda: sig, lx, ls })
}

/// Largest `α <= 1 / frac` style step: max α with `L L^T + α D ⪰ 0`.
fn max_step(l: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let n = l.nrows();
    let mut t = d.clone();
    for col in 0..n {
        let mut c = t.column(col).into_owned();
        l.solve_lower_triangular_mut(&mut c);
        t.set_column(col, &c);
    }
    let mut t = t.transpose();
    for col in 0..n {
        let mut c = t.column(col).into_owned();
        l.solve_lower_triangular_mut(&mut c);
        t.set_column(col, &c);
    }
    symmetrize(&mut t);
    let lmin = SymmetricEigen::new(t).eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

struct Direction {
    dx: Blocks,
    dy: DVector<f64>,
    ds: Blocks,
}

/// Schur complement `M_kl = <A_k, W A_l W>`.
fn schur(g: &ByBlock, sc: &[Scaling], m: usize) -> DMatrix<f64> {
    let mut mat = DMatrix::zeros(m, m);
    for (b, ranges) in g.ranges.iter().enumerate() {
        let w = &sc[b].w;
        let n = w.nrows();
        let ts = &g.terms[b];
        for (li, (l, lr)) in ranges.iter().enumerate() {
            let mut p = DMatrix::<f64>::zeros(n, n);
            for &(_, i, j, v) in &ts[lr.clone()] {
                // v * (w_i w_j^T + w_j w_i^T) for off-diagonal, v * w_i w_i^T on diagonal.
                let wi = w.column(i);
                let wj = w.column(j);
                if i == j {
                    p.ger(v, &wi, &wi, 1.0);
                } else {
                    p.ger(v, &wi, &wj, 1.0);
                    p.ger(v, &wj, &wi, 1.0);
                }
            }
            for (k, kr) in ranges[..=li].iter() {
                let mut acc = 0.0;
                for &(_, i, j, v) in &ts[kr.clone()] {
                    acc += if i == j { v * p[(i, j)] } else { 2.0 * v * p[(i, j)] };
                }
                mat[(*k, *l)] += acc;
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            let v = mat[(j, i)] + mat[(i, j)];
            mat[(j, i)] = v;
            mat[(i, j)] = v;
        }
    }
    mat
}

fn factor(mut m: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let scale = (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..12 {
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Some(ch);
        }
        let next = if reg == 0.0 { 1e-14 * scale } else { reg * 10.0 };
        for i in 0..m.nrows() {
            m[(i, i)] += next - reg;
        }
        reg = next;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn direction(
    g: &ByBlock,
    sizes: &[usize],
    sc: &[Scaling],
    chol: &Cholesky<f64, nalgebra::Dyn>,
    rp: &DVector<f64>,
    rd: &Blocks,
    rhs_c: &Blocks,
    m: usize,
) -> Direction {
    // R = G H G^T with H_ij = 2 Rc_ij / (λ_i + λ_j).
    let r: Blocks = sc
        .iter()
        .zip(rhs_c)
        .map(|(s, rc)| {
            let n = rc.nrows();
            let h = DMatrix::from_fn(n, n, |i, j| 2.0 * rc[(i, j)] / (s.lambda[i] + s.lambda[j]));
            &s.g * h * s.g.transpose()
        })
        .collect();
    let wrdw: Blocks = sc.iter().zip(rd).map(|(s, d)| &s.w * d * &s.w).collect();
    let rhs = rp - apply_a(g, m, &r) + apply_a(g, m, &wrdw);
    let dy = chol.solve(&rhs);
    let aty = apply_at(g, sizes, &dy);
    let ds: Blocks = rd.iter().zip(&aty).map(|(d, a)| d - a).collect();
    let dx: Blocks = sc
        .iter()
        .zip(&r)
        .zip(&ds)
        .map(|((s, r), d)| {
            let mut x = r - &s.w * d * &s.w;
            symmetrize(&mut x);
            x
        })
        .collect();
    Direction { dx, dy, ds }
}

/// Solve `p` from an infeasible interior start.
pub fn solve_sdp(p: &SemidefiniteProgram) -> SdpSolution {
    let tol = tolerances();
    let sizes: Vec<usize> = p.blocks.iter().map(|b| b.size).collect();
    let m = p.constraints.len();
    let ntot: usize = sizes.iter().sum();
    let g = group(p);
    let c = dense_from_terms(&sizes, &p.objective, 1.0);
    let b = DVector::from_iterator(m, p.constraints.iter().map(|k| k.rhs));
    let bnorm = b.norm();
    let cnorm = fro(&c);

    // Per-block constraint norms for the starting point.
    let mut anorm = vec![vec![0.0f64; m]; sizes.len()];
    for (bi, ts) in g.terms.iter().enumerate() {
        for &(k, i, j, v) in ts {
            anorm[bi][k] += if i == j { v * v } else { 2.0 * v * v };
        }
    }
    let mut x: Blocks = Vec::new();
    let mut s: Blocks = Vec::new();
    for (bi, &n) in sizes.iter().enumerate() {
        let nf = n as f64;
        let mut xi: f64 = 10f64.max(nf.sqrt());
        let mut amax: f64 = 0.0;
        for k in 0..m {
            let a = anorm[bi][k].sqrt();
            if a > 0.0 {
                xi = xi.max(nf * (1.0 + b[k].abs()) / (1.0 + a));
                amax = amax.max(a);
            }
        }
        let eta = 10f64.max(nf.sqrt()).max(c[bi].norm()).max(amax);
        x.push(DMatrix::identity(n, n) * xi);
        s.push(DMatrix::identity(n, n) * eta);
    }
    let mut y = DVector::zeros(m);

    let mut status = SolveStatus::MaxIterations;
    let mut iters = 0;
    let (mut pobj, mut dobj, mut pinf, mut dinf, mut gap);
    let mut stall = 0;
    loop {
        let rp = &b - apply_a(&g, m, &x);
        let aty = apply_at(&g, &sizes, &y);
        let rd: Blocks = c.iter().zip(&aty).zip(&s).map(|((c, a), s)| c - a - s).collect();
        pobj = inner(&c, &x);
        dobj = b.dot(&y);
        pinf = rp.norm() / (1.0 + bnorm);
        dinf = fro(&rd) / (1.0 + cnorm);
        gap = relative_gap(pobj, dobj);
        let mu = inner(&x, &s) / ntot.max(1) as f64;
        if debug::enabled() {
            debug::emit(&json!({
                "solver": "sdp", "iteration": iters, "primal": pobj, "dual": dobj,
                "gap": gap, "primal_infeasibility": pinf, "dual_infeasibility": dinf, "mu": mu,
            }));
        }
        if gap <= tol.sdp_gap && pinf <= tol.sdp_feasibility && dinf <= tol.sdp_feasibility {
            status = SolveStatus::Optimal;
            break;
        }
        if iters >= tol.sdp_max_iterations {
            break;
        }
        let sc: Option<Vec<Scaling>> = x.iter().zip(&s).map(|(x, s)| scaling(x, s)).collect();
        let Some(sc) = sc else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let Some(chol) = factor(schur(&g, &sc, m)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };

        // Predictor: Rc = -Λ².
        let rc_aff: Blocks = sc
            .iter()
            .map(|s| DMatrix::from_diagonal(&s.lambda.map(|l| -l * l)))
            .collect();
        let aff = direction(&g, &sizes, &sc, &chol, &rp, &rd, &rc_aff, m);
        let ap = sc.iter().zip(&aff.dx).map(|(s, d)| max_step(&s.lx, d)).fold(1f64, f64::min);
        let ad = sc.iter().zip(&aff.ds).map(|(s, d)| max_step(&s.ls, d)).fold(1f64, f64::min);
        let xa: Blocks = x.iter().zip(&aff.dx).map(|(x, d)| x + d * ap).collect();
        let sa: Blocks = s.iter().zip(&aff.ds).map(|(s, d)| s + d * ad).collect();
        let mu_aff = inner(&xa, &sa) / ntot.max(1) as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector: Rc = σμI - Λ² - sym(ΔX~ ΔS~).
        let rc: Blocks = sc
            .iter()
            .zip(aff.dx.iter().zip(&aff.ds))
            .map(|(s, (dx, ds))| {
                let n = s.lambda.len();
                let xt = &s.ginv * dx * s.ginv.transpose();
                let st = s.g.transpose() * ds * &s.g;
                let prod = &xt * &st;
                DMatrix::from_fn(n, n, |i, j| {
                    let base = if i == j { sigma * mu - s.lambda[i] * s.lambda[i] } else { 0.0 };
                    base - 0.5 * (prod[(i, j)] + prod[(j, i)])
                })
            })
            .collect();
        let dir = direction(&g, &sizes, &sc, &chol, &rp, &rd, &rc, m);
        let ap = sc.iter().zip(&dir.dx).map(|(s, d)| max_step(&s.lx, d)).fold(f64::INFINITY, f64::min);
        let ad = sc.iter().zip(&dir.ds).map(|(s, d)| max_step(&s.ls, d)).fold(f64::INFINITY, f64::min);
        let ap = (0.98 * ap).min(1.0);
        let ad = (0.98 * ad).min(1.0);
        for (xb, d) in x.iter_mut().zip(&dir.dx) {
            *xb += d * ap;
            symmetrize(xb);
        }
        for (sb, d) in s.iter_mut().zip(&dir.ds) {
            *sb += d * ad;
            symmetrize(sb);
        }
        y += &dir.dy * ad;
        iters += 1;
        if ap.min(ad) < 1e-8 {
            stall += 1;
            if stall >= 5 {
                status = SolveStatus::NumericalFailure;
                break;
            }
        } else {
            stall = 0;
        }
    }

    let flat: Vec<f64> = x.iter().flat_map(|b| b.iter().copied().collect::<Vec<_>>()).collect();
    SdpSolution {
        report: SolveReport {
            status,
            primal_objective: pobj,
            dual_objective: dobj,
            x: flat,
            y: y.iter().copied().collect(),
            relative_gap: gap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
            iterations: iters,
        },
        x,
        s,
    }
}
