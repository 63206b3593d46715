// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Two-phase revised simplex with an explicit basis inverse.
//!
//! Columns are read through [`ColumnSource`], so very wide problems can be
//! priced without materializing the constraint matrix.

use super::{relative_gap, SolveReport, SolveStatus};
use nalgebra::DMatrix;

/// `min c^T x  s.t.  A x = b`, each `x_j >= 0` unless `free[j]`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub free: Vec<bool>,
}

impl LinearProgram {
    pub fn new(c: Vec<f64>, a: DMatrix<f64>, b: Vec<f64>) -> Self {
        let n = c.len();
        LinearProgram { c, a, b, free: vec![false; n] }
    }
}

/// Nonnegative columns of an equality-form LP.
pub trait ColumnSource: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn cost(&self, j: usize) -> f64;
    /// Write column `j` into `out` (length `rows()`).
    fn column(&self, j: usize, out: &mut [f64]);
    /// `y^T a_j`.
    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        let mut col = vec![0.0; self.rows()];
        self.column(j, &mut col);
        col.iter().zip(y).map(|(a, b)| a * b).sum()
    }
}

/// Dense LP with free variables split into `x+ - x-`.
struct DenseColumns<'a> {
    lp: &'a LinearProgram,
    /// Column `j` maps to `(original index, sign)`.
    map: Vec<(usize, f64)>,
}

impl ColumnSource for DenseColumns<'_> {
    fn rows(&self) -> usize {
        self.lp.a.nrows()
    }
    fn cols(&self) -> usize {
        self.map.len()
    }
    fn cost(&self, j: usize) -> f64 {
        let (k, s) = self.map[j];
        s * self.lp.c[k]
    }
    fn column(&self, j: usize, out: &mut [f64]) {
        let (k, s) = self.map[j];
        for (i, o) in out.iter_mut().enumerate() {
            *o = s * self.lp.a[(i, k)];
        }
    }
    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        let (k, s) = self.map[j];
        s * self.lp.a.column(k).iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Solve a dense LP.
pub fn solve_lp(lp: &LinearProgram) -> SolveReport {
    assert_eq!(lp.a.ncols(), lp.c.len(), "A columns vs c");
    assert_eq!(lp.a.nrows(), lp.b.len(), "A rows vs b");
    let mut map = Vec::new();
    for k in 0..lp.c.len() {
        map.push((k, 1.0));
        if lp.free.get(k).copied().unwrap_or(false) {
            map.push((k, -1.0));
        }
    }
    let cols = DenseColumns { lp, map };
    let mut rep = solve_lp_columns(&cols, &lp.b);
    let mut x = vec![0.0; lp.c.len()];
    for (j, &(k, s)) in cols.map.iter().enumerate() {
        x[k] += s * rep.x[j];
    }
    rep.x = x;
    rep
}

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;

struct Simplex<'a, C: ColumnSource> {
    src: &'a C,
    m: usize,
    /// Row signs applied so that `b >= 0`.
    sign: Vec<f64>,
    b: Vec<f64>,
    /// Basic variable per row; index `>= n` is artificial `index - n`.
    basis: Vec<usize>,
    binv: DMatrix<f64>,
    xb: Vec<f64>,
    n: usize,
    since_refactor: usize,
    iterations: usize,
}

impl<'a, C: ColumnSource> Simplex<'a, C> {
    fn column(&self, j: usize) -> Vec<f64> {
        let mut col = vec![0.0; self.m];
        if j >= self.n {
            col[j - self.n] = 1.0;
        } else {
            self.src.column(j, &mut col);
            for (v, s) in col.iter_mut().zip(&self.sign) {
                *v *= s;
            }
        }
        col
    }

    fn cost(&self, j: usize, phase1: bool) -> f64 {
        match (phase1, j >= self.n) {
            (true, true) => 1.0,
            (true, false) => 0.0,
            (false, true) => 0.0,
            (false, false) => self.src.cost(j),
        }
    }

    fn duals(&self, phase1: bool) -> Vec<f64> {
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost(j, phase1)).collect();
        (0..self.m).map(|i| (0..self.m).map(|k| cb[k] * self.binv[(k, i)]).sum()).collect()
    }

    fn refactor(&mut self) -> bool {
        let mut bm = DMatrix::zeros(self.m, self.m);
        for (r, &j) in self.basis.iter().enumerate() {
            let col = self.column(j);
            for i in 0..self.m {
                bm[(i, r)] = col[i];
            }
        }
        match bm.try_inverse() {
            Some(inv) => {
                self.binv = inv;
                self.xb = (0..self.m)
                    .map(|i| (0..self.m).map(|k| self.binv[(i, k)] * self.b[k]).sum::<f64>())
                    .collect();
                for v in &mut self.xb {
                    if *v < 0.0 && *v > -1e-11 {
                        *v = 0.0;
                    }
                }
                self.since_refactor = 0;
                true
            }
            None => false,
        }
    }

    fn pivot(&mut self, row: usize, entering: usize, alpha: &[f64]) {
        let piv = alpha[row];
        let theta = self.xb[row] / piv;
        for i in 0..self.m {
            if i != row {
                self.xb[i] -= theta * alpha[i];
                if self.xb[i] < 0.0 && self.xb[i] > -1e-12 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[row] = theta;
        for k in 0..self.m {
            self.binv[(row, k)] /= piv;
        }
        for i in 0..self.m {
            if i != row && alpha[i] != 0.0 {
                let f = alpha[i];
                for k in 0..self.m {
                    let v = self.binv[(row, k)];
                    self.binv[(i, k)] -= f * v;
                }
            }
        }
        self.basis[row] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Run simplex iterations. Returns `Err(status)` on unbounded or stall.
    fn run(&mut self, phase1: bool, max_iter: usize) -> Result<(), SolveStatus> {
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= max_iter {
                return Err(SolveStatus::MaxIterations);
            }
            let y = self.duals(phase1);
            let ys: Vec<f64> = y.iter().zip(&self.sign).map(|(a, s)| a * s).collect();
            let bland = degenerate_run > 50;
            let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let tol = 1e-10 * scale;
            let mut entering = None;
            let mut best = -tol;
            let in_basis = {
                let mut v = vec![false; self.n];
                for &j in &self.basis {
                    if j < self.n {
                        v[j] = true;
                    }
                }
                v
            };
            for j in 0..self.n {
                if in_basis[j] {
                    continue;
                }
                let d = self.cost(j, phase1) - self.src.dot(j, &ys);
                if d < best {
                    best = d;
                    entering = Some(j);
                    if bland {
                        break;
                    }
                }
            }
            let Some(q) = entering else { return Ok(()) };
            let col = self.column(q);
            let alpha: Vec<f64> = (0..self.m)
                .map(|i| (0..self.m).map(|k| self.binv[(i, k)] * col[k]).sum())
                .collect();
            let mut row = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.m {
                if alpha[i] > PIVOT_TOL {
                    let r = self.xb[i].max(0.0) / alpha[i];
                    let better = match row {
                        None => true,
                        Some(k) => {
                            r < best_ratio - 1e-12
                                || (r <= best_ratio + 1e-12
                                    && if bland {
                                        self.basis[i] < self.basis[k]
                                    } else {
                                        alpha[i] > alpha[k]
                                    })
                        }
                    };
                    if better {
                        best_ratio = best_ratio.min(r);
                        row = Some(i);
                    }
                }
            }
            let Some(r) = row else { return Err(SolveStatus::Unbounded) };
            if best_ratio <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, &alpha);
        }
    }
}

/// Solve `min c^T x  s.t.  A x = b, x >= 0` over an implicit column set.
pub fn solve_lp_columns<C: ColumnSource>(src: &C, b: &[f64]) -> SolveReport {
    let m = src.rows();
    let n = src.cols();
    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let bs: Vec<f64> = b.iter().zip(&sign).map(|(v, s)| v * s).collect();
    let mut sx = Simplex {
        src,
        m,
        sign,
        b: bs.clone(),
        basis: (n..n + m).collect(),
        binv: DMatrix::identity(m, m),
        xb: bs,
        n,
        since_refactor: 0,
        iterations: 0,
    };
    let max_iter = 50 * (m + 10) + 10 * n.min(100_000);
    let fail = |status, iters| SolveReport {
        status,
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        x: vec![0.0; n],
        y: vec![0.0; m],
        relative_gap: f64::INFINITY,
        primal_infeasibility: f64::INFINITY,
        dual_infeasibility: f64::INFINITY,
        iterations: iters,
    };

    if let Err(s) = sx.run(true, max_iter) {
        return fail(s, sx.iterations);
    }
    let infeas: f64 = sx
        .basis
        .iter()
        .zip(&sx.xb)
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v)
        .sum();
    let bscale = 1.0 + b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if infeas > 1e-9 * bscale {
        return fail(SolveStatus::Infeasible, sx.iterations);
    }
    // Drive zero-level artificials out where a structural pivot exists.
    for r in 0..m {
        if sx.basis[r] < n {
            continue;
        }
        let binv_row: Vec<f64> = (0..m).map(|k| sx.binv[(r, k)]).collect();
        let in_basis: std::collections::HashSet<usize> = sx.basis.iter().copied().collect();
        let mut found = None;
        for j in 0..n {
            if in_basis.contains(&j) {
                continue;
            }
            let col = sx.column(j);
            let a: f64 = binv_row.iter().zip(&col).map(|(x, y)| x * y).sum();
            if a.abs() > 1e-7 {
                found = Some(j);
                break;
            }
        }
        if let Some(j) = found {
            let col = sx.column(j);
            let alpha: Vec<f64> =
                (0..m).map(|i| (0..m).map(|k| sx.binv[(i, k)] * col[k]).sum()).collect();
            sx.pivot(r, j, &alpha);
        }
    }
    if let Err(s) = sx.run(false, max_iter) {
        return fail(s, sx.iterations);
    }
    sx.refactor();

    let mut x = vec![0.0; n];
    for (r, &j) in sx.basis.iter().enumerate() {
        if j < n {
            x[j] = sx.xb[r].max(0.0);
        }
    }
    let yflip = sx.duals(false);
    let y: Vec<f64> = yflip.iter().zip(&sx.sign).map(|(a, s)| a * s).collect();
    let primal: f64 = (0..n).filter(|&j| x[j] != 0.0).map(|j| src.cost(j) * x[j]).sum();
    let dual: f64 = y.iter().zip(b).map(|(a, c)| a * c).sum();
    let mut resid = b.to_vec();
    let mut col = vec![0.0; m];
    for j in 0..n {
        if x[j] != 0.0 {
            src.column(j, &mut col);
            for i in 0..m {
                resid[i] -= col[i] * x[j];
            }
        }
    }
    let pinf = resid.iter().fold(0.0f64, |a, v| a.max(v.abs())) / bscale;
    let mut dinf: f64 = 0.0;
    for j in 0..n {
        dinf = dinf.max(-(src.cost(j) - src.dot(j, &y)));
    }
    SolveReport {
        status: SolveStatus::Optimal,
        primal_objective: primal,
        dual_objective: dual,
        x,
        y,
        relative_gap: relative_gap(primal, dual),
        primal_infeasibility: pinf,
        dual_infeasibility: dinf.max(0.0),
        iterations: sx.iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_equality() {
        let lp = LinearProgram::new(vec![1.0], DMatrix::from_row_slice(1, 1, &[1.0]), vec![1.0]);
        let r = solve_lp(&lp);
        assert!(r.is_optimal());
        assert_abs_diff_eq!(r.primal_objective, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.dual_objective, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn free_variable_and_negative_rhs() {
        // min x1 + 2 x2  s.t. x1 - x2 = -3, x2 free -> x1 = 0, x2 = 3.
        let mut lp = LinearProgram::new(
            vec![1.0, 2.0],
            DMatrix::from_row_slice(1, 2, &[1.0, -1.0]),
            vec![-3.0],
        );
        lp.free[1] = true;
        let r = solve_lp(&lp);
        assert!(r.is_optimal());
        assert_abs_diff_eq!(r.primal_objective, 6.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.x[1], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram::new(
            vec![1.0, 1.0],
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            vec![1.0, 2.0],
        );
        assert_eq!(solve_lp(&lp).status, SolveStatus::Infeasible);
        let lp = LinearProgram::new(
            vec![-1.0, 0.0],
            DMatrix::from_row_slice(1, 2, &[1.0, -1.0]),
            vec![1.0],
        );
        assert_eq!(solve_lp(&lp).status, SolveStatus::Unbounded);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // Transportation 2x2 has one redundant marginal row.
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[1., 1., 0., 0., 0., 0., 1., 1., 1., 0., 1., 0., 0., 1., 0., 1.],
        );
        let lp = LinearProgram::new(vec![0.0, 1.0, 1.0, 0.0], a, vec![0.3, 0.7, 0.5, 0.5]);
        let r = solve_lp(&lp);
        assert!(r.is_optimal());
        assert_abs_diff_eq!(r.primal_objective, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.dual_objective, 0.2, epsilon = 1e-12);
    }
}
