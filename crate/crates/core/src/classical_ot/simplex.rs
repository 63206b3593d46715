// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Transportation simplex (network simplex on the bipartite graph).

use nalgebra::DMatrix;

/// Optimal coupling with the dual potentials of the final basis.
#[derive(Clone, Debug)]
pub struct TransportSolution {
    pub cost: f64,
    /// Basic cells `(i, j, flow)`; flows may be zero on degenerate cells.
    pub basis: Vec<(usize, usize, f64)>,
    /// Row potentials; `u_i + v_j <= C_ij` with equality on the basis.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub pivots: usize,
}

impl TransportSolution {
    pub fn coupling(&self, n: usize, m: usize) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(n, m);
        for &(i, j, f) in &self.basis {
            g[(i, j)] += f;
        }
        g
    }
}

fn initial_basis(a: &[f64], b: &[f64], cost: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let (n, m) = (a.len(), b.len());
    let mut cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    cells.sort_by(|&(i, j), &(k, l)| cost[(i, j)].total_cmp(&cost[(k, l)]).then((i, j).cmp(&(k, l))));
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut row_live = vec![true; n];
    let mut col_live = vec![true; m];
    let (mut rows_left, mut cols_left) = (n, m);
    let mut basis = Vec::with_capacity(n + m - 1);
    for (i, j) in cells {
        if !row_live[i] || !col_live[j] {
            continue;
        }
        let x = ra[i].min(rb[j]).max(0.0);
        basis.push((i, j, x));
        ra[i] -= x;
        rb[j] -= x;
        if rows_left == 1 && cols_left == 1 {
            break;
        }
        let row_done = ra[i] <= rb[j];
        if (row_done && rows_left > 1) || cols_left == 1 {
            row_live[i] = false;
            rows_left -= 1;
        } else {
            col_live[j] = false;
            cols_left -= 1;
        }
    }
    basis
}

/// Parent links `(parent node, basis index)` of the basis tree rooted at
/// row 0, plus a visiting order in which parents precede children.
type Parents = Vec<Option<(usize, usize)>>;

fn tree_parents(n: usize, m: usize, basis: &[(usize, usize, f64)]) -> (Parents, Vec<usize>) {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + m];
    for (k, &(i, j, _)) in basis.iter().enumerate() {
        adj[i].push((n + j, k));
        adj[n + j].push((i, k));
    }
    let mut parent = vec![None; n + m];
    let mut seen = vec![false; n + m];
    let mut order = Vec::with_capacity(n + m);
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &(y, k) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, k));
                stack.push(y);
            }
        }
    }
    (parent, order)
}

fn potentials(
    n: usize,
    m: usize,
    basis: &[(usize, usize, f64)],
    cost: &DMatrix<f64>,
) -> (Vec<f64>, Vec<f64>, Parents) {
    let (parent, order) = tree_parents(n, m, basis);
    let mut pot = vec![0.0; n + m];
    for &x in &order {
        if let Some((p, k)) = parent[x] {
            let (i, j, _) = basis[k];
            pot[x] = cost[(i, j)] - pot[p];
        }
    }
    let v = pot.split_off(n);
    (pot, v, parent)
}

/// Path of basis indices from node `x` up to the root.
fn path_to_root(mut x: usize, parent: &Parents) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    while let Some((p, k)) = parent[x] {
        out.push((x, k));
        x = p;
    }
    out.push((x, usize::MAX));
    out
}

/// Minimize `Σ C_ij γ_ij` over couplings of `a` and `b` (equal totals).
pub fn transport_simplex(a: &[f64], b: &[f64], cost: &DMatrix<f64>) -> TransportSolution {
    let (n, m) = (a.len(), b.len());
    assert_eq!(cost.shape(), (n, m), "cost shape");
    let mut basis = initial_basis(a, b, cost);
    let cmax = cost.iter().fold(0.0f64, |x, &c| x.max(c.abs()));
    let tol = 1e-12 * (1.0 + cmax);
    let max_pivots = 20 * n * m + 1000;
    let mut pivots = 0;
    let mut degenerate = 0usize;
    loop {
        let (u, v, parent) = potentials(n, m, &basis, cost);
        let bland = degenerate > 2 * (n + m);
        let mut enter = None;
        let mut best = -tol;
        'scan: for i in 0..n {
            for j in 0..m {
                let r = cost[(i, j)] - u[i] - v[j];
                if r < best {
                    best = r;
                    enter = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                }
            }
        }
        let Some((ei, ej)) = enter else {
            let total = basis.iter().map(|&(i, j, f)| f * cost[(i, j)]).sum();
            return TransportSolution { cost: total, basis, u, v, pivots };
        };
        if pivots >= max_pivots {
            let total = basis.iter().map(|&(i, j, f)| f * cost[(i, j)]).sum();
            log::warn!("transport simplex hit pivot cap {max_pivots}");
            return TransportSolution { cost: total, basis, u, v, pivots };
        }
        // Cycle: entering (ei, ej), then the tree path col ej -> row ei.
        let pa = path_to_root(n + ej, &parent);
        let pb = path_to_root(ei, &parent);
        let mut ia = pa.len() - 1;
        let mut ib = pb.len() - 1;
        while ia > 0 && ib > 0 && pa[ia - 1].0 == pb[ib - 1].0 {
            ia -= 1;
            ib -= 1;
        }
        // Edges from ej up to the meeting node, then down to ei.
        let mut cycle: Vec<usize> = pa[..ia].iter().map(|&(_, k)| k).collect();
        cycle.extend(pb[..ib].iter().rev().map(|&(_, k)| k));
        // Odd positions (0-based even) lose flow.
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for (pos, &k) in cycle.iter().enumerate() {
            if pos % 2 == 0 && basis[k].2 < theta {
                theta = basis[k].2;
                leave = k;
            }
        }
        let theta = theta.max(0.0);
        for (pos, &k) in cycle.iter().enumerate() {
            if pos % 2 == 0 {
                basis[k].2 -= theta;
            } else {
                basis[k].2 += theta;
            }
        }
        basis[leave] = (ei, ej, theta);
        if theta <= 1e-15 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
        pivots += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_lp, LinearProgram};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn lp_oracle(a: &[f64], b: &[f64], c: &DMatrix<f64>) -> f64 {
        let (n, m) = (a.len(), b.len());
        let mut am = DMatrix::zeros(n + m, n * m);
        for i in 0..n {
            for j in 0..m {
                am[(i, i * m + j)] = 1.0;
                am[(n + j, i * m + j)] = 1.0;
            }
        }
        let cost: Vec<f64> = (0..n * m).map(|k| c[(k / m, k % m)]).collect();
        let mut rhs = a.to_vec();
        rhs.extend_from_slice(b);
        solve_lp(&LinearProgram::new(cost, am, rhs)).primal_objective
    }

    fn simplex_weights(raw: &[f64]) -> Vec<f64> {
        let s: f64 = raw.iter().sum();
        raw.iter().map(|x| x / s).collect()
    }

    #[test]
    fn identity_cost_diagonal() {
        let a = [0.5, 0.5];
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = transport_simplex(&a, &a, &c);
        assert_abs_diff_eq!(s.cost, 0.0, epsilon = 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_lp_and_duals_certify(
            ra in prop::collection::vec(0.0f64..1.0, 1..7),
            rb in prop::collection::vec(0.0f64..1.0, 1..7),
            seed in 0u64..1000,
        ) {
            prop_assume!(ra.iter().sum::<f64>() > 0.1 && rb.iter().sum::<f64>() > 0.1);
            let a = simplex_weights(&ra);
            let b = simplex_weights(&rb);
            let mut s = seed;
            let c = DMatrix::from_fn(a.len(), b.len(), |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64) / (1u64 << 53) as f64
            });
            let sol = transport_simplex(&a, &b, &c);
            let oracle = lp_oracle(&a, &b, &c);
            prop_assert!((sol.cost - oracle).abs() < 1e-10);
            let g = sol.coupling(a.len(), b.len());
            for i in 0..a.len() {
                prop_assert!((g.row(i).sum() - a[i]).abs() < 1e-10);
            }
            for j in 0..b.len() {
                prop_assert!((g.column(j).sum() - b[j]).abs() < 1e-10);
            }
            prop_assert!(g.iter().all(|&x| x >= -1e-15));
            let dual: f64 = sol.u.iter().zip(&a).map(|(u, a)| u * a).sum::<f64>()
                + sol.v.iter().zip(&b).map(|(v, b)| v * b).sum::<f64>();
            prop_assert!((dual - sol.cost).abs() < 1e-10);
            for i in 0..a.len() {
                for j in 0..b.len() {
                    prop_assert!(sol.u[i] + sol.v[j] <= c[(i, j)] + 1e-10);
                }
            }
        }
    }
}
