// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::linalg::{c, CMat, CVec, C64, ZERO};
use crate::config::tolerances;
use crate::error::{Error, Result};

/// Largest dimension accepted by [`eig_hermitian`].
pub const MAX_EIG_DIM: usize = 256;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition with eigenvalues sorted in descending order.
///
/// Within a degenerate eigenspace the basis is whatever the sweeps produced;
/// it is deterministic for a given input.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMat,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k).into_owned()
    }

    /// Rebuild `Σ f(λ_k) |v_k><v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for k in 0..d {
            let w = f(self.values[k]);
            scaled.column_mut(k).scale_mut(w);
        }
        scaled * self.vectors.adjoint()
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        self.values.iter().filter(|&&v| v > cutoff).count()
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    /// Groups of indices whose eigenvalues agree within `tol`.
    pub fn degenerate_groups(&self, tol: f64) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for k in 0..self.dim() {
            match groups.last_mut() {
                Some(g) if (self.values[g[0]] - self.values[k]).abs() <= tol => g.push(k),
                _ => groups.push(vec![k]),
            }
        }
        groups
    }
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn eig_hermitian(m: &CMat) -> Result<Spectrum> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::validation("square", format!("{}x{} matrix", n, m.ncols())));
    }
    if n > MAX_EIG_DIM {
        return Err(Error::Capacity(format!("eigensolver dimension {n} exceeds {MAX_EIG_DIM}")));
    }
    let mut a = super::linalg::hermitian_part(m);
    let mut v = CMat::identity(n, n);
    let scale = super::linalg::frobenius(&a).max(1e-300);
    let tol = tolerances().jacobi_offdiag * scale.max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = diag phase on q followed by a real rotation.
                let jpp = c(cs, 0.0);
                let jpq = c(sn, 0.0);
                let jqp = -phase.conj() * sn;
                let jqq = phase.conj() * cs;
                rotate(&mut a, &mut v, p, q, [jpp, jpq, jqp, jqq]);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = c(app - t * mag, 0.0);
                a[(q, q)] = c(aqq + t * mag, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(Spectrum { values, vectors })
}

fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize, j: [C64; 4]) {
    let [jpp, jpq, jqp, jqq] = j;
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// `f(H)` for Hermitian `H`.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    Ok(eig_hermitian(m)?.reconstruct_with(f))
}

/// Eigenvalues only, descending.
pub fn eigvals(m: &CMat) -> Result<Vec<f64>> {
    Ok(eig_hermitian(m)?.values)
}
