// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Discrete optimal transport between finitely supported measures.

mod simplex;

pub use simplex::{transport_simplex, TransportSolution};

use crate::config::tolerances;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Weights on a finite support. The support itself lives with the caller;
/// transport only needs weights and the pairwise distance matrix.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure<T> {
    pub points: Vec<T>,
    pub weights: Vec<f64>,
}

impl<T> DiscreteMeasure<T> {
    pub fn new(points: Vec<T>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::validation("support_length", "points vs weights"));
        }
        check_weights(&weights)?;
        Ok(DiscreteMeasure { points, weights })
    }
}

/// Result of a discrete transport problem.
#[derive(Clone, Debug)]
pub struct OtResult {
    /// `W_p` (or `W_∞`).
    pub value: f64,
    /// `Σ γ_ij d_ij^p` for finite `p`; the bottleneck for `W_∞`.
    pub cost: f64,
    pub coupling: DMatrix<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::validation("nonempty_support", "no points"));
    }
    if let Some(x) = w.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::validation("nonnegative_weights", format!("weight {x}")));
    }
    Ok(())
}

fn check_pair(a: &[f64], b: &[f64], d: &DMatrix<f64>) -> Result<()> {
    check_weights(a)?;
    check_weights(b)?;
    if d.shape() != (a.len(), b.len()) {
        return Err(Error::validation("cost_shape", format!("{:?}", d.shape())));
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - sb).abs() > tolerances().marginal {
        return Err(Error::validation("equal_mass", format!("{sa} vs {sb}")));
    }
    if d.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::validation("nonnegative_distance", "negative entry"));
    }
    Ok(())
}

/// `W_p` between weight vectors `a`, `b` for the distance matrix `d`.
pub fn wp_discrete(a: &[f64], b: &[f64], d: &DMatrix<f64>, p: f64) -> Result<OtResult> {
    check_pair(a, b, d)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::validation("order_at_least_one", format!("p = {p}")));
    }
    let cost = d.map(|x| x.powf(p));
    let sol = transport_simplex(a, b, &cost);
    let t = sol.cost.max(0.0);
    Ok(OtResult {
        value: t.powf(1.0 / p),
        cost: t,
        coupling: sol.coupling(a.len(), b.len()),
        u: sol.u,
        v: sol.v,
    })
}

/// Smallest threshold `t` such that a coupling supported on `d <= t` exists.
pub fn winf_discrete(a: &[f64], b: &[f64], d: &DMatrix<f64>) -> Result<OtResult> {
    check_pair(a, b, d)?;
    let mut levels: Vec<f64> = d.iter().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let feasible = |t: f64| {
        let c = d.map(|x| if x > t { 1.0 } else { 0.0 });
        let sol = transport_simplex(a, b, &c);
        (sol.cost <= 1e-12, sol)
    };
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    let (ok, mut best) = feasible(levels[hi]);
    debug_assert!(ok);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let (ok, sol) = feasible(levels[mid]);
        if ok {
            hi = mid;
            best = sol;
        } else {
            lo = mid + 1;
        }
    }
    let t = levels[hi];
    let g = best.coupling(a.len(), b.len());
    Ok(OtResult { value: t, cost: t, coupling: g, u: best.u, v: best.v })
}

/// Hamming distance between two strings over a finite alphabet.
pub fn hamming(x: &[usize], y: &[usize]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

/// All strings of length `n` over `{0..d-1}` in lexicographic order
/// (the computational-basis order of `(C^d)^{⊗n}`).
pub fn hamming_cube(d: usize, n: usize) -> Vec<Vec<usize>> {
    let total = d.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut s = vec![0; n];
            for pos in (0..n).rev() {
                s[pos] = k % d;
                k /= d;
            }
            s
        })
        .collect()
}

/// Hamming distance matrix on `{0..d-1}^n`.
pub fn hamming_matrix(d: usize, n: usize) -> DMatrix<f64> {
    let cube = hamming_cube(d, n);
    let k = cube.len();
    DMatrix::from_fn(k, k, |i, j| hamming(&cube[i], &cube[j]) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn point_mass_mix(d: usize, n: usize, items: &[(&[usize], f64)]) -> Vec<f64> {
        let cube = hamming_cube(d, n);
        let mut w = vec![0.0; cube.len()];
        for (s, p) in items {
            let k = cube.iter().position(|c| c.as_slice() == *s).unwrap();
            w[k] += p;
        }
        w
    }

    #[test]
    fn hamming_three_letter_example() {
        let d = hamming_matrix(3, 2);
        let mu = point_mass_mix(3, 2, &[(&[0, 0], 0.5), (&[2, 2], 0.5)]);
        let nu = point_mass_mix(3, 2, &[(&[1, 1], 0.5), (&[2, 2], 0.5)]);
        assert_abs_diff_eq!(wp_discrete(&mu, &nu, &d, 1.0).unwrap().value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(winf_discrete(&mu, &nu, &d).unwrap().value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn winf_shift_example() {
        let d = hamming_matrix(2, 2);
        let mu = point_mass_mix(2, 2, &[(&[0, 0], 0.5), (&[0, 1], 0.5)]);
        let nu = point_mass_mix(2, 2, &[(&[0, 1], 0.5), (&[1, 1], 0.5)]);
        let r = winf_discrete(&mu, &nu, &d).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        for i in 0..4 {
            assert_abs_diff_eq!(r.coupling.row(i).sum(), mu[i], epsilon = 1e-10);
            assert_abs_diff_eq!(r.coupling.column(i).sum(), nu[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn point_mass_to_uniform() {
        let d = hamming_matrix(2, 2);
        let mu = point_mass_mix(2, 2, &[(&[0, 0], 1.0)]);
        let nu = vec![0.25; 4];
        assert_abs_diff_eq!(wp_discrete(&mu, &nu, &d, 1.0).unwrap().value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let d = hamming_matrix(2, 1);
        assert!(wp_discrete(&[0.5, 0.5], &[0.9, 0.2], &d, 1.0).is_err());
        assert!(wp_discrete(&[0.5, 0.5], &[0.5, 0.5], &d, 0.5).is_err());
        assert!(wp_discrete(&[1.5, -0.5], &[0.5, 0.5], &d, 1.0).is_err());
    }

    #[test]
    fn wp_monotone_in_p() {
        let d = hamming_matrix(2, 3);
        let mu: Vec<f64> = (0..8).map(|k| (k + 1) as f64 / 36.0).collect();
        let nu: Vec<f64> = (0..8).map(|k| (8 - k) as f64 / 36.0).collect();
        let w1 = wp_discrete(&mu, &nu, &d, 1.0).unwrap().value;
        let w2 = wp_discrete(&mu, &nu, &d, 2.0).unwrap().value;
        let wi = winf_discrete(&mu, &nu, &d).unwrap().value;
        assert!(w1 <= w2 + 1e-12 && w2 <= wi + 1e-12);
    }
}
