// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Real embedding of complex Hermitian matrices.
//!
//! `embed(H) = [[Re H, -Im H], [Im H, Re H]]` is symmetric, is PSD iff `H`
//! is, and satisfies `Tr(embed(H) embed(K)) = 2 Tr(H K)`.

use crate::states::linalg::{c, CMat, C64};
use nalgebra::DMatrix;

pub fn embed_hermitian(h: &CMat) -> DMatrix<f64> {
    let d = h.nrows();
    let mut y = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = h[(i, j)];
            y[(i, j)] = z.re;
            y[(i + d, j + d)] = z.re;
            y[(i + d, j)] = z.im;
            y[(i, j + d)] = -z.im;
        }
    }
    y
}

/// Inverse of [`embed_hermitian`], averaging the redundant copies.
pub fn unembed_hermitian(y: &DMatrix<f64>) -> CMat {
    let d = y.nrows() / 2;
    CMat::from_fn(d, d, |i, j| {
        c(
            0.5 * (y[(i, j)] + y[(i + d, j + d)]),
            0.5 * (y[(i + d, j)] - y[(i, j + d)]),
        )
    })
}

/// Symmetric sparse entries `(row, col, value)`, `row <= col`, of
/// `embed(H) / 2` for a Hermitian `H` given by its upper-triangle entries.
///
/// Against `Y = embed(P)` these give `<A, Y> = Tr(H P)`.
pub fn hermitian_functional(upper: &[(usize, usize, C64)], d: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(4 * upper.len());
    for &(a, b, z) in upper {
        debug_assert!(a <= b);
        if z.re != 0.0 {
            out.push((a, b, 0.5 * z.re));
            out.push((a + d, b + d, 0.5 * z.re));
        }
        if a != b && z.im != 0.0 {
            out.push((b, a + d, 0.5 * z.im));
            out.push((a, b + d, -0.5 * z.im));
        }
    }
    out
}

/// Upper-triangle entries of a dense Hermitian matrix, skipping zeros.
pub fn upper_entries(h: &CMat) -> Vec<(usize, usize, C64)> {
    let d = h.nrows();
    let mut out = Vec::new();
    for a in 0..d {
        for b in a..d {
            let z = h[(a, b)];
            if z.norm() > 0.0 {
                out.push((a, b, z));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::states::random::gaussian_mat;
    use approx::assert_abs_diff_eq;

    fn herm(d: usize, seed: u64) -> CMat {
        let g = gaussian_mat(d, d, &mut rng::rng(seed));
        &g + g.adjoint()
    }

    #[test]
    fn trace_identity() {
        let h = herm(4, 1);
        let k = herm(4, 2);
        let lhs = (embed_hermitian(&h) * embed_hermitian(&k)).trace();
        let rhs = 2.0 * (&h * &k).trace().re;
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn roundtrip() {
        let h = herm(3, 5);
        let back = unembed_hermitian(&embed_hermitian(&h));
        assert_abs_diff_eq!((back - &h).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn functional_matches_trace() {
        let h = herm(3, 7);
        let p = herm(3, 8);
        let y = embed_hermitian(&p);
        let terms = hermitian_functional(&upper_entries(&h), 3);
        let val: f64 = terms
            .iter()
            .map(|&(i, j, v)| if i == j { v * y[(i, j)] } else { 2.0 * v * y[(i, j)] })
            .sum();
        assert_abs_diff_eq!(val, (&h * &p).trace().re, epsilon = 1e-10);
    }

    #[test]
    fn psd_preserved() {
        let g = gaussian_mat(3, 3, &mut rng::rng(4));
        let p = &g * g.adjoint();
        let e = embed_hermitian(&p).symmetric_eigenvalues();
        assert!(e.iter().all(|&l| l > -1e-12));
    }
}
