// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix helpers on tensor-product spaces.
//!
//! Index convention: site 0 is the most significant digit, matching
//! `kron(A_0, kron(A_1, ...))`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Row-major strides for `dims`.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offsets into the full index for every multi-index over `sites`.
pub fn site_offsets(dims: &[usize], sites: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &k in sites {
        let mut next = Vec::with_capacity(out.len() * dims[k]);
        for &o in &out {
            for x in 0..dims[k] {
                next.push(o + x * st[k]);
            }
        }
        out = next;
    }
    out
}

pub fn complement(n: usize, sites: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !sites.contains(k)).collect()
}

/// Partial trace keeping `keep` (in the given order) and tracing the rest.
pub fn partial_trace(m: &CMat, dims: &[usize], keep: &[usize]) -> CMat {
    let kept = site_offsets(dims, keep);
    let traced = site_offsets(dims, &complement(dims.len(), keep));
    let n = kept.len();
    CMat::from_fn(n, n, |a, b| traced.iter().map(|&t| m[(kept[a] + t, kept[b] + t)]).sum())
}

/// `op` acting on `sites` (in the given order), identity elsewhere.
pub fn embed_on_sites(op: &CMat, dims: &[usize], sites: &[usize]) -> CMat {
    let act = site_offsets(dims, sites);
    let rest = site_offsets(dims, &complement(dims.len(), sites));
    let d = total_dim(dims);
    let mut out = CMat::zeros(d, d);
    for &t in &rest {
        for (a, &oa) in act.iter().enumerate() {
            for (b, &ob) in act.iter().enumerate() {
                out[(oa + t, ob + t)] = op[(a, b)];
            }
        }
    }
    out
}

/// Reorder tensor factors: output site `k` is input site `perm[k]`.
pub fn permute_sites(m: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let new_dims: Vec<usize> = perm.iter().map(|&k| dims[k]).collect();
    let old_st = strides(dims);
    let d = total_dim(dims);
    let map: Vec<usize> = (0..d)
        .map(|i| {
            let mut rem = i;
            let mut idx = 0;
            for (k, &nd) in new_dims.iter().enumerate().rev() {
                idx += (rem % nd) * old_st[perm[k]];
                rem /= nd;
            }
            idx
        })
        .collect();
    CMat::from_fn(d, d, |i, j| m[(map[i], map[j])])
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

pub fn projector(v: &CVec) -> CMat {
    outer(v, v)
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut s = ZERO;
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.dotc(b)
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| c(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rand_mat(d: usize, seed: u64) -> CMat {
        let mut s = seed;
        CMat::from_fn(d, d, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            c(a, b)
        })
    }

    #[test]
    fn partial_trace_of_product() {
        let a = rand_mat(2, 1);
        let b = rand_mat(3, 2);
        let ab = kron(&a, &b);
        let ta = partial_trace(&ab, &[2, 3], &[0]);
        let tb = partial_trace(&ab, &[2, 3], &[1]);
        assert_abs_diff_eq!(frobenius(&(ta - &a * b.trace())), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(frobenius(&(tb - &b * a.trace())), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn embed_matches_kron() {
        let a = rand_mat(3, 5);
        let e = embed_on_sites(&a, &[2, 3, 2], &[1]);
        let k = kron(&kron(&identity(2), &a), &identity(2));
        assert_abs_diff_eq!(frobenius(&(e - k)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn permute_swaps_factors() {
        let a = rand_mat(2, 3);
        let b = rand_mat(3, 4);
        let p = permute_sites(&kron(&a, &b), &[2, 3], &[1, 0]);
        assert_abs_diff_eq!(frobenius(&(p - kron(&b, &a))), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn keep_order_is_respected() {
        let a = rand_mat(2, 7);
        let b = rand_mat(3, 8);
        let m = kron(&kron(&a, &identity(2)), &b);
        let kept = partial_trace(&m, &[2, 2, 3], &[2, 0]);
        let want = kron(&b, &a) * c(2.0, 0.0);
        assert_abs_diff_eq!(frobenius(&(kept - want)), 0.0, epsilon = 1e-12);
    }
}
