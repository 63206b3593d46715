// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Haar-random states, unitaries and induced-measure mixed states.

use super::linalg::{c, total_dim, CMat, CVec};
use super::{check_dims, DensityOperator, PureState};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use rand_distr::{Distribution, StandardNormal};

fn gaussian(rng: &mut Rng) -> num_complex::Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

pub fn gaussian_vec(n: usize, rng: &mut Rng) -> CVec {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn gaussian_mat(r: usize, m: usize, rng: &mut Rng) -> CMat {
    CMat::from_fn(r, m, |_, _| gaussian(rng))
}

/// Haar-random unit vector on the space with the given dims.
pub fn haar_pure(dims: &[usize], rng: &mut Rng) -> Result<PureState> {
    let d = check_dims(dims)?;
    PureState::normalized(gaussian_vec(d, rng), dims.to_vec())
}

pub fn haar_pure_seeded(dims: &[usize], seed: u64) -> Result<PureState> {
    haar_pure(dims, &mut rng::rng(seed))
}

/// Orthonormalize the rows of `m` in place (modified Gram-Schmidt).
/// Fails if the rows are numerically dependent.
pub fn orthonormalize_rows(m: &mut CMat) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..i {
            let proj: num_complex::Complex64 =
                (0..m.ncols()).map(|k| m[(j, k)].conj() * m[(i, k)]).sum();
            for k in 0..m.ncols() {
                let v = m[(j, k)];
                m[(i, k)] -= proj * v;
            }
        }
        let n: f64 = (0..m.ncols()).map(|k| m[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-12 {
            return Err(Error::Solver("rank-deficient rows in orthonormalization".into()));
        }
        for k in 0..m.ncols() {
            m[(i, k)] /= n;
        }
    }
    Ok(())
}

/// `r x m` matrix with orthonormal rows, Haar distributed (`r <= m`).
pub fn haar_coisometry(r: usize, m: usize, rng: &mut Rng) -> CMat {
    assert!(r <= m, "coisometry needs r <= m");
    loop {
        let mut g = gaussian_mat(r, m, rng);
        if orthonormalize_rows(&mut g).is_ok() {
            return g;
        }
    }
}

/// Haar-random unitary of size `d`.
pub fn haar_unitary(d: usize, rng: &mut Rng) -> CMat {
    haar_coisometry(d, d, rng)
}

/// Reduced state of a Haar-random pure state on `D * s`, tracing the `s` factor.
pub fn random_mixed(dims: &[usize], s: usize, seed: u64) -> Result<DensityOperator> {
    let d = check_dims(dims)?;
    if s == 0 {
        return Err(Error::validation("positive_dims", "environment dimension 0"));
    }
    let mut r = rng::rng(seed);
    let g = gaussian_mat(d, s, &mut r);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityOperator::from_trusted(m.unscale(tr), dims.to_vec()))
}

/// Product dimension helper used by callers that only hold dims.
pub fn dim_of(dims: &[usize]) -> usize {
    total_dim(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::linalg::frobenius;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_dim_is_error() {
        assert!(haar_pure_seeded(&[0], 1).is_err());
        assert!(random_mixed(&[2], 0, 1).is_err());
    }

    #[test]
    fn unitary_is_unitary() {
        let u = haar_unitary(5, &mut rng::rng(3));
        assert_abs_diff_eq!(frobenius(&(&u * u.adjoint() - CMat::identity(5, 5))), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_state_is_valid_and_seeded() {
        let a = random_mixed(&[2, 2], 3, 9).unwrap();
        let b = random_mixed(&[2, 2], 3, 9).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        DensityOperator::new(a.matrix().clone(), vec![2, 2]).unwrap();
        assert_eq!(a.spectrum().unwrap().rank(1e-10), 3);
    }
}
