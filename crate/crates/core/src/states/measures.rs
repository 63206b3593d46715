// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Entropy and Schatten norms of Hermitian matrices.

use super::eigen::eigvals;
use super::linalg::{frobenius, CMat};
use super::DensityOperator;
use crate::error::Result;

/// `-Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    Ok(eigvals(rho.matrix())?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum())
}

/// Schatten-1 norm of a Hermitian matrix.
pub fn trace_norm(h: &CMat) -> Result<f64> {
    Ok(eigvals(h)?.into_iter().map(f64::abs).sum())
}

/// Schatten-2 (Frobenius) norm.
pub fn two_norm(h: &CMat) -> f64 {
    frobenius(h)
}

/// Operator norm of a Hermitian matrix.
pub fn op_norm(h: &CMat) -> Result<f64> {
    Ok(eigvals(h)?.into_iter().fold(0.0, |m, l| m.max(l.abs())))
}
