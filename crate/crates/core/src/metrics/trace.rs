// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Trace distance between pure states, `√(1 - |<ψ|φ>|²)`.

use super::{Diameter, Hoelder, MetricSpec, NormCertificate, PureMetric};
use crate::error::{Error, Result};
use crate::norms::TracelessHermitian;
use crate::states::eigen::eig_hermitian;
use crate::states::linalg::{c, total_dim, CMat, CVec};
use crate::states::{trace_norm, PureState};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, Default)]
pub struct TraceMetric;

impl PureMetric for TraceMetric {
    fn name(&self) -> String {
        "trace".into()
    }

    fn distance(&self, a: &PureState, b: &PureState) -> f64 {
        let g = a.ray_gap(b);
        (g * (1.0 - 0.25 * g * g).max(0.0).sqrt()).min(1.0)
    }

    fn gradient(&self, a: &PureState, b: &PureState) -> Option<(CVec, CVec)> {
        let d = self.distance(a, b);
        let n = a.dim();
        if d < 1e-12 {
            return Some((CVec::zeros(n), CVec::zeros(n)));
        }
        // f = |<a|b>|², ∂f/∂ā = b <b|a>, ∂d/∂ā = -(∂f/∂ā) / 2d.
        let ab = a.overlap(b);
        let s = c(-0.5 / d, 0.0);
        let ga = b.amplitudes() * (ab.conj() * s);
        let gb = a.amplitudes() * (ab * s);
        Some((ga, gb))
    }
}

/// Half the trace norm; its dual constant is `λmax - λmin`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HalfTraceNorm;

impl NormCertificate for HalfTraceNorm {
    fn name(&self) -> &'static str {
        "half_trace_norm"
    }

    fn norm(&self, x: &TracelessHermitian) -> Result<f64> {
        Ok(0.5 * trace_norm(x.matrix())?)
    }

    fn dual_probe(&self, x: &TracelessHermitian) -> Result<(CMat, f64)> {
        let s = eig_hermitian(x.matrix())?;
        let p = s.reconstruct_with(|l| if l > 0.0 { 1.0 } else { 0.0 });
        let has_pos = s.values.iter().any(|&l| l > 0.0);
        let has_nonpos = s.values.iter().any(|&l| l <= 0.0);
        let u = if has_pos && has_nonpos { 1.0 } else { 0.0 };
        Ok((p, u))
    }

    fn lipschitz_bound(&self, o: &CMat, _dims: &[usize]) -> Result<(f64, bool)> {
        let s = eig_hermitian(o)?;
        Ok((s.max() - s.min(), true))
    }
}

/// Trace metric on the space with site dims `dims` (total dimension ≥ 2).
pub fn trace_metric(dims: &[usize]) -> Result<MetricSpec> {
    let d = total_dim(dims);
    if dims.is_empty() || d < 2 {
        return Err(Error::validation("dimension_at_least_two", format!("dims {dims:?}")));
    }
    Ok(MetricSpec::new(
        "trace",
        Arc::new(TraceMetric),
        Diameter { value: 1.0, exact: true },
        Some(Hoelder { c: std::f64::consts::SQRT_2, alpha: 1.0 }),
        Some(Arc::new(HalfTraceNorm)),
        None,
    ))
}
