// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Metrics on pure states, with the metadata the bounds rely on.

mod hamming;
mod plugin;
mod trace;

pub use hamming::{hamming_metric, HammingMetric, MAX_HAMMING_LOCAL, MAX_HAMMING_SITES};
pub use plugin::{
    load_plugin, plugin_metric, sncf_metric, FubiniStudy, PluginConfig, Sncf, ValidationReport,
};
pub use trace::{trace_metric, TraceMetric};

use crate::error::{Error, Result};
use crate::norms::TracelessHermitian;
use crate::states::linalg::{CMat, CVec};
use crate::states::PureState;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Distance on rays of a Hilbert space.
pub trait PureMetric: Send + Sync {
    fn name(&self) -> String;

    fn distance(&self, a: &PureState, b: &PureState) -> f64;

    /// Wirtinger derivatives `(∂d/∂ā, ∂d/∂b̄)` at unit vectors, if available.
    fn gradient(&self, _a: &PureState, _b: &PureState) -> Option<(CVec, CVec)> {
        None
    }
}

/// A norm on traceless Hermitians that lower-bounds `W_1` (hence every
/// `W_p`), together with its dual: probes and Lipschitz certificates.
pub trait NormCertificate: Send + Sync {
    fn name(&self) -> &'static str;

    fn norm(&self, x: &TracelessHermitian) -> Result<f64>;

    /// Observable `O` near-attaining `Tr(O X) = ‖X‖` and a certified `U ≥ L_d(O)`.
    fn dual_probe(&self, x: &TracelessHermitian) -> Result<(CMat, f64)>;

    /// Certified upper bound on `L_d(O)` and whether it is exact.
    fn lipschitz_bound(&self, o: &CMat, dims: &[usize]) -> Result<(f64, bool)>;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    /// `false` when `value` is only an upper bound.
    pub exact: bool,
}

/// `C d(ψ, φ)^α ≥ ‖|ψ><ψ| - |φ><φ|‖₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hoelder {
    pub c: f64,
    pub alpha: f64,
}

impl Hoelder {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        if !(c > 0.0) || !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::validation("hoelder_constants", format!("C = {c}, alpha = {alpha}")));
        }
        Ok(Hoelder { c, alpha })
    }

    /// `(‖X‖₂ / C)^{1/α}`, a lower bound on every `W_p`.
    pub fn lower_bound(&self, two_norm: f64) -> f64 {
        (two_norm / self.c).powf(1.0 / self.alpha)
    }
}

/// A pure-state metric and its certified metadata.
#[derive(Clone)]
pub struct MetricSpec {
    pub name: String,
    evaluator: Arc<dyn PureMetric>,
    pub diameter: Diameter,
    pub hoelder: Option<Hoelder>,
    lower_norm: Option<Arc<dyn NormCertificate>>,
    /// Site dimensions the metric is defined on; `None` for any space.
    pub dims: Option<Vec<usize>>,
    pub validation: Option<ValidationReport>,
    /// Each evaluation solves an optimization problem; searches shrink their budgets.
    pub expensive: bool,
}

impl fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpec")
            .field("name", &self.name)
            .field("diameter", &self.diameter)
            .field("hoelder", &self.hoelder)
            .field("exact_lower_norm", &self.lower_norm.as_ref().map(|n| n.name()))
            .field("dims", &self.dims)
            .finish()
    }
}

impl MetricSpec {
    pub fn new(
        name: impl Into<String>,
        evaluator: Arc<dyn PureMetric>,
        diameter: Diameter,
        hoelder: Option<Hoelder>,
        lower_norm: Option<Arc<dyn NormCertificate>>,
        dims: Option<Vec<usize>>,
    ) -> Self {
        MetricSpec { name: name.into(), evaluator, diameter, hoelder, lower_norm, dims, validation: None, expensive: false }
    }

    pub fn distance(&self, a: &PureState, b: &PureState) -> f64 {
        self.evaluator.distance(a, b)
    }

    pub fn gradient(&self, a: &PureState, b: &PureState) -> Option<(CVec, CVec)> {
        self.evaluator.gradient(a, b)
    }

    /// Central-difference gradient, used when no analytic one exists.
    pub fn numerical_gradient(&self, a: &PureState, b: &PureState, h: f64) -> (CVec, CVec) {
        let ga = fd_gradient(|x| self.distance(&x, b), a, h);
        let gb = fd_gradient(|x| self.distance(a, &x), b, h);
        (ga, gb)
    }

    /// Analytic gradient if present, else central differences.
    pub fn any_gradient(&self, a: &PureState, b: &PureState) -> (CVec, CVec) {
        self.gradient(a, b).unwrap_or_else(|| self.numerical_gradient(a, b, 1e-6))
    }

    pub fn has_gradient(&self) -> bool {
        let e = PureState::basis(self.dims.clone().unwrap_or_else(|| vec![2]), 0);
        match e {
            Ok(e) => self.evaluator.gradient(&e, &e).is_some(),
            Err(_) => false,
        }
    }

    pub fn exact_lower_norm(&self) -> Option<&Arc<dyn NormCertificate>> {
        self.lower_norm.as_ref()
    }

    pub fn evaluator(&self) -> &Arc<dyn PureMetric> {
        &self.evaluator
    }

    /// Fail unless the metric is defined on `dims`.
    pub fn check_dims(&self, dims: &[usize]) -> Result<()> {
        match &self.dims {
            Some(d) if d.as_slice() != dims => Err(Error::validation(
                "metric_dims",
                format!("metric {} is defined on {d:?}, state has {dims:?}", self.name),
            )),
            _ => Ok(()),
        }
    }
}

fn fd_gradient(f: impl Fn(PureState) -> f64, a: &PureState, h: f64) -> CVec {
    let dims = a.dims().to_vec();
    let v = a.amplitudes();
    let mut g = CVec::zeros(v.len());
    let eval = |dv: CVec| -> f64 {
        match PureState::normalized(v + dv, dims.clone()) {
            Ok(s) => f(s),
            Err(_) => f64::NAN,
        }
    };
    for k in 0..v.len() {
        for (re, im) in [(1.0, 0.0), (0.0, 1.0)] {
            let mut e = CVec::zeros(v.len());
            e[k] = crate::states::linalg::c(re * h, im * h);
            let d = (eval(e.clone()) - eval(-e)) / (2.0 * h);
            // ∂/∂z̄ = (∂/∂x + i ∂/∂y) / 2.
            g[k] += crate::states::linalg::c(0.5 * re * d, 0.5 * im * d);
        }
    }
    g
}

/// Parse `trace`, `hamming:d,n` or `plugin:<path>`.
pub fn metric_from_name(name: &str, dims: &[usize]) -> Result<MetricSpec> {
    let name = name.trim();
    if name == "trace" {
        return trace_metric(dims);
    }
    if let Some(rest) = name.strip_prefix("hamming:") {
        let parts: Vec<&str> = rest.split(',').collect();
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("metric spec {name:?}")));
        if parts.len() != 2 {
            return Err(Error::Parse(format!("expected hamming:d,n, got {name:?}")));
        }
        let m = hamming_metric(parse(parts[0])?, parse(parts[1])?)?;
        m.check_dims(dims)?;
        return Ok(m);
    }
    if let Some(path) = name.strip_prefix("plugin:") {
        return load_plugin(std::path::Path::new(path), dims);
    }
    Err(Error::Parse(format!("unknown metric {name:?}; expected trace, hamming:d,n or plugin:<path>")))
}
