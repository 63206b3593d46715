// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! User-registered metrics, checked against the metric axioms before use.
//!
//! A plug-in file is JSON naming a built-in evaluator kind plus optional
//! metadata overrides:
//!
//! ```json
//! { "kind": "sncf", "hoelder": { "c": 1.4142, "alpha": 1.0 } }
//! ```
//!
//! Kinds: `trace`, `fubini_study`, `sncf` (qubits only).

use super::trace::TraceMetric;
use super::{Diameter, Hoelder, MetricSpec, PureMetric};
use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::rng;
use crate::states::io::pure_to_json;
use crate::states::linalg::{c, frobenius, total_dim, CVec};
use crate::states::{haar_pure, PureState};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

const AXIOM_PAIRS: usize = 1000;
const AXIOM_TRIPLES: usize = 300;

/// Geodesic distance `arccos |<ψ|φ>|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FubiniStudy;

impl PureMetric for FubiniStudy {
    fn name(&self) -> String {
        "fubini_study".into()
    }

    fn distance(&self, a: &PureState, b: &PureState) -> f64 {
        2.0 * (0.5 * a.ray_gap(b)).min(1.0).asin()
    }
}

/// Railway metric on a qubit centred at `|0>`:
/// `d(ψ, φ) = f(ψ) + f(φ)` for `ψ ≠ φ`, with `f(|0>) = 0`, `f = 1/n` on the
/// rays `√((n-1)/n)|0> + √(1/n)|1>` and `√((n-1)/n)|1> - √(1/n)|0>`
/// (`n ≥ 2`), and `f = 2` elsewhere.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sncf;

impl Sncf {
    const TOL: f64 = 1e-9;

    pub fn f(&self, s: &PureState) -> f64 {
        let a0 = s.amplitudes()[0];
        let a1 = s.amplitudes()[1];
        if a1.norm() <= Self::TOL {
            return 0.0;
        }
        for (small, big, sign) in [(a1, a0, 1.0), (a0, a1, -1.0)] {
            let w = small.norm_sqr();
            if w <= Self::TOL || w > 0.5 + Self::TOL {
                continue;
            }
            let n = (1.0 / w).round();
            if n < 2.0 || ((1.0 / w) - n).abs() > 1e-6 * n * n {
                continue;
            }
            // Relative phase small/big must be +1 (first family) or -1 (second).
            if big.norm() <= Self::TOL {
                continue;
            }
            let rel = small / big;
            let rel = rel / rel.norm();
            if (rel - c(sign, 0.0)).norm() <= 1e-6 {
                return 1.0 / n;
            }
        }
        2.0
    }

    /// Members of both families for `n = 2..=n_max`, plus `|0>`.
    pub fn probes(n_max: usize) -> Vec<PureState> {
        let mut out = vec![PureState::basis(vec![2], 0).expect("qubit basis")];
        for n in 2..=n_max {
            let nf = n as f64;
            let (hi, lo) = (((nf - 1.0) / nf).sqrt(), (1.0 / nf).sqrt());
            out.push(PureState::new(CVec::from_vec(vec![c(hi, 0.0), c(lo, 0.0)]), vec![2]).expect("unit"));
            out.push(PureState::new(CVec::from_vec(vec![c(-lo, 0.0), c(hi, 0.0)]), vec![2]).expect("unit"));
        }
        out
    }
}

impl PureMetric for Sncf {
    fn name(&self) -> String {
        "sncf".into()
    }

    fn distance(&self, a: &PureState, b: &PureState) -> f64 {
        if a.same_ray(b, 1e-12) {
            0.0
        } else {
            self.f(a) + self.f(b)
        }
    }
}

/// Outcome of the randomized metadata checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub hoelder_declared: Option<Hoelder>,
    pub hoelder_accepted: bool,
    /// `(ψ, φ, C d^α, ‖ψψ† - φφ†‖₂)` at the first Hölder failure.
    pub hoelder_counterexample: Option<serde_json::Value>,
    pub max_observed_distance: f64,
}

fn states_json(states: &[&PureState]) -> String {
    let v: Vec<_> = states.iter().map(|s| pure_to_json(s)).collect();
    serde_json::to_string(&v).unwrap_or_default()
}

/// Register a metric after checking the axioms on random and probe states.
///
/// Axiom failures are errors carrying the counterexample. A failed Hölder
/// check only drops the Hölder metadata; the report records why.
pub fn plugin_metric(
    name: &str,
    evaluator: Arc<dyn PureMetric>,
    dims: Vec<usize>,
    diameter: Diameter,
    hoelder: Option<Hoelder>,
    probes: &[PureState],
    seed: u64,
) -> Result<MetricSpec> {
    let slack = tolerances().metric_axiom_slack;
    if total_dim(&dims) < 2 {
        return Err(Error::validation("dimension_at_least_two", format!("dims {dims:?}")));
    }
    if let Some(p) = probes.iter().find(|p| p.dims() != dims.as_slice()) {
        return Err(Error::validation("probe_dims", format!("{:?} vs {dims:?}", p.dims())));
    }
    let mut r = rng::rng(seed);
    let mut pool: Vec<PureState> = probes.to_vec();
    for _ in 0..(2 * AXIOM_PAIRS).max(3 * AXIOM_TRIPLES) {
        pool.push(haar_pure(&dims, &mut r)?);
    }
    let d = |a: &PureState, b: &PureState| evaluator.distance(a, b);
    let np = probes.len();

    // Pairs: all probe pairs, then random pairs.
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..np {
        for j in (i + 1)..np {
            pairs.push((i, j));
        }
    }
    for k in 0..AXIOM_PAIRS {
        pairs.push((np + 2 * k, np + 2 * k + 1));
    }
    let mut max_seen: f64 = 0.0;
    let mut hoelder_fail = None;
    for &(i, j) in &pairs {
        let (a, b) = (&pool[i], &pool[j]);
        let ab = d(a, b);
        let ba = d(b, a);
        if !(ab >= -slack) || !ab.is_finite() {
            return Err(Error::MetricAxiom { axiom: "nonnegative", detail: format!("d = {ab} at {}", states_json(&[a, b])) });
        }
        if (ab - ba).abs() > slack {
            return Err(Error::MetricAxiom {
                axiom: "symmetry",
                detail: format!("d(a,b) = {ab}, d(b,a) = {ba} at {}", states_json(&[a, b])),
            });
        }
        if ab > diameter.value + slack {
            return Err(Error::MetricAxiom {
                axiom: "diameter",
                detail: format!("d = {ab} > declared {} at {}", diameter.value, states_json(&[a, b])),
            });
        }
        max_seen = max_seen.max(ab);
        if let (Some(h), None) = (hoelder, &hoelder_fail) {
            let lhs = h.c * ab.max(0.0).powf(h.alpha);
            let rhs = frobenius(&(a.projector() - b.projector()));
            if lhs < rhs - slack {
                hoelder_fail = Some(serde_json::json!({
                    "psi": pure_to_json(a), "phi": pure_to_json(b), "c_d_alpha": lhs, "two_norm": rhs,
                }));
            }
        }
    }
    // Identity of indiscernibles on a phase-rotated copy.
    for s in pool.iter().take(np + 50) {
        let rot = PureState::new(s.amplitudes() * c(0.6, 0.8), dims.clone())?;
        let v = d(s, &rot);
        if v.abs() > slack {
            return Err(Error::MetricAxiom { axiom: "zero_self_distance", detail: format!("d = {v} at {}", states_json(&[s])) });
        }
    }
    // Triangle inequality: probe triples (bounded), then random triples.
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    let cap = np.min(16);
    for i in 0..cap {
        for j in 0..cap {
            for k in 0..cap {
                if i != j && j != k && i != k {
                    triples.push((i, j, k));
                }
            }
        }
    }
    for t in 0..AXIOM_TRIPLES {
        let base = np + 3 * t;
        triples.push((base, base + 1, base + 2));
        if np > 0 {
            triples.push((t % np, base, base + 1));
        }
    }
    for &(i, j, k) in &triples {
        let (a, b, cc) = (&pool[i], &pool[j], &pool[k]);
        let (ac, ab, bc) = (d(a, cc), d(a, b), d(b, cc));
        if ac > ab + bc + slack {
            return Err(Error::MetricAxiom {
                axiom: "triangle",
                detail: format!("d(a,c) = {ac} > {ab} + {bc} at {}", states_json(&[a, b, cc])),
            });
        }
    }
    let accepted = hoelder.is_some() && hoelder_fail.is_none();
    let report = ValidationReport {
        pairs_checked: pairs.len(),
        triples_checked: triples.len(),
        hoelder_declared: hoelder,
        hoelder_accepted: accepted,
        hoelder_counterexample: hoelder_fail,
        max_observed_distance: max_seen,
    };
    let mut spec = MetricSpec::new(
        name,
        evaluator,
        diameter,
        if accepted { hoelder } else { None },
        None,
        Some(dims),
    );
    spec.validation = Some(report);
    Ok(spec)
}

/// The railway example, validated with its family members as probes.
pub fn sncf_metric(hoelder: Option<Hoelder>) -> Result<MetricSpec> {
    plugin_metric(
        "sncf",
        Arc::new(Sncf),
        vec![2],
        Diameter { value: 4.0, exact: true },
        hoelder,
        &Sncf::probes(50),
        0,
    )
}

/// Contents of a plug-in file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluginConfig {
    pub kind: String,
    #[serde(default)]
    pub diameter: Option<f64>,
    #[serde(default)]
    pub diameter_exact: Option<bool>,
    #[serde(default)]
    pub hoelder: Option<Hoelder>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl PluginConfig {
    /// Build and validate the metric on `dims`.
    pub fn build(&self, dims: &[usize]) -> Result<MetricSpec> {
        let sqrt2 = std::f64::consts::SQRT_2;
        let (ev, diam, hoelder, probes): (Arc<dyn PureMetric>, Diameter, Option<Hoelder>, Vec<PureState>) =
            match self.kind.as_str() {
                "trace" => (Arc::new(TraceMetric), Diameter { value: 1.0, exact: true }, Some(Hoelder { c: sqrt2, alpha: 1.0 }), vec![]),
                "fubini_study" => (
                    Arc::new(FubiniStudy),
                    Diameter { value: std::f64::consts::FRAC_PI_2, exact: true },
                    Some(Hoelder { c: sqrt2, alpha: 1.0 }),
                    vec![],
                ),
                "sncf" => {
                    if dims != [2] {
                        return Err(Error::validation("metric_dims", format!("sncf is a qubit metric, got {dims:?}")));
                    }
                    (Arc::new(Sncf), Diameter { value: 4.0, exact: true }, Some(Hoelder { c: sqrt2, alpha: 1.0 }), Sncf::probes(50))
                }
                other => return Err(Error::Parse(format!("unknown plugin kind {other:?}"))),
            };
        let diam = Diameter {
            value: self.diameter.unwrap_or(diam.value),
            exact: self.diameter_exact.unwrap_or(self.diameter.is_none() && diam.exact),
        };
        let hoelder = match self.hoelder {
            Some(h) => Some(Hoelder::new(h.c, h.alpha)?),
            None => hoelder,
        };
        plugin_metric(&format!("plugin:{}", self.kind), ev, dims.to_vec(), diam, hoelder, &probes, self.seed.unwrap_or(0))
    }
}

pub fn load_plugin(path: &Path, dims: &[usize]) -> Result<MetricSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let cfg: PluginConfig =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    cfg.build(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::trace_metric;

    struct Lopsided;
    impl PureMetric for Lopsided {
        fn name(&self) -> String {
            "lopsided".into()
        }
        fn distance(&self, a: &PureState, b: &PureState) -> f64 {
            let t = (1.0 - a.overlap(b).norm_sqr()).max(0.0).sqrt();
            t * (1.0 + 0.5 * a.amplitudes()[0].norm())
        }
    }

    #[test]
    fn sncf_accepted_but_hoelder_fails() {
        let m = sncf_metric(Some(Hoelder { c: std::f64::consts::SQRT_2, alpha: 1.0 })).unwrap();
        let rep = m.validation.as_ref().unwrap();
        assert!(!rep.hoelder_accepted);
        assert!(rep.hoelder_counterexample.is_some());
        assert!(m.hoelder.is_none());
        let weak = sncf_metric(Some(Hoelder { c: 1.5, alpha: 0.5 })).unwrap();
        assert!(weak.hoelder.is_none());
    }

    #[test]
    fn sncf_family_values() {
        let p = Sncf::probes(5);
        let s = Sncf;
        assert_eq!(s.f(&p[0]), 0.0);
        assert!((s.f(&p[1]) - 0.5).abs() < 1e-12);
        assert!((s.f(&p[8]) - 0.2).abs() < 1e-12);
        assert!((s.distance(&p[0], &p[7]) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_evaluator_rejected() {
        let err = plugin_metric("lop", Arc::new(Lopsided), vec![2], Diameter { value: 2.0, exact: false }, None, &[], 1)
            .unwrap_err();
        assert!(matches!(err, Error::MetricAxiom { axiom: "symmetry", .. }), "{err}");
    }

    #[test]
    fn reregistered_trace_agrees() {
        let cfg = PluginConfig { kind: "trace".into(), diameter: None, diameter_exact: None, hoelder: None, seed: None };
        let p = cfg.build(&[3]).unwrap();
        assert!(p.hoelder.is_some());
        let t = trace_metric(&[3]).unwrap();
        let mut r = rng::rng(1);
        for _ in 0..10 {
            let a = haar_pure(&[3], &mut r).unwrap();
            let b = haar_pure(&[3], &mut r).unwrap();
            assert_eq!(p.distance(&a, &b), t.distance(&a, &b));
        }
    }

    #[test]
    fn fubini_study_validates() {
        let cfg: PluginConfig = serde_json::from_str(r#"{"kind":"fubini_study"}"#).unwrap();
        let m = cfg.build(&[2, 2]).unwrap();
        assert!(m.hoelder.is_some());
        assert!(serde_json::from_str::<PluginConfig>(r#"{"kind":"x","bogus":1}"#).is_err());
    }
}
