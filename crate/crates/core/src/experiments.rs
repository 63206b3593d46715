// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Random-state ensembles and the finite-size checks run on them.
//!
//! Mixed states are reduced states of Haar-random vectors on `H ⊗ A` with
//! `dim A = s = round(d^{c n})`. All logarithms are natural. Trials draw
//! their seeds from `(seed, trial)` and are summed in trial order, so a
//! record depends only on its configuration.

use crate::channels::{hypercontractivity_check, threshold_delta, HyperStatus, NoiseChannel};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::metrics::{metric_from_name, MetricSpec};
use crate::norms::{w1h_norm, TracelessHermitian, MAX_W1H_DIM};
use crate::rng::{child_rng, derive};
use crate::states::random::random_mixed;
use crate::states::{op_norm, trace_norm, von_neumann_entropy, DensityOperator, PureState};
use crate::transport::{common_part_upper, plan_cost, random_plan, Order, PlanEntry, TransportPlan};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;

/// Largest site count for the W1H-based low-rank experiment.
pub const MAX_LOW_RANK_SITES: usize = 3;
/// Largest auxiliary dimension sampled.
pub const MAX_AUX_DIM: usize = 1 << 16;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub d_local: usize,
    pub n: usize,
    /// Qudit ratio `c ≥ 0`.
    pub c: f64,
    pub trials: usize,
    pub seed: u64,
    pub metric: String,
    pub order: Order,
    /// Tail grid for [`run_high_rank`].
    pub betas: Vec<f64>,
    pub exec: ExecMode,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            d_local: 2,
            n: 2,
            c: 0.0,
            trials: 100,
            seed: 0,
            metric: "hamming:2,2".into(),
            order: Order::Finite(1.0),
            betas: vec![2.0, 4.0, 8.0],
            exec: ExecMode::default(),
        }
    }
}

impl EnsembleConfig {
    pub fn dims(&self) -> Vec<usize> {
        vec![self.d_local; self.n]
    }

    /// Unrounded `d^{c n}`.
    pub fn aux_dim_exact(&self) -> f64 {
        (self.d_local as f64).powf(self.c * self.n as f64)
    }

    /// `s = round(d^{c n})`, at least one.
    pub fn aux_dim(&self) -> usize {
        (self.aux_dim_exact().round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_local < 2 || self.n < 1 {
            return Err(Error::validation("ensemble_shape", format!("d = {}, n = {}", self.d_local, self.n)));
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return Err(Error::validation("qudit_ratio_nonnegative", format!("c = {}", self.c)));
        }
        if self.trials == 0 {
            return Err(Error::validation("trials_positive", "trials = 0"));
        }
        if self.aux_dim_exact() > MAX_AUX_DIM as f64 {
            return Err(Error::Capacity(format!("auxiliary dimension {} exceeds {MAX_AUX_DIM}", self.aux_dim_exact())));
        }
        Ok(())
    }

    fn sample(&self, trial: usize, which: u64) -> Result<DensityOperator> {
        random_mixed(&self.dims(), self.aux_dim(), derive(self.seed, 2 * trial as u64 + which))
    }
}

/// Per-trial table plus summary and configuration echo.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: BTreeMap<String, Value>,
    pub config: Value,
    pub version: String,
}

impl ExperimentRecord {
    fn new(experiment: &str, columns: &[&str], rows: Vec<Vec<f64>>, config: Value) -> Self {
        ExperimentRecord {
            experiment: experiment.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows,
            summary: BTreeMap::new(),
            config,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    /// CSV with a header row; values at 12 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|&x| format_sig(x))).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Round to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Shortest decimal form of `round_sig(x)`.
pub fn format_sig(x: f64) -> String {
    let r = round_sig(x);
    if r.is_finite() && r == r.trunc() && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_err(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64 / v.len() as f64).sqrt()
}

/// Binary entropy in nats.
pub fn binary_entropy(x: f64) -> f64 {
    let h = |t: f64| if t > 0.0 { -t * t.ln() } else { 0.0 };
    h(x) + h(1.0 - x)
}

/// Unique `λ ∈ [0, 1]` with `(1 - c) ln d = h₂(λ) + λ ln(d² - 1)`.
///
/// The right side increases on `[0, (d² - 1)/d²]` from `0` to `2 ln d`,
/// so for `0 ≤ c < 1` the root lies in that interval.
pub fn lambda_c(d: usize, c: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::validation("local_dim_at_least_two", format!("d = {d}")));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::validation("qudit_ratio_below_one", format!("c = {c}; the bound is vacuous for c ≥ 1")));
    }
    let k = ((d * d - 1) as f64).ln();
    let target = (1.0 - c) * (d as f64).ln();
    let g = |l: f64| binary_entropy(l) + l * k;
    let (mut lo, mut hi) = (0.0, ((d * d - 1) as f64) / (d * d) as f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// W1H norms of `ρ - I/dⁿ` and `ρ - σ` for i.i.d. low-rank states.
pub fn run_low_rank(cfg: &EnsembleConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let dims = cfg.dims();
    let dim: usize = dims.iter().product();
    if cfg.n > MAX_LOW_RANK_SITES || dim > MAX_W1H_DIM {
        return Err(Error::Capacity(format!(
            "low-rank experiment needs n <= {MAX_LOW_RANK_SITES} and d^n <= {MAX_W1H_DIM}; got d = {}, n = {}",
            cfg.d_local, cfg.n
        )));
    }
    let lam = lambda_c(cfg.d_local, cfg.c)?;
    let mixed = DensityOperator::maximally_mixed(dims.clone())?;
    let rows = cfg.exec.try_map(cfg.trials, |t| -> Result<Vec<f64>> {
        let rho = cfg.sample(t, 0)?;
        let sigma = cfg.sample(t, 1)?;
        let to_mixed = w1h_norm(&TracelessHermitian::difference(&rho, &mixed)?)?.value;
        let pair = w1h_norm(&TracelessHermitian::difference(&rho, &sigma)?)?.value;
        Ok(vec![t as f64, to_mixed, pair])
    })?;
    let mut rec = ExperimentRecord::new(
        "low_rank",
        &["trial", "w1h_rho_vs_mixed", "w1h_rho_vs_sigma"],
        rows,
        serde_json::to_value(cfg)?,
    );
    let to_mixed = rec.column("w1h_rho_vs_mixed").expect("column");
    let pair = rec.column("w1h_rho_vs_sigma").expect("column");
    let bound = lam * cfg.n as f64;
    let s = &mut rec.summary;
    s.insert("lambda_c".into(), json!(lam));
    s.insert("bound".into(), json!(bound));
    s.insert("aux_dim".into(), json!(cfg.aux_dim()));
    s.insert("aux_dim_exact".into(), json!(cfg.aux_dim_exact()));
    s.insert("mean_rho_vs_mixed".into(), json!(mean(&to_mixed)));
    s.insert("mean_rho_vs_sigma".into(), json!(mean(&pair)));
    s.insert("stderr_rho_vs_sigma".into(), json!(std_err(&pair)));
    s.insert("min_rho_vs_mixed".into(), json!(to_mixed.iter().cloned().fold(f64::INFINITY, f64::min)));
    s.insert("mean_above_bound".into(), json!(mean(&pair) >= bound));
    Ok(rec)
}

/// Entropies, deviations from `I/D` and the common-part upper bound for
/// i.i.d. high-rank pairs, with tail frequencies against `1/β²`.
pub fn run_high_rank(cfg: &EnsembleConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let dims = cfg.dims();
    let metric = metric_from_name(&cfg.metric, &dims)?;
    let dim: usize = dims.iter().product();
    let mixed = DensityOperator::maximally_mixed(dims.clone())?;
    let max_entropy = (dim as f64).ln();
    let rows = cfg.exec.try_map(cfg.trials, |t| -> Result<Vec<f64>> {
        let rho = cfg.sample(t, 0)?;
        let sigma = cfg.sample(t, 1)?;
        let entropy = von_neumann_entropy(&rho)?;
        let dev = rho.matrix() - mixed.matrix();
        let dev1 = trace_norm(&dev)?;
        let devinf = op_norm(&dev)?;
        // Relative entropy to I/D minus the Pinsker floor.
        let pinsker_slack = (max_entropy - entropy) - 0.5 * dev1 * dev1;
        let upper = common_part_upper(&rho, &sigma, &metric, cfg.order)?;
        Ok(vec![t as f64, entropy, dev1, devinf, pinsker_slack, upper])
    })?;
    let mut rec = ExperimentRecord::new(
        "high_rank",
        &["trial", "entropy", "dev_trace", "dev_op", "pinsker_slack", "w_upper"],
        rows,
        serde_json::to_value(cfg)?,
    );
    let upper = rec.column("w_upper").expect("column");
    let entropy = rec.column("entropy").expect("column");
    let pinsker = rec.column("pinsker_slack").expect("column");
    let (d, n, c) = (cfg.d_local as f64, cfg.n as f64, cfg.c);
    let diam = metric.diameter.value;
    let scale = d.powf(-(c - 3.0) * n / 2.0) * diam;
    let tails: Vec<Value> = cfg
        .betas
        .iter()
        .map(|&b| {
            let hits = upper.iter().filter(|&&u| u >= b * scale).count();
            let freq = hits as f64 / upper.len() as f64;
            json!({ "beta": b, "threshold": b * scale, "frequency": freq, "bound": 1.0 / (b * b), "within": freq <= 1.0 / (b * b) })
        })
        .collect();
    let s = &mut rec.summary;
    s.insert("aux_dim".into(), json!(cfg.aux_dim()));
    s.insert("aux_dim_exact".into(), json!(cfg.aux_dim_exact()));
    s.insert("diameter".into(), json!(diam));
    s.insert("tail_scale".into(), json!(scale));
    s.insert("tails".into(), Value::Array(tails));
    s.insert("mean_entropy".into(), json!(mean(&entropy)));
    s.insert("stderr_entropy".into(), json!(std_err(&entropy)));
    s.insert("page_bound".into(), json!(n * d.ln() - 0.5 * d.powf(-(c - 1.0) * n)));
    s.insert("mean_w_upper".into(), json!(mean(&upper)));
    s.insert("min_pinsker_slack".into(), json!(pinsker.into_iter().fold(f64::INFINITY, f64::min)));
    Ok(rec)
}

/// Noise kind for [`run_hypercontractivity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Depolarizing,
    /// Replacement by `|0…0>`.
    Replacement,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperConfig {
    pub metric: String,
    pub dims: Vec<usize>,
    pub p1: f64,
    pub p2: f64,
    /// Fixed `δ`; `None` uses the threshold of each plan.
    pub delta: Option<f64>,
    pub noise: NoiseKind,
    pub plan_entries: usize,
    pub trials: usize,
    pub seed: u64,
    pub exec: ExecMode,
}

impl Default for HyperConfig {
    fn default() -> Self {
        HyperConfig {
            metric: "hamming:2,2".into(),
            dims: vec![2, 2],
            p1: 1.0,
            p2: 2.0,
            delta: None,
            noise: NoiseKind::Depolarizing,
            plan_entries: 6,
            trials: 100,
            seed: 0,
            exec: ExecMode::default(),
        }
    }
}

/// Plan-level hypercontractivity on random plans.
pub fn run_hypercontractivity(cfg: &HyperConfig) -> Result<ExperimentRecord> {
    if cfg.trials == 0 || cfg.plan_entries == 0 {
        return Err(Error::validation("trials_positive", "trials and plan_entries must be positive"));
    }
    let metric = metric_from_name(&cfg.metric, &cfg.dims)?;
    let rows = cfg.exec.try_map(cfg.trials, |t| -> Result<Vec<f64>> {
        let mut r = child_rng(cfg.seed, t as u64);
        let plan = random_plan(&cfg.dims, cfg.plan_entries, &mut r)?;
        let m = plan_cost(&plan, &metric, cfg.p1)?.max(0.0).powf(1.0 / cfg.p1);
        let delta = cfg.delta.unwrap_or_else(|| threshold_delta(m, metric.diameter.value, cfg.p1, cfg.p2));
        let channel = match cfg.noise {
            NoiseKind::Depolarizing => NoiseChannel::depolarizing(delta, cfg.dims.clone())?,
            NoiseKind::Replacement => NoiseChannel::replacement(delta, PureState::basis(cfg.dims.clone(), 0)?)?,
        };
        let rep = hypercontractivity_check(&plan, &metric, cfg.p1, cfg.p2, &channel)?;
        let status = match rep.status {
            HyperStatus::Holds => 0.0,
            HyperStatus::Violated => 1.0,
            HyperStatus::ConditionUnmet => 2.0,
        };
        Ok(vec![t as f64, rep.m, rep.threshold, rep.delta, rep.lifted, rep.ratio, rep.ratio_floor, status])
    })?;
    let mut rec = ExperimentRecord::new(
        "hypercontractivity",
        &["trial", "m", "threshold", "delta", "lifted", "ratio", "ratio_floor", "status"],
        rows,
        serde_json::to_value(cfg)?,
    );
    let status = rec.column("status").expect("column");
    let count = |v: f64| status.iter().filter(|&&s| s == v).count();
    let ratio_violations = rec.rows.iter().filter(|r| r[5] < r[6] - 1e-12).count();
    let (holds, violated, unmet) = (count(0.0), count(1.0), count(2.0));
    let s = &mut rec.summary;
    s.insert("holds".into(), json!(holds));
    s.insert("violations".into(), json!(violated));
    s.insert("condition_unmet".into(), json!(unmet));
    s.insert("ratio_violations".into(), json!(ratio_violations));
    s.insert("status_codes".into(), json!("0 holds, 1 violated, 2 condition unmet (no claim)"));
    Ok(rec)
}

/// Expected `d^p` of a classical-quantum source `{(p_i, ψ_i, φ_i)}`;
/// the maximum distance for `p = ∞`.
pub fn cq_moment(source: &[(f64, PureState, PureState)], metric: &MetricSpec, order: Order) -> Result<f64> {
    let total: f64 = source.iter().map(|s| s.0).sum();
    if source.is_empty() || (total - 1.0).abs() > 1e-10 || source.iter().any(|s| !(s.0 >= 0.0)) {
        return Err(Error::validation("weights_sum_to_one", format!("Σ p = {total}")));
    }
    metric.check_dims(source[0].1.dims())?;
    let live = source.iter().filter(|s| s.0 > 0.0);
    Ok(match order {
        Order::Finite(p) => live.map(|(w, a, b)| w * metric.distance(a, b).powf(p)).sum(),
        Order::Infinity => live.map(|(_, a, b)| metric.distance(a, b)).fold(0.0, f64::max),
    })
}

/// Average states `(ρ, σ)` of a classical-quantum source, as a plan.
pub fn cq_plan(source: &[(f64, PureState, PureState)]) -> Result<TransportPlan> {
    TransportPlan::new(
        source
            .iter()
            .filter(|s| s.0 > 0.0)
            .map(|(q, a, b)| PlanEntry { q: *q, psi: a.clone(), phi: b.clone() })
            .collect(),
    )
}
