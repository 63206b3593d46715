// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Transport plans between density operators and the `W_p` estimators.
//!
//! A plan is a finite list of triples `(q_j, ψ_j, φ_j)` with
//! `Σ q_j |ψ_j><ψ_j| = ρ` and `Σ q_j |φ_j><φ_j| = σ`. Its order-`p` cost is
//! `Σ q_j d(ψ_j, φ_j)^p`; `W_p` is the infimum of the cost to the power `1/p`.
//! The estimators return brackets: a certified lower bound and the cost of
//! the best plan found.

mod estimate;
mod reduce;
mod schmidt;
mod search;
mod seed;

pub use estimate::{common_part_upper, estimate_winf, estimate_wp, DistanceBracket};
pub use reduce::reduce_plan;
pub use schmidt::schmidt_flatten;
pub use search::{Decomposition, SearchBudget};
pub use seed::{chord_plan, spectral_seed, spectral_seeds};

use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::metrics::MetricSpec;
use crate::rng::Rng;
use crate::states::random::haar_pure;
use crate::states::io::{pure_from_json, pure_to_json, VectorJson};
use crate::states::linalg::{frobenius, CMat};
use crate::states::{DensityOperator, PureState};
use rand::Rng as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::path::Path;

/// Marginal tolerance for plans, in Frobenius norm.
pub const MARGINAL_TOL: f64 = 1e-8;
/// Tolerance on the total weight of a plan.
pub const MASS_TOL: f64 = 1e-10;

/// Transport order `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Order::Infinity)
        } else if p >= 1.0 && p.is_finite() {
            Ok(Order::Finite(p))
        } else {
            Err(Error::validation("order_at_least_one", format!("p = {p}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Order::Finite(p) => p,
            Order::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(p) => write!(f, "{p}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Order {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Order::Infinity),
            t => Order::new(t.parse().map_err(|_| Error::Parse(format!("order {t:?}")))?),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(p) => s.serialize_f64(*p),
            Order::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Order::new(p).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One triple of a plan.
#[derive(Clone, Debug)]
pub struct PlanEntry {
    pub q: f64,
    pub psi: PureState,
    pub phi: PureState,
}

/// Weighted pure-state pairs of total mass one.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    entries: Vec<PlanEntry>,
}

/// Weighted pure-state pairs of total mass at most one.
#[derive(Clone, Debug)]
pub struct PartialTransportPlan {
    entries: Vec<PlanEntry>,
}

fn check_entries(entries: &[PlanEntry]) -> Result<f64> {
    let first = entries.first().ok_or_else(|| Error::validation("nonempty_plan", "no entries"))?;
    let dims = first.psi.dims();
    let mut mass = 0.0;
    for (j, e) in entries.iter().enumerate() {
        if !(e.q > 0.0) || !e.q.is_finite() {
            return Err(Error::validation("positive_weights", format!("entry {j}: q = {}", e.q)));
        }
        if e.psi.dims() != dims || e.phi.dims() != dims {
            return Err(Error::validation("dimension_match", format!("entry {j}")));
        }
        mass += e.q;
    }
    Ok(mass)
}

/// Merge entries whose pairs coincide as rays.
fn merge_duplicates(entries: Vec<PlanEntry>) -> Vec<PlanEntry> {
    let mut out: Vec<PlanEntry> = Vec::with_capacity(entries.len());
    for e in entries {
        match out.iter_mut().find(|o| o.psi.same_ray(&e.psi, 1e-12) && o.phi.same_ray(&e.phi, 1e-12)) {
            Some(o) => o.q += e.q,
            None => out.push(e),
        }
    }
    out
}

fn marginal(entries: &[PlanEntry], side: impl Fn(&PlanEntry) -> &PureState) -> CMat {
    let d = entries[0].psi.dim();
    let mut m = CMat::zeros(d, d);
    for e in entries {
        let v = side(e).amplitudes();
        m.gerc(crate::states::linalg::c(e.q, 0.0), v, v, crate::states::linalg::ONE);
    }
    m
}

fn cost_of(entries: &[PlanEntry], metric: &MetricSpec, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::validation("order_at_least_one", format!("p = {p}")));
    }
    metric.check_dims(entries[0].psi.dims())?;
    Ok(entries.iter().map(|e| e.q * metric.distance(&e.psi, &e.phi).powf(p)).sum())
}

fn cost_inf_of(entries: &[PlanEntry], metric: &MetricSpec) -> Result<f64> {
    metric.check_dims(entries[0].psi.dims())?;
    Ok(entries.iter().map(|e| metric.distance(&e.psi, &e.phi)).fold(0.0, f64::max))
}

impl TransportPlan {
    /// Validate weights and merge duplicate pairs.
    pub fn new(entries: Vec<PlanEntry>) -> Result<Self> {
        let mass = check_entries(&entries)?;
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::validation("unit_mass", format!("Σ q = {mass}")));
        }
        Ok(TransportPlan { entries: merge_duplicates(entries) })
    }

    /// Build from weights that sum to one up to round-off; renormalizes and
    /// drops entries below the weight floor.
    pub(crate) fn from_weights(entries: Vec<PlanEntry>) -> Result<Self> {
        let floor = tolerances().plan_weight_floor;
        let mut entries: Vec<PlanEntry> = entries.into_iter().filter(|e| e.q > floor).collect();
        let mass: f64 = entries.iter().map(|e| e.q).sum();
        for e in &mut entries {
            e.q /= mass;
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.entries[0].psi.dims()
    }

    pub fn source_marginal(&self) -> CMat {
        marginal(&self.entries, |e| &e.psi)
    }

    pub fn target_marginal(&self) -> CMat {
        marginal(&self.entries, |e| &e.phi)
    }

    /// Largest Frobenius deviation of the two marginals from `(ρ, σ)`.
    pub fn marginal_error(&self, rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
        let a = frobenius(&(self.source_marginal() - rho.matrix()));
        let b = frobenius(&(self.target_marginal() - sigma.matrix()));
        a.max(b)
    }

    /// Fail unless the plan couples `ρ` and `σ`.
    pub fn check_marginals(&self, rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
        if rho.dims() != self.dims() || sigma.dims() != self.dims() {
            return Err(Error::validation("dimension_match", "plan and states"));
        }
        let err = self.marginal_error(rho, sigma);
        if err > MARGINAL_TOL {
            return Err(Error::validation("plan_marginals", format!("deviation {err:e}")));
        }
        Ok(())
    }

    /// `r_1 Q_1 ∪ r_2 Q_2 ∪ …`, with duplicate pairs merged.
    pub fn mixture(parts: &[(f64, &TransportPlan)]) -> Result<Self> {
        let entries = parts
            .iter()
            .flat_map(|(r, q)| {
                q.entries.iter().map(move |e| PlanEntry { q: r * e.q, psi: e.psi.clone(), phi: e.phi.clone() })
            })
            .collect();
        Self::new(entries)
    }

    /// Swap source and target.
    pub fn reversed(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| PlanEntry { q: e.q, psi: e.phi.clone(), phi: e.psi.clone() })
            .collect();
        TransportPlan { entries }
    }

    pub fn to_json(&self) -> PlanJson {
        entries_to_json(&self.entries)
    }

    pub fn from_json(j: &PlanJson) -> Result<Self> {
        Self::new(entries_from_json(j)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let j: PlanJson = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&j)
    }
}

impl PartialTransportPlan {
    pub fn new(entries: Vec<PlanEntry>) -> Result<Self> {
        let mass = check_entries(&entries)?;
        if mass > 1.0 + MASS_TOL {
            return Err(Error::validation("mass_at_most_one", format!("Σ q = {mass}")));
        }
        Ok(PartialTransportPlan { entries: merge_duplicates(entries) })
    }

    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.entries.iter().map(|e| e.q).sum()
    }

    pub fn source_marginal(&self) -> CMat {
        marginal(&self.entries, |e| &e.psi)
    }

    pub fn target_marginal(&self) -> CMat {
        marginal(&self.entries, |e| &e.phi)
    }

    pub fn cost(&self, metric: &MetricSpec, p: f64) -> Result<f64> {
        cost_of(&self.entries, metric, p)
    }

    /// Promote to a full plan when the mass is one.
    pub fn into_plan(self) -> Result<TransportPlan> {
        TransportPlan::new(self.entries)
    }
}

/// `Σ q_j d(ψ_j, φ_j)^p` for finite `p ≥ 1`.
pub fn plan_cost(plan: &TransportPlan, metric: &MetricSpec, p: f64) -> Result<f64> {
    cost_of(&plan.entries, metric, p)
}

/// `max_j d(ψ_j, φ_j)`.
pub fn plan_cost_inf(plan: &TransportPlan, metric: &MetricSpec) -> Result<f64> {
    cost_inf_of(&plan.entries, metric)
}

/// `T_p^{1/p}` for finite orders, the bottleneck for `p = ∞`.
pub fn plan_value(plan: &TransportPlan, metric: &MetricSpec, order: Order) -> Result<f64> {
    match order {
        Order::Finite(p) => Ok(plan_cost(plan, metric, p)?.max(0.0).powf(1.0 / p)),
        Order::Infinity => plan_cost_inf(plan, metric),
    }
}

/// Identity plan on the spectral decomposition of `ρ`.
pub fn identity_plan(rho: &DensityOperator) -> Result<TransportPlan> {
    let spec = rho.spectrum()?;
    let cutoff = tolerances().rank_cutoff;
    let mut entries = Vec::new();
    for k in 0..spec.dim() {
        if spec.values[k] > cutoff {
            let v = PureState::normalized(spec.vector(k), rho.dims().to_vec())?;
            entries.push(PlanEntry { q: spec.values[k], psi: v.clone(), phi: v });
        }
    }
    TransportPlan::from_weights(entries)
}

/// Plan with `n` Haar-random pairs and uniform-random weights, normalized.
pub fn random_plan(dims: &[usize], n: usize, rng: &mut Rng) -> Result<TransportPlan> {
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        let q = rng.gen::<f64>() + 1e-3;
        entries.push(PlanEntry { q, psi: haar_pure(dims, rng)?, phi: haar_pure(dims, rng)? });
    }
    let mass: f64 = entries.iter().map(|e| e.q).sum();
    entries.iter_mut().for_each(|e| e.q /= mass);
    TransportPlan::new(entries)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntryJson {
    pub q: f64,
    pub psi: VectorJson,
    pub phi: VectorJson,
}

/// `{ "entries": [ { "q": w, "psi": {...}, "phi": {...} } ] }`
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanJson {
    pub entries: Vec<PlanEntryJson>,
}

fn entries_to_json(entries: &[PlanEntry]) -> PlanJson {
    PlanJson {
        entries: entries
            .iter()
            .map(|e| PlanEntryJson { q: e.q, psi: pure_to_json(&e.psi), phi: pure_to_json(&e.phi) })
            .collect(),
    }
}

fn entries_from_json(j: &PlanJson) -> Result<Vec<PlanEntry>> {
    j.entries
        .iter()
        .map(|e| Ok(PlanEntry { q: e.q, psi: pure_from_json(&e.psi)?, phi: pure_from_json(&e.phi)? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{hamming_metric, trace_metric};
    use crate::states::linalg::c;
    use crate::states::random::haar_pure_seeded;
    use crate::states::CVec;

    fn ket(v: &[f64], dims: &[usize]) -> PureState {
        PureState::normalized(CVec::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))), dims.to_vec()).unwrap()
    }

    #[test]
    fn identity_plan_costs_zero() {
        let rho = crate::states::random_mixed(&[3], 3, 4).unwrap();
        let q = identity_plan(&rho).unwrap();
        q.check_marginals(&rho, &rho).unwrap();
        assert_eq!(plan_cost(&q, &trace_metric(&[3]).unwrap(), 1.0).unwrap(), 0.0);
        assert_eq!(plan_cost_inf(&q, &trace_metric(&[3]).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn single_entry_cost() {
        let a = haar_pure_seeded(&[2], 1).unwrap();
        let b = haar_pure_seeded(&[2], 2).unwrap();
        let m = trace_metric(&[2]).unwrap();
        let q = TransportPlan::new(vec![PlanEntry { q: 1.0, psi: a.clone(), phi: b.clone() }]).unwrap();
        let d = m.distance(&a, &b);
        assert!((plan_cost(&q, &m, 2.0).unwrap() - d * d).abs() < 1e-15);
        assert_eq!(plan_cost_inf(&q, &m).unwrap(), d);
    }

    #[test]
    fn bell_shortcut_plan() {
        let dims = [2, 2];
        let h = hamming_metric(2, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = ket(&[1.0, 0.0, 0.0, 0.0], &dims);
        let bells = [[s, 0.0, 0.0, s], [s, 0.0, 0.0, -s], [0.0, s, s, 0.0], [0.0, s, -s, 0.0]];
        let entries =
            bells.iter().map(|b| PlanEntry { q: 0.25, psi: zero.clone(), phi: ket(b, &dims) }).collect();
        let q = TransportPlan::new(entries).unwrap();
        let rho = DensityOperator::from_pure(&zero);
        let sigma = DensityOperator::maximally_mixed(dims.to_vec()).unwrap();
        q.check_marginals(&rho, &sigma).unwrap();
        let v1 = h.distance(&zero, &ket(&bells[0], &dims));
        let v2 = h.distance(&zero, &ket(&bells[2], &dims));
        assert!(v1 <= 2f64.sqrt() + 1e-9 && v2 <= (5f64.sqrt() + 3.0) / 4.0 + 1e-9);
        let t1 = plan_cost(&q, &h, 1.0).unwrap();
        assert!((t1 - 0.25 * (2.0 * v1 + 2.0 * v2)).abs() < 1e-9);
        assert!(plan_cost_inf(&q, &h).unwrap() <= 2f64.sqrt() + 1e-9);
    }

    #[test]
    fn duplicates_merge_and_json_round_trip() {
        let a = haar_pure_seeded(&[2], 3).unwrap();
        let b = haar_pure_seeded(&[2], 4).unwrap();
        let rotated = PureState::new(b.amplitudes() * c(0.0, 1.0), vec![2]).unwrap();
        let q = TransportPlan::new(vec![
            PlanEntry { q: 0.5, psi: a.clone(), phi: b.clone() },
            PlanEntry { q: 0.5, psi: a.clone(), phi: rotated },
        ])
        .unwrap();
        assert_eq!(q.len(), 1);
        let text = serde_json::to_string(&q.to_json()).unwrap();
        let back = TransportPlan::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!((back.entries()[0].q - 1.0).abs() < 1e-15);
        assert!(TransportPlan::new(vec![PlanEntry { q: 0.4, psi: a.clone(), phi: b.clone() }]).is_err());
        assert!(PartialTransportPlan::new(vec![PlanEntry { q: 0.4, psi: a, phi: b }]).is_ok());
    }

    #[test]
    fn mixture_cost_is_linear() {
        let m = trace_metric(&[2]).unwrap();
        let mk = |s: u64| {
            let a = haar_pure_seeded(&[2], s).unwrap();
            let b = haar_pure_seeded(&[2], s + 100).unwrap();
            TransportPlan::new(vec![PlanEntry { q: 1.0, psi: a, phi: b }]).unwrap()
        };
        let (q1, q2) = (mk(1), mk(2));
        let mix = TransportPlan::mixture(&[(0.3, &q1), (0.7, &q2)]).unwrap();
        let lhs = plan_cost(&mix, &m, 1.0).unwrap();
        let rhs = 0.3 * plan_cost(&q1, &m, 1.0).unwrap() + 0.7 * plan_cost(&q2, &m, 1.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn order_parsing() {
        assert_eq!("inf".parse::<Order>().unwrap(), Order::Infinity);
        assert_eq!("2".parse::<Order>().unwrap(), Order::Finite(2.0));
        assert!("0.5".parse::<Order>().is_err());
        let o: Order = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(o, Order::Infinity);
    }
}
