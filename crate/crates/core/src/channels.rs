// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Noise channels acting on states and on transport plans.
//!
//! Replacement and depolarizing channels mix the identity with a fixed
//! output. Lifting a plan through them scales the old entries by `1 - δ`
//! and adds zero-cost diagonal entries. Mixed-unitary channels lift entry
//! by entry, which preserves the plan cost exactly.
//!
//! [`hypercontractivity_check`] works at plan level: with `M = T_{p1}(Q)^{1/p1}`
//! and `1 - δ ≤ (M / diam)^{p2 - p1}`, the lifted plan satisfies
//! `T_{p2}(Q')^{1/p2} ≤ M`. Both sides are computed exactly from the plan,
//! so no claim about the optimal distances is made.

use crate::error::{Error, Result};
use crate::metrics::MetricSpec;
use crate::states::linalg::{c, identity, CMat};
use crate::states::{DensityOperator, PureState};
use crate::transport::{plan_cost, PlanEntry, TransportPlan};
use serde::Serialize;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum NoiseChannel {
    /// `ρ ↦ (1 - δ) ρ + δ |x><x|`.
    Replacement { delta: f64, target: PureState },
    /// `ρ ↦ (1 - δ) ρ + δ I / D`.
    Depolarizing { delta: f64, dims: Vec<usize> },
    /// `ρ ↦ Σ_k a_k U_k ρ U_k†`.
    MixedUnitary { terms: Vec<(f64, CMat)>, dims: Vec<usize> },
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::validation("delta_in_unit_interval", format!("δ = {delta}")));
    }
    Ok(())
}

impl NoiseChannel {
    pub fn replacement(delta: f64, target: PureState) -> Result<Self> {
        check_delta(delta)?;
        Ok(NoiseChannel::Replacement { delta, target })
    }

    pub fn depolarizing(delta: f64, dims: Vec<usize>) -> Result<Self> {
        check_delta(delta)?;
        Ok(NoiseChannel::Depolarizing { delta, dims })
    }

    pub fn mixed_unitary(terms: Vec<(f64, CMat)>, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if terms.is_empty() {
            return Err(Error::validation("nonempty_mixture", "no unitaries"));
        }
        let mut total = 0.0;
        for (k, (a, u)) in terms.iter().enumerate() {
            if !(*a >= 0.0) {
                return Err(Error::validation("nonnegative_weights", format!("term {k}: a = {a}")));
            }
            if u.shape() != (d, d) {
                return Err(Error::validation("dimension_match", format!("term {k}: {:?} vs {dims:?}", u.shape())));
            }
            let defect = (u.adjoint() * u - identity(d)).norm();
            if defect > UNITARY_TOL {
                return Err(Error::validation("unitary", format!("term {k}: defect {defect:e}")));
            }
            total += a;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::validation("unit_mass", format!("Σ a = {total}")));
        }
        Ok(NoiseChannel::MixedUnitary { terms, dims })
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            NoiseChannel::Replacement { target, .. } => target.dims(),
            NoiseChannel::Depolarizing { dims, .. } | NoiseChannel::MixedUnitary { dims, .. } => dims,
        }
    }

    /// Mixing weight `δ`; `None` for mixed-unitary channels.
    pub fn delta(&self) -> Option<f64> {
        match self {
            NoiseChannel::Replacement { delta, .. } | NoiseChannel::Depolarizing { delta, .. } => Some(*delta),
            NoiseChannel::MixedUnitary { .. } => None,
        }
    }

    /// Same kind with a different `δ`.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        match self {
            NoiseChannel::Replacement { target, .. } => Self::replacement(delta, target.clone()),
            NoiseChannel::Depolarizing { dims, .. } => Self::depolarizing(delta, dims.clone()),
            NoiseChannel::MixedUnitary { .. } => Err(Error::validation("noise_kind", "mixed-unitary has no δ")),
        }
    }

    fn check(&self, dims: &[usize]) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::validation("dimension_match", format!("channel {:?} vs state {dims:?}", self.dims())));
        }
        Ok(())
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check(rho.dims())?;
        let d = rho.dim();
        let m = match self {
            NoiseChannel::Replacement { delta, target } => {
                rho.matrix() * c(1.0 - delta, 0.0) + target.projector() * c(*delta, 0.0)
            }
            NoiseChannel::Depolarizing { delta, .. } => {
                rho.matrix() * c(1.0 - delta, 0.0) + identity(d) * c(delta / d as f64, 0.0)
            }
            NoiseChannel::MixedUnitary { terms, .. } => terms
                .iter()
                .fold(CMat::zeros(d, d), |acc, (a, u)| acc + u * rho.matrix() * u.adjoint() * c(*a, 0.0)),
        };
        DensityOperator::new(m, rho.dims().to_vec())
    }

    /// Plan for `(N(ρ), N(σ))` built from a plan for `(ρ, σ)`.
    pub fn lift_plan(&self, plan: &TransportPlan) -> Result<TransportPlan> {
        self.check(plan.dims())?;
        let scaled = |f: f64| plan.entries().iter().map(move |e| PlanEntry { q: f * e.q, ..e.clone() });
        let mut entries: Vec<PlanEntry> = match self {
            NoiseChannel::Replacement { delta, target } => {
                let mut v: Vec<PlanEntry> = scaled(1.0 - delta).collect();
                v.push(PlanEntry { q: *delta, psi: target.clone(), phi: target.clone() });
                v
            }
            NoiseChannel::Depolarizing { delta, dims } => {
                let d: usize = dims.iter().product();
                let mut v: Vec<PlanEntry> = scaled(1.0 - delta).collect();
                for i in 0..d {
                    let b = PureState::basis(dims.clone(), i)?;
                    v.push(PlanEntry { q: delta / d as f64, psi: b.clone(), phi: b });
                }
                v
            }
            NoiseChannel::MixedUnitary { terms, dims } => {
                let mut v = Vec::with_capacity(terms.len() * plan.len());
                for (a, u) in terms {
                    for e in plan.entries() {
                        v.push(PlanEntry {
                            q: a * e.q,
                            psi: PureState::normalized(u * e.psi.amplitudes(), dims.clone())?,
                            phi: PureState::normalized(u * e.phi.amplitudes(), dims.clone())?,
                        });
                    }
                }
                v
            }
        };
        entries.retain(|e| e.q > 0.0);
        TransportPlan::new(entries)
    }
}

/// `δ* = 1 - (M / diam)^{p2 - p1}`, the smallest admissible mixing weight.
pub fn threshold_delta(m: f64, diameter: f64, p1: f64, p2: f64) -> f64 {
    (1.0 - (m / diameter).min(1.0).powf(p2 - p1)).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperStatus {
    /// Condition met and the inequality holds.
    Holds,
    /// Condition met but the inequality fails beyond tolerance.
    Violated,
    /// `δ` is below threshold; the result carries no claim.
    ConditionUnmet,
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperReport {
    pub delta: f64,
    pub threshold: f64,
    /// `M = T_{p1}(Q)^{1/p1}`.
    pub m: f64,
    pub diameter: f64,
    /// `T_{p2}(Q')^{1/p2}` for the lifted plan.
    pub lifted: f64,
    /// `T_{p1}(Q)^{1/p1} / T_{p2}(Q)^{1/p2}`.
    pub ratio: f64,
    /// `(M / diam)^{1 - p1/p2}`, a lower bound on `ratio`.
    pub ratio_floor: f64,
    pub status: HyperStatus,
}

/// Tolerance for the plan-level inequality.
pub const HYPER_TOL: f64 = 1e-9;

/// Plan-level check of `T_{p2}(N(Q))^{1/p2} ≤ T_{p1}(Q)^{1/p1}` for a
/// replacement or depolarizing channel `N`.
pub fn hypercontractivity_check(
    plan: &TransportPlan,
    metric: &MetricSpec,
    p1: f64,
    p2: f64,
    channel: &NoiseChannel,
) -> Result<HyperReport> {
    if !(p1 >= 1.0) || !(p2 > p1) || !p2.is_finite() {
        return Err(Error::validation("orders_increasing", format!("p1 = {p1}, p2 = {p2}")));
    }
    let delta = channel
        .delta()
        .ok_or_else(|| Error::validation("noise_kind", "replacement or depolarizing channel required"))?;
    let diameter = metric.diameter.value;
    let m = plan_cost(plan, metric, p1)?.max(0.0).powf(1.0 / p1);
    let t2 = plan_cost(plan, metric, p2)?.max(0.0).powf(1.0 / p2);
    let lifted = plan_cost(&channel.lift_plan(plan)?, metric, p2)?.max(0.0).powf(1.0 / p2);
    let threshold = threshold_delta(m, diameter, p1, p2);
    let status = if 1.0 - delta > (m / diameter).min(1.0).powf(p2 - p1) + HYPER_TOL {
        HyperStatus::ConditionUnmet
    } else if lifted <= m + HYPER_TOL {
        HyperStatus::Holds
    } else {
        HyperStatus::Violated
    };
    Ok(HyperReport {
        delta,
        threshold,
        m,
        diameter,
        lifted,
        ratio: if t2 > 0.0 { m / t2 } else { f64::INFINITY },
        ratio_floor: (m / diameter).min(1.0).powf(1.0 - p1 / p2),
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{hamming_metric, trace_metric};
    use crate::rng;
    use crate::states::random::{haar_unitary, random_mixed};
    use crate::transport::{identity_plan, random_plan};

    fn qubit0() -> PureState {
        PureState::basis(vec![2], 0).unwrap()
    }

    #[test]
    fn endpoints_of_delta() {
        let rho = random_mixed(&[3], 2, 1).unwrap();
        let id = NoiseChannel::depolarizing(0.0, vec![3]).unwrap().apply(&rho).unwrap();
        assert!((id.matrix() - rho.matrix()).norm() < 1e-15);
        let full = NoiseChannel::depolarizing(1.0, vec![3]).unwrap().apply(&rho).unwrap();
        assert!((full.matrix() - identity(3).unscale(3.0)).norm() < 1e-15);
    }

    #[test]
    fn replacement_on_maximally_mixed() {
        let ch = NoiseChannel::replacement(0.5, qubit0()).unwrap();
        let out = ch.apply(&DensityOperator::maximally_mixed(vec![2]).unwrap()).unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.75).abs() < 1e-15);
        assert!((out.matrix()[(1, 1)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(NoiseChannel::depolarizing(1.5, vec![2]).is_err());
        let not_unitary = identity(2) * c(2.0, 0.0);
        assert!(NoiseChannel::mixed_unitary(vec![(1.0, not_unitary)], vec![2]).is_err());
        let ch = NoiseChannel::depolarizing(0.2, vec![2]).unwrap();
        assert!(ch.apply(&DensityOperator::maximally_mixed(vec![3]).unwrap()).is_err());
    }

    #[test]
    fn lifts_match_channel_outputs() {
        let mut r = rng::rng(4);
        let plan = random_plan(&[2], 6, &mut r).unwrap();
        let rho = DensityOperator::new(plan.source_marginal(), vec![2]).unwrap();
        let sigma = DensityOperator::new(plan.target_marginal(), vec![2]).unwrap();
        let metric = trace_metric(&[2]).unwrap();
        let mixed = NoiseChannel::mixed_unitary(
            vec![(0.3, haar_unitary(2, &mut r)), (0.7, haar_unitary(2, &mut r))],
            vec![2],
        )
        .unwrap();
        let channels = [
            NoiseChannel::replacement(0.3, qubit0()).unwrap(),
            NoiseChannel::depolarizing(0.4, vec![2]).unwrap(),
            mixed.clone(),
        ];
        for ch in &channels {
            let lifted = ch.lift_plan(&plan).unwrap();
            assert!(lifted.marginal_error(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()) < 1e-9);
        }
        let before = plan_cost(&plan, &metric, 1.0).unwrap();
        let after = plan_cost(&mixed.lift_plan(&plan).unwrap(), &metric, 1.0).unwrap();
        assert!((before - after).abs() < 1e-12);
        assert_eq!(channels[0].lift_plan(&plan).unwrap().len(), plan.len() + 1);
    }

    #[test]
    fn depolarizing_identity_plan_stays_free() {
        let rho = random_mixed(&[2, 2], 4, 2).unwrap();
        let lifted = NoiseChannel::depolarizing(0.3, vec![2, 2]).unwrap().lift_plan(&identity_plan(&rho).unwrap()).unwrap();
        assert!(plan_cost(&lifted, &trace_metric(&[2, 2]).unwrap(), 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn diameter_plans_allow_any_delta() {
        // Orthogonal pair at distance diam = 1.
        let plan = TransportPlan::new(vec![PlanEntry {
            q: 1.0,
            psi: qubit0(),
            phi: PureState::basis(vec![2], 1).unwrap(),
        }])
        .unwrap();
        let metric = trace_metric(&[2]).unwrap();
        let rep = hypercontractivity_check(&plan, &metric, 1.0, 2.0, &NoiseChannel::depolarizing(0.0, vec![2]).unwrap())
            .unwrap();
        assert_eq!(rep.threshold, 0.0);
        assert_eq!(rep.status, HyperStatus::Holds);
        assert!((rep.lifted - rep.m).abs() < 1e-12);
    }

    #[test]
    fn threshold_hamming_plans() {
        let metric = hamming_metric(2, 2).unwrap();
        let mut r = rng::rng(9);
        for _ in 0..5 {
            let plan = random_plan(&[2, 2], 4, &mut r).unwrap();
            let m = plan_cost(&plan, &metric, 1.0).unwrap();
            let delta = threshold_delta(m, metric.diameter.value, 1.0, 2.0);
            let ch = NoiseChannel::depolarizing(delta, vec![2, 2]).unwrap();
            let rep = hypercontractivity_check(&plan, &metric, 1.0, 2.0, &ch).unwrap();
            assert_eq!(rep.status, HyperStatus::Holds, "{rep:?}");
            assert!(rep.ratio >= rep.ratio_floor - 1e-12);
            let below = hypercontractivity_check(&plan, &metric, 1.0, 2.0, &ch.with_delta(delta * 0.5).unwrap()).unwrap();
            assert_eq!(below.status, HyperStatus::ConditionUnmet);
        }
    }
}
