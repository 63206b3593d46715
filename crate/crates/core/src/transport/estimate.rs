// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

use super::search::{search, SearchBudget};
use super::seed::{chord_plan, spectral_seeds};
use super::{plan_value, reduce_plan, Order, PlanEntry, TransportPlan};
use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::metrics::MetricSpec;
use crate::norms::TracelessHermitian;
use crate::states::linalg::CMat;
use crate::states::{two_norm, DensityOperator, PureState};
use serde::Serialize;

/// Lower bounds above the upper bound by at most this much are treated as
/// solver noise and clipped.
const BRACKET_SLACK: f64 = 1e-6;

/// Certified lower bound and the value of an explicit plan.
#[derive(Clone, Debug)]
pub struct DistanceBracket {
    pub lower: f64,
    pub upper: f64,
    pub witness: TransportPlan,
    pub order: Order,
    pub lower_method: String,
    pub upper_method: String,
    /// Every certified lower bound that was evaluated.
    pub lower_bounds: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct BracketJson<'a> {
    lower: f64,
    upper: f64,
    gap: f64,
    order: Order,
    lower_method: &'a str,
    upper_method: &'a str,
    lower_bounds: std::collections::BTreeMap<&'a str, f64>,
    witness: super::PlanJson,
}

impl DistanceBracket {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BracketJson {
            lower: self.lower,
            upper: self.upper,
            gap: self.gap(),
            order: self.order,
            lower_method: &self.lower_method,
            upper_method: &self.upper_method,
            lower_bounds: self.lower_bounds.iter().map(|(k, v)| (k.as_str(), *v)).collect(),
            witness: self.witness.to_json(),
        })
        .expect("bracket serializes")
    }

    /// Swap the roles of the two states.
    pub fn reversed(&self) -> Self {
        DistanceBracket { witness: self.witness.reversed(), ..self.clone() }
    }
}

fn check_pair(rho: &DensityOperator, sigma: &DensityOperator, metric: &MetricSpec) -> Result<()> {
    if rho.dims() != sigma.dims() {
        return Err(Error::validation("dimension_match", format!("{:?} vs {:?}", rho.dims(), sigma.dims())));
    }
    metric.check_dims(rho.dims())
}

/// The pure state of a rank-one density operator.
fn as_pure(rho: &DensityOperator) -> Result<Option<PureState>> {
    let spec = rho.spectrum()?;
    if spec.rank(tolerances().rank_cutoff) == 1 {
        Ok(Some(PureState::normalized(spec.vector(0), rho.dims().to_vec())?))
    } else {
        Ok(None)
    }
}

fn lower_bounds(rho: &DensityOperator, sigma: &DensityOperator, metric: &MetricSpec) -> Result<Vec<(String, f64)>> {
    let x = rho.matrix() - sigma.matrix();
    let mut out = vec![("zero".to_string(), 0.0)];
    if let Some(h) = metric.hoelder {
        out.push(("hoelder".into(), h.lower_bound(two_norm(&x))));
    }
    if metric.name == "trace" {
        // With ρ pure every plan is {(q_j, ψ, φ_j)} and
        // Σ q_j d(ψ, φ_j) = Σ ‖v_j‖ ‖Q v_j‖ ≥ Re Tr(X Q σ) for ‖X‖ ≤ 1,
        // where v_j = √q_j φ_j and Q = I - |ψ><ψ|.
        for (a, b) in [(rho, sigma), (sigma, rho)] {
            if let Some(psi) = as_pure(a)? {
                let q = CMat::identity(a.dim(), a.dim()) - psi.projector();
                let bound: f64 = (q * b.matrix()).singular_values().iter().sum();
                out.push(("pure_marginal".into(), bound));
                break;
            }
        }
    }
    if let Some(norm) = metric.exact_lower_norm() {
        let th = TracelessHermitian::new(x, rho.dims().to_vec())?;
        out.push((norm.name().into(), norm.norm(&th)?));
    }
    Ok(out)
}

fn bracket(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    order: Order,
    budget: &SearchBudget,
) -> Result<DistanceBracket> {
    check_pair(rho, sigma, metric)?;
    if let (Some(a), Some(b)) = (as_pure(rho)?, as_pure(sigma)?) {
        // A pair of pure states admits exactly one plan.
        let d = metric.distance(&a, &b);
        let witness = TransportPlan::new(vec![PlanEntry { q: 1.0, psi: a, phi: b }])?;
        return Ok(DistanceBracket {
            lower: d,
            upper: d,
            witness,
            order,
            lower_method: "pure_pair".into(),
            upper_method: "pure_pair".into(),
            lower_bounds: vec![("pure_pair".into(), d)],
        });
    }
    let lows = lower_bounds(rho, sigma, metric)?;
    let (lower_method, mut lower) =
        lows.iter().cloned().max_by(|x, y| x.1.total_cmp(&y.1)).expect("zero bound present");

    let budget = budget.for_metric(metric);
    let seeds = spectral_seeds(rho, sigma, metric, order)?;
    let mut candidates: Vec<(String, TransportPlan)> =
        vec![(format!("spectral_seed:{}", seeds[0].label), seeds[0].plan.clone())];
    if let Some(plan) = chord_plan(rho, sigma, metric, order)? {
        candidates.push(("chord".into(), plan));
    }
    let starts: Vec<_> = seeds.iter().map(|s| (s.source.clone(), s.target.clone())).collect();
    let best_seed = candidates
        .iter()
        .map(|(_, p)| plan_value(p, metric, order))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if best_seed > lower + 1e-12 {
        let found = search(rho, sigma, metric, order, &starts, &budget)?;
        candidates.push((format!("decomposition_search:restart{}", found.restart), found.plan));
    }
    let mut best: Option<(String, TransportPlan, f64)> = None;
    for (label, plan) in candidates {
        let reduced = reduce_plan(&plan, metric, order)?;
        let value = plan_value(&reduced, metric, order)?;
        if best.as_ref().is_none_or(|b| value < b.2) {
            best = Some((label, reduced, value));
        }
    }
    let (upper_method, witness, upper) = best.expect("seed candidate");
    witness.check_marginals(rho, sigma)?;
    if lower > upper {
        if lower - upper > BRACKET_SLACK {
            return Err(Error::Solver(format!("lower bound {lower} exceeds plan value {upper}")));
        }
        log::debug!("clipping lower bound {lower} to plan value {upper}");
        lower = upper;
    }
    Ok(DistanceBracket { lower, upper, witness, order, lower_method, upper_method, lower_bounds: lows })
}

/// Bracket `W_p(ρ, σ)` for finite `p ≥ 1`.
///
/// The upper end is the cost of the best plan from the spectral seeds and
/// the decomposition search, after reduction. The lower end is the largest
/// certified bound: the Hölder bound and the metric's exact lower norm, both
/// valid for every order. Pure pairs are exact.
pub fn estimate_wp(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    p: f64,
    budget: &SearchBudget,
) -> Result<DistanceBracket> {
    match Order::new(p)? {
        Order::Infinity => Err(Error::validation("finite_order", "use estimate_winf for p = inf")),
        order => bracket(rho, sigma, metric, order, budget),
    }
}

/// Bracket `W_∞(ρ, σ)`; lower bounds as for finite orders.
pub fn estimate_winf(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    budget: &SearchBudget,
) -> Result<DistanceBracket> {
    bracket(rho, sigma, metric, Order::Infinity, budget)
}

/// Cost of sharing `λ I` between the states at zero cost and moving the
/// residual mass `1 - λ D` at the diameter, `λ = min(λ_min(ρ), λ_min(σ))`.
pub fn common_part_upper(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    order: Order,
) -> Result<f64> {
    check_pair(rho, sigma, metric)?;
    let lam = rho.spectrum()?.min().min(sigma.spectrum()?.min()).max(0.0);
    let residual = (1.0 - lam * rho.dim() as f64).max(0.0);
    let diam = metric.diameter.value;
    Ok(match order {
        Order::Finite(p) => (residual * diam.powf(p)).powf(1.0 / p),
        Order::Infinity if residual <= 1e-12 => 0.0,
        Order::Infinity => diam,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{hamming_metric, trace_metric};
    use crate::states::random::haar_pure_seeded;
    use crate::states::{random_mixed, trace_norm};

    #[test]
    fn pure_pair_is_exact() {
        let a = DensityOperator::from_pure(&haar_pure_seeded(&[2, 2], 1).unwrap());
        let b = DensityOperator::from_pure(&haar_pure_seeded(&[2, 2], 2).unwrap());
        let h = hamming_metric(2, 2).unwrap();
        let br = estimate_wp(&a, &b, &h, 2.0, &SearchBudget::default()).unwrap();
        assert_eq!(br.lower, br.upper);
        let w = estimate_winf(&a, &b, &h, &SearchBudget::default()).unwrap();
        assert_eq!(w.upper, br.upper);
    }

    #[test]
    fn pure_zero_against_maximally_mixed_qubit() {
        let rho = DensityOperator::diagonal(vec![2], &[1.0, 0.0]).unwrap();
        let sigma = DensityOperator::maximally_mixed(vec![2]).unwrap();
        let br = estimate_wp(&rho, &sigma, &trace_metric(&[2]).unwrap(), 1.0, &SearchBudget::default()).unwrap();
        assert!((br.lower - 0.5).abs() < 1e-12 && (br.upper - 0.5).abs() < 1e-12, "{br:?}");
    }

    #[test]
    fn trace_bracket_on_random_qutrits() {
        let rho = random_mixed(&[3], 3, 11).unwrap();
        let sigma = random_mixed(&[3], 3, 12).unwrap();
        let br = estimate_wp(&rho, &sigma, &trace_metric(&[3]).unwrap(), 1.0, &SearchBudget::default()).unwrap();
        let half = 0.5 * trace_norm(&(rho.matrix() - sigma.matrix())).unwrap();
        assert!(br.lower >= half - 1e-9);
        assert!(br.lower <= br.upper && br.upper <= 1.0, "{} {}", br.lower, br.upper);
        br.witness.check_marginals(&rho, &sigma).unwrap();
    }

    #[test]
    fn bell_shortcut_bottleneck() {
        let rho = DensityOperator::diagonal(vec![2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let sigma = DensityOperator::maximally_mixed(vec![2, 2]).unwrap();
        let br = estimate_winf(&rho, &sigma, &hamming_metric(2, 2).unwrap(), &SearchBudget::default()).unwrap();
        assert!(br.upper <= 2f64.sqrt() + 1e-6, "{}", br.upper);
        assert!(br.lower <= br.upper);
    }

    #[test]
    fn common_part_bounds() {
        let m = trace_metric(&[4]).unwrap();
        let mm = DensityOperator::maximally_mixed(vec![4]).unwrap();
        assert!(common_part_upper(&mm, &mm, &m, Order::Finite(1.0)).unwrap() < 1e-12);
        let rho = random_mixed(&[4], 64, 3).unwrap();
        let sigma = random_mixed(&[4], 64, 4).unwrap();
        let cp = common_part_upper(&rho, &sigma, &m, Order::Finite(1.0)).unwrap();
        let br = estimate_wp(&rho, &sigma, &m, 1.0, &SearchBudget::default()).unwrap();
        assert!(br.lower <= cp + 1e-12);
    }
}
