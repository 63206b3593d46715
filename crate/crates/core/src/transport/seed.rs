// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Plans built by coupling eigenbases with a classical solver.
//!
//! Inside a degenerate eigenspace the eigenbasis is arbitrary, and the
//! choice matters: for `|00><00|` against `I/4` under the Hamming metric a
//! Bell basis beats the computational one. Each state therefore contributes
//! several bases: the raw eigenvectors, the computational basis aligned to
//! each degenerate eigenspace, its Fourier rotation, and a generalized Bell
//! basis on paired sites when the site structure allows it.

use super::search::Decomposition;
use super::{Order, PlanEntry, TransportPlan};
use crate::classical_ot::{winf_discrete, wp_discrete};
use crate::config::tolerances;
use crate::error::Result;
use crate::metrics::MetricSpec;
use crate::states::linalg::{c, kron_vec, total_dim, CMat, CVec};
use crate::states::eigen::eig_hermitian;
use crate::states::{DensityOperator, PureState, Spectrum};
use nalgebra::DMatrix;

const DEGENERACY_TOL: f64 = 1e-9;

/// A labelled seed plan and the decompositions it couples.
#[derive(Clone, Debug)]
pub struct Seed {
    pub label: String,
    pub plan: TransportPlan,
    pub value: f64,
    pub source: Decomposition,
    pub target: Decomposition,
}

/// `|Φ_ab> = Σ_i ω^{b i} |i>|i + a> / √d` for `a, b < d`.
fn bell_pair_basis(d: usize) -> Vec<CVec> {
    let mut out = Vec::with_capacity(d * d);
    let w = 2.0 * std::f64::consts::PI / d as f64;
    let s = 1.0 / (d as f64).sqrt();
    for a in 0..d {
        for b in 0..d {
            let mut v = CVec::zeros(d * d);
            for i in 0..d {
                let ph = w * (b * i) as f64;
                v[i * d + (i + a) % d] = c(s * ph.cos(), s * ph.sin());
            }
            out.push(v);
        }
    }
    out
}

fn computational_basis(d: usize) -> Vec<CVec> {
    (0..d)
        .map(|i| {
            let mut v = CVec::zeros(d);
            v[i] = c(1.0, 0.0);
            v
        })
        .collect()
}

/// Products of Bell bases on consecutive site pairs of equal dimension.
fn paired_bell_basis(dims: &[usize]) -> Option<Vec<CVec>> {
    if dims.len() < 2 {
        return None;
    }
    let mut factors: Vec<Vec<CVec>> = Vec::new();
    let mut k = 0;
    while k < dims.len() {
        if k + 1 < dims.len() && dims[k] == dims[k + 1] {
            factors.push(bell_pair_basis(dims[k]));
            k += 2;
        } else {
            factors.push(computational_basis(dims[k]));
            k += 1;
        }
    }
    let mut acc = vec![CVec::from_element(1, c(1.0, 0.0))];
    for f in factors {
        acc = acc.iter().flat_map(|a| f.iter().map(move |b| kron_vec(a, b))).collect();
    }
    Some(acc)
}

/// Orthonormal basis of `span(group)` built greedily from projections of the
/// reference vectors.
fn aligned(group: &[CVec], reference: &[CVec]) -> Vec<CVec> {
    let project = |v: &CVec| group.iter().fold(CVec::zeros(v.len()), |acc, e| acc + e * e.dotc(v));
    let mut candidates: Vec<CVec> = reference.iter().map(project).collect();
    let mut out: Vec<CVec> = Vec::with_capacity(group.len());
    while out.len() < group.len() {
        for cnd in candidates.iter_mut() {
            for b in &out {
                let o = b.dotc(cnd);
                *cnd -= b * o;
            }
        }
        let (k, norm) = candidates
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.norm()))
            .fold((0, -1.0), |b, x| if x.1 > b.1 + 1e-12 { x } else { b });
        if norm < 1e-8 {
            // Reference set does not span the group; fall back to the eigenvectors.
            return group.to_vec();
        }
        out.push(&candidates[k] / c(norm, 0.0));
        candidates[k].fill(c(0.0, 0.0));
    }
    out
}

fn fourier(group: &[CVec]) -> Vec<CVec> {
    let k = group.len();
    let w = 2.0 * std::f64::consts::PI / k as f64;
    let s = 1.0 / (k as f64).sqrt();
    (0..k)
        .map(|a| {
            group.iter().enumerate().fold(CVec::zeros(group[0].len()), |acc, (b, v)| {
                let ph = w * (a * b) as f64;
                acc + v * c(s * ph.cos(), s * ph.sin())
            })
        })
        .collect()
}

/// Weighted eigenbases of `ρ` restricted to its support: the raw one, plus
/// variants that re-choose the basis inside degenerate eigenspaces.
pub(crate) fn eigenbases(rho: &DensityOperator) -> Result<Vec<(String, Decomposition)>> {
    let spec: Spectrum = rho.spectrum()?;
    let cutoff = tolerances().rank_cutoff;
    let dims = rho.dims().to_vec();
    let d = total_dim(&dims);
    let support: Vec<usize> = (0..spec.dim()).filter(|&k| spec.values[k] > cutoff).collect();
    let groups: Vec<Vec<usize>> = spec
        .degenerate_groups(DEGENERACY_TOL)
        .into_iter()
        .map(|g| g.into_iter().filter(|k| support.contains(k)).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect();
    let build = |f: &dyn Fn(&[CVec]) -> Vec<CVec>| -> Result<Decomposition> {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for g in &groups {
            let vecs: Vec<CVec> = g.iter().map(|&k| spec.vector(k)).collect();
            let basis = if g.len() > 1 { f(&vecs) } else { vecs };
            for (k, v) in g.iter().zip(basis) {
                weights.push(spec.values[*k]);
                states.push(PureState::normalized(v, dims.clone())?);
            }
        }
        Ok(Decomposition::new(weights, states))
    };
    let mut out = vec![("eigen".to_string(), build(&|g| g.to_vec())?)];
    if groups.iter().any(|g| g.len() > 1) {
        let comp = computational_basis(d);
        out.push(("computational".into(), build(&|g| aligned(g, &comp))?));
        out.push(("fourier".into(), build(&|g| fourier(&aligned(g, &comp)))?));
        if let Some(bell) = paired_bell_basis(&dims) {
            out.push(("bell".into(), build(&|g| aligned(g, &bell))?));
        }
    }
    Ok(out)
}

/// Couple two decompositions optimally for their induced weights.
pub(crate) fn couple(
    a: &Decomposition,
    b: &Decomposition,
    metric: &MetricSpec,
    order: Order,
) -> Result<(TransportPlan, f64)> {
    let dist = DMatrix::from_fn(a.len(), b.len(), |i, j| metric.distance(&a.states[i], &b.states[j]));
    let (wa, wb) = (a.normalized_weights(), b.normalized_weights());
    let (coupling, value) = match order {
        Order::Finite(p) => {
            let r = wp_discrete(&wa, &wb, &dist, p)?;
            (r.coupling, r.value)
        }
        Order::Infinity => {
            let r = winf_discrete(&wa, &wb, &dist)?;
            (r.coupling, r.value)
        }
    };
    let mut entries = Vec::new();
    for i in 0..a.len() {
        for j in 0..b.len() {
            let q = coupling[(i, j)];
            if q > 0.0 {
                entries.push(PlanEntry { q, psi: a.states[i].clone(), phi: b.states[j].clone() });
            }
        }
    }
    Ok((TransportPlan::from_weights(entries)?, value))
}

/// Every basis-variant pairing, sorted by value.
pub fn spectral_seeds(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    order: Order,
) -> Result<Vec<Seed>> {
    metric.check_dims(rho.dims())?;
    let ea = eigenbases(rho)?;
    let eb = eigenbases(sigma)?;
    let mut seeds = Vec::with_capacity(ea.len() * eb.len());
    for (la, a) in &ea {
        for (lb, b) in &eb {
            let (plan, value) = couple(a, b, metric, order)?;
            seeds.push(Seed { label: format!("{la}/{lb}"), plan, value, source: a.clone(), target: b.clone() });
        }
    }
    seeds.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(seeds)
}

/// Best plan coupling eigenbases of `ρ` and `σ`.
pub fn spectral_seed(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    order: Order,
) -> Result<TransportPlan> {
    Ok(spectral_seeds(rho, sigma, metric, order)?.swap_remove(0).plan)
}

/// Largest `a ≥ 0` with `ρ + a Δ ⪰ 0`, capped at `cap`.
fn extent(rho: &CMat, delta: &CMat, cap: f64) -> Result<f64> {
    let lmin = |a: f64| -> Result<f64> { Ok(eig_hermitian(&(rho + delta * c(a, 0.0)))?.min()) };
    if lmin(cap)? >= 0.0 {
        return Ok(cap);
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if lmin(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Clip the negative round-off of a nearly positive operator.
fn clipped(m: &CMat, dims: &[usize]) -> Result<DensityOperator> {
    let spec = eig_hermitian(m)?;
    let p = spec.reconstruct_with(|x| x.max(0.0));
    let t = crate::states::linalg::trace(&p).re;
    DensityOperator::new(p / c(t, 0.0), dims.to_vec())
}

/// Plan through the chord of the state space along `ρ - σ`.
///
/// With `X = ρ + a(ρ - σ)` and `Y = σ - b(ρ - σ)` on the boundary,
/// `ρ = λX + (1-λ)Y` and `σ = μX + (1-μ)Y`; the common parts stay in place
/// and mass `λ - μ = 1/(1+a+b)` moves from `X` to `Y` along their spectral
/// seed. For qubits `X` and `Y` are pure and, under the trace metric, the
/// plan attains `½‖ρ - σ‖₁`.
pub fn chord_plan(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    metric: &MetricSpec,
    order: Order,
) -> Result<Option<TransportPlan>> {
    let delta = rho.matrix() - sigma.matrix();
    if delta.norm() < 1e-12 {
        return Ok(None);
    }
    let cap = 1e6;
    let a = extent(rho.matrix(), &delta, cap)?;
    let b = extent(sigma.matrix(), &(-&delta), cap)?;
    if a >= cap || b >= cap {
        return Ok(None);
    }
    let x = clipped(&(rho.matrix() + &delta * c(a, 0.0)), rho.dims())?;
    let y = clipped(&(sigma.matrix() - &delta * c(b, 0.0)), rho.dims())?;
    let s = 1.0 + a + b;
    let (lam, mu) = ((1.0 + b) / s, b / s);
    let moving = spectral_seed(&x, &y, metric, order)?;
    let mut parts: Vec<(f64, TransportPlan)> = vec![(lam - mu, moving)];
    if mu > 0.0 {
        parts.push((mu, super::identity_plan(&x)?));
    }
    if 1.0 - lam > 0.0 {
        parts.push((1.0 - lam, super::identity_plan(&y)?));
    }
    let refs: Vec<(f64, &TransportPlan)> = parts.iter().map(|(w, p)| (*w, p)).collect();
    let plan = TransportPlan::mixture(&refs)?;
    Ok(if plan.marginal_error(rho, sigma) <= super::MARGINAL_TOL { Some(plan) } else { None })
}

/// Unit vectors as a matrix, for tests.
#[allow(dead_code)]
pub(crate) fn columns(v: &[CVec]) -> CMat {
    CMat::from_columns(v)
}

#[cfg(test)]
mod tests {
    use super::super::{plan_cost, plan_cost_inf};
    use super::*;
    use crate::classical_ot::hamming_matrix;
    use crate::metrics::{hamming_metric, trace_metric};
    use crate::states::random_mixed;

    #[test]
    fn chord_plan_is_exact_for_qubits() {
        let rho = random_mixed(&[2], 2, 21).unwrap();
        let sigma = random_mixed(&[2], 2, 22).unwrap();
        let m = trace_metric(&[2]).unwrap();
        let q = chord_plan(&rho, &sigma, &m, Order::Finite(1.0)).unwrap().unwrap();
        q.check_marginals(&rho, &sigma).unwrap();
        let half = 0.5 * crate::states::trace_norm(&(rho.matrix() - sigma.matrix())).unwrap();
        assert!((plan_cost(&q, &m, 1.0).unwrap() - half).abs() < 1e-9);
    }

    #[test]
    fn bell_pair_basis_is_orthonormal() {
        for d in 2..4 {
            let m = columns(&bell_pair_basis(d));
            let g = m.adjoint() * &m;
            assert!((g - CMat::identity(d * d, d * d)).norm() < 1e-12);
        }
    }

    #[test]
    fn equal_states_give_zero() {
        let rho = random_mixed(&[3], 3, 2).unwrap();
        let m = trace_metric(&[3]).unwrap();
        let q = spectral_seed(&rho, &rho, &m, Order::Finite(1.0)).unwrap();
        assert!(plan_cost(&q, &m, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn pure_zero_against_mixed() {
        let rho = DensityOperator::diagonal(vec![2], &[1.0, 0.0]).unwrap();
        let sigma = DensityOperator::maximally_mixed(vec![2]).unwrap();
        let m = trace_metric(&[2]).unwrap();
        let q = spectral_seed(&rho, &sigma, &m, Order::Finite(1.0)).unwrap();
        assert_eq!(q.len(), 2);
        q.check_marginals(&rho, &sigma).unwrap();
        assert!((plan_cost(&q, &m, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn commuting_states_match_classical() {
        let a = [0.1, 0.2, 0.3, 0.4];
        let b = [0.4, 0.4, 0.1, 0.1];
        let rho = DensityOperator::diagonal(vec![2, 2], &a).unwrap();
        let sigma = DensityOperator::diagonal(vec![2, 2], &b).unwrap();
        let h = hamming_metric(2, 2).unwrap();
        let q = spectral_seed(&rho, &sigma, &h, Order::Finite(1.0)).unwrap();
        let classical = wp_discrete(&a, &b, &hamming_matrix(2, 2), 1.0).unwrap().value;
        assert!((plan_cost(&q, &h, 1.0).unwrap() - classical).abs() < 1e-6);
    }

    #[test]
    fn bell_seed_beats_classical_bottleneck() {
        let rho = DensityOperator::diagonal(vec![2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let sigma = DensityOperator::maximally_mixed(vec![2, 2]).unwrap();
        let h = hamming_metric(2, 2).unwrap();
        let seeds = spectral_seeds(&rho, &sigma, &h, Order::Infinity).unwrap();
        assert!(seeds[0].label.ends_with("bell"), "{}", seeds[0].label);
        let v = plan_cost_inf(&seeds[0].plan, &h).unwrap();
        assert!(v <= 2f64.sqrt() + 1e-6, "{v}");
    }
}
