// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! SDP-backed norms on traceless Hermitian operators and coupling costs.
//!
//! - [`w1h_norm`]: cheapest decomposition of `X` into differences of
//!   neighbouring states, with its dual probe.
//! - [`lipschitz_upper`] and [`lipschitz_norm`]: the matching Lipschitz
//!   constant of an observable, as a closed-form upper bound and exactly.
//! - [`asym_cost`] and [`asym_cost_stabilized`]: coupling cost against the
//!   projector onto the antisymmetric subspace.

use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::solver::embed::{hermitian_functional, upper_entries};
use crate::solver::{solve_sdp, unembed_hermitian, SdpConstraint, SemidefiniteProgram, SolveStatus};
use crate::states::eigen::{eig_hermitian, eigvals};
use crate::states::linalg::{
    c, complement, embed_on_sites, hermiticity_defect, partial_trace, permute_sites, site_offsets,
    total_dim, CMat, C64, ONE,
};
use crate::states::{op_norm, DensityOperator};

/// Largest total dimension accepted by [`w1h_norm`].
pub const MAX_W1H_DIM: usize = 32;
/// Largest reduced coupling dimension accepted by [`asym_cost`].
pub const MAX_COUPLING_DIM: usize = 128;

/// Hermitian, trace-zero operator with a site structure.
#[derive(Clone, Debug)]
pub struct TracelessHermitian {
    matrix: CMat,
    dims: Vec<usize>,
}

impl TracelessHermitian {
    pub fn new(matrix: CMat, dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims);
        if matrix.shape() != (d, d) {
            return Err(Error::validation("dimension_match", format!("{:?} vs {dims:?}", matrix.shape())));
        }
        let tol = tolerances();
        let h = hermiticity_defect(&matrix);
        if h > tol.hermitian {
            return Err(Error::validation("hermitian", format!("defect {h:e}")));
        }
        let tr = matrix.trace();
        if tr.norm() > tol.trace * (1.0 + crate::states::linalg::frobenius(&matrix)) {
            return Err(Error::validation("traceless", format!("trace {tr}")));
        }
        Ok(TracelessHermitian { matrix: crate::states::linalg::hermitian_part(&matrix), dims })
    }

    pub fn difference(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Self> {
        if rho.dims() != sigma.dims() {
            return Err(Error::validation("equal_dims", format!("{:?} vs {:?}", rho.dims(), sigma.dims())));
        }
        Ok(TracelessHermitian { matrix: rho.matrix() - sigma.matrix(), dims: rho.dims().to_vec() })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
}

/// Hermitian basis functionals on a `d`-dimensional space: each item is the
/// upper-triangle entry list of `H`, paired with `Tr(H M)` for a given `M`.
fn hermitian_basis(d: usize) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        out.push((a, a, ONE));
    }
    for a in 0..d {
        for b in (a + 1)..d {
            out.push((a, b, ONE));
            out.push((a, b, c(0.0, 1.0)));
        }
    }
    out
}

/// `Tr(H M)` for the basis element `(a, b, z)` (with `H_ba = conj z`).
fn basis_pairing(e: (usize, usize, C64), m: &CMat) -> f64 {
    let (a, b, z) = e;
    if a == b {
        (z * m[(a, a)]).re
    } else {
        (z * m[(b, a)] + z.conj() * m[(a, b)]).re
    }
}

fn basis_matrix(e: (usize, usize, C64), d: usize) -> CMat {
    let (a, b, z) = e;
    let mut h = CMat::zeros(d, d);
    h[(a, b)] += z;
    if a != b {
        h[(b, a)] += z.conj();
    }
    h
}

/// Lift a basis element on the complement of `site` to `F ⊗ I_site`.
fn lift_entries(e: (usize, usize, C64), dims: &[usize], site: usize) -> Vec<(usize, usize, C64)> {
    let rest = complement(dims.len(), &[site]);
    let off = site_offsets(dims, &rest);
    let inner = site_offsets(dims, &[site]);
    let (a, b, z) = e;
    inner.iter().map(|&t| (off[a] + t, off[b] + t, z)).collect()
}

fn accept(status: SolveStatus, gap: f64, what: &str) -> Result<()> {
    match status {
        SolveStatus::Optimal => Ok(()),
        SolveStatus::NumericalFailure | SolveStatus::MaxIterations if gap <= 1e-6 => {
            log::warn!("{what}: solver stopped at {status:?} with gap {gap:e}; accepting");
            Ok(())
        }
        s => Err(Error::Solver(format!("{what}: {s:?} (gap {gap:e})"))),
    }
}

/// Optimal decomposition and dual probe for the W1H norm.
#[derive(Clone, Debug)]
pub struct W1hResult {
    /// Primal optimum `Σ_i ½(Tr P_i + Tr N_i)`.
    pub value: f64,
    pub dual_value: f64,
    /// Dual observable `O` with `Tr(O X) = dual_value`.
    pub probe: CMat,
    /// `2 max_i ‖O + Z_i ⊗ I_i‖_∞` from the site multipliers; bounds `‖O‖_L`.
    pub certificate: f64,
    /// `(P_i, N_i)` per site.
    pub decomposition: Vec<(CMat, CMat)>,
    pub status: SolveStatus,
}

impl W1hResult {
    /// Certified lower bound `Tr(O X) / U(O)`.
    pub fn certified_lower(&self) -> f64 {
        if self.certificate > 0.0 {
            self.dual_value / self.certificate
        } else {
            0.0
        }
    }
}

/// W1H norm of a traceless Hermitian operator.
///
/// Primal: `min Σ_i ½(Tr P_i + Tr N_i)` subject to `Σ_i (P_i - N_i) = X`,
/// `Tr_i(P_i - N_i) = 0`, `P_i, N_i ⪰ 0`.
pub fn w1h_norm(x: &TracelessHermitian) -> Result<W1hResult> {
    let dims = x.dims();
    let n = dims.len();
    let d = total_dim(dims);
    if d > MAX_W1H_DIM {
        return Err(Error::Capacity(format!("W1H norm dimension {d} exceeds {MAX_W1H_DIM}")));
    }
    let mut sdp = SemidefiniteProgram::default();
    let blocks: Vec<(usize, usize)> = (0..n).map(|_| (sdp.add_block(2 * d), sdp.add_block(2 * d))).collect();
    for &(bp, bn) in &blocks {
        for k in 0..2 * d {
            sdp.add_objective(bp, k, k, 0.25);
            sdp.add_objective(bn, k, k, 0.25);
        }
    }
    // Σ(P_i - N_i) = X, dropping the last diagonal entry (implied by the traces).
    let basis: Vec<_> = hermitian_basis(d).into_iter().filter(|&(a, b, _)| !(a == b && a == d - 1)).collect();
    for &e in &basis {
        let mut con = SdpConstraint::new(basis_pairing(e, x.matrix()));
        let terms = hermitian_functional(&[e], d);
        for &(bp, bn) in &blocks {
            for &(i, j, v) in &terms {
                con.add(bp, i, j, v);
                con.add(bn, i, j, -v);
            }
        }
        sdp.add_constraint(con);
    }
    let nx = sdp.constraints.len();
    // Tr_i(P_i - N_i) = 0.
    let mut site_ranges = Vec::with_capacity(n);
    for (site, &(bp, bn)) in blocks.iter().enumerate() {
        let dc = d / dims[site];
        let start = sdp.constraints.len();
        for e in hermitian_basis(dc) {
            let mut con = SdpConstraint::new(0.0);
            let terms = hermitian_functional(&lift_entries(e, dims, site), d);
            for &(i, j, v) in &terms {
                con.add(bp, i, j, v);
                con.add(bn, i, j, -v);
            }
            sdp.add_constraint(con);
        }
        site_ranges.push(start..sdp.constraints.len());
    }

    let sol = solve_sdp(&sdp);
    let rep = &sol.report;
    accept(rep.status, rep.relative_gap, "w1h_norm")?;

    let mut probe = CMat::zeros(d, d);
    for (k, &e) in basis.iter().enumerate() {
        probe += basis_matrix(e, d) * c(rep.y[k], 0.0);
    }
    let mut certificate: f64 = 0.0;
    for (site, range) in site_ranges.iter().enumerate() {
        let dc = d / dims[site];
        let mut z = CMat::zeros(dc, dc);
        for (e, k) in hermitian_basis(dc).into_iter().zip(range.clone()) {
            z += basis_matrix(e, dc) * c(rep.y[k], 0.0);
        }
        let rest = complement(n, &[site]);
        let lifted = embed_on_sites(&z, dims, &rest);
        certificate = certificate.max(2.0 * op_norm(&(&probe + lifted))?);
    }
    debug_assert_eq!(nx, basis.len());
    let dual_value = basis.iter().zip(&rep.y).map(|(&e, y)| y * basis_pairing(e, x.matrix())).sum();
    let decomposition = blocks
        .iter()
        .map(|&(bp, bn)| (unembed_hermitian(&sol.x[bp]), unembed_hermitian(&sol.x[bn])))
        .collect();
    Ok(W1hResult {
        value: rep.primal_objective,
        dual_value,
        probe,
        certificate,
        decomposition,
        status: rep.status,
    })
}

/// `‖X‖_W1H` of `ρ - σ`.
pub fn w1h_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    Ok(w1h_norm(&TracelessHermitian::difference(rho, sigma)?)?.value)
}

fn check_observable(o: &CMat, dims: &[usize]) -> Result<()> {
    let d = total_dim(dims);
    if o.shape() != (d, d) {
        return Err(Error::validation("dimension_match", format!("{:?} vs {dims:?}", o.shape())));
    }
    let h = hermiticity_defect(o);
    if h > tolerances().hermitian {
        return Err(Error::validation("hermitian", format!("defect {h:e}")));
    }
    Ok(())
}

/// `2 max_i ‖O - (Tr_i O / d_i) ⊗ I_i‖_∞`, an upper bound on the Lipschitz
/// constant. Rejects operators with nonzero trace.
pub fn lipschitz_upper(o: &CMat, dims: &[usize]) -> Result<f64> {
    check_observable(o, dims)?;
    let tr = o.trace();
    if tr.norm() > tolerances().trace * (1.0 + crate::states::linalg::frobenius(o)) {
        return Err(Error::validation("traceless", format!("trace {tr}")));
    }
    let n = dims.len();
    let mut best: f64 = 0.0;
    for site in 0..n {
        let rest = complement(n, &[site]);
        let reduced = partial_trace(o, dims, &rest).unscale(dims[site] as f64);
        let shifted = o - embed_on_sites(&reduced, dims, &rest);
        best = best.max(2.0 * op_norm(&shifted)?);
    }
    Ok(best)
}

/// Exact Lipschitz constant `2 max_i min_A ‖O - A ⊗ I_i‖_∞`, one SDP per site.
pub fn lipschitz_norm(o: &CMat, dims: &[usize]) -> Result<f64> {
    check_observable(o, dims)?;
    let n = dims.len();
    let d = total_dim(dims);
    if d > MAX_W1H_DIM {
        return Err(Error::Capacity(format!("Lipschitz SDP dimension {d} exceeds {MAX_W1H_DIM}")));
    }
    let mut best: f64 = 0.0;
    for site in 0..n {
        if n == 1 {
            // Only A ⊗ I = a I is available: min_a ‖O - a I‖ = (λmax - λmin) / 2.
            let ev = eigvals(o)?;
            best = best.max(ev[0] - ev[ev.len() - 1]);
            continue;
        }
        let mut sdp = SemidefiniteProgram::default();
        let b1 = sdp.add_block(2 * d);
        let b2 = sdp.add_block(2 * d);
        for &(i, j, v) in &hermitian_functional(&upper_entries(o), d) {
            sdp.add_objective(b1, i, j, -v);
            sdp.add_objective(b2, i, j, v);
        }
        let mut norm = SdpConstraint::new(1.0);
        for k in 0..2 * d {
            norm.add(b1, k, k, 0.5);
            norm.add(b2, k, k, 0.5);
        }
        sdp.add_constraint(norm);
        let dc = d / dims[site];
        for e in hermitian_basis(dc) {
            let mut con = SdpConstraint::new(0.0);
            for &(i, j, v) in &hermitian_functional(&lift_entries(e, dims, site), d) {
                con.add(b1, i, j, v);
                con.add(b2, i, j, -v);
            }
            sdp.add_constraint(con);
        }
        let sol = solve_sdp(&sdp);
        accept(sol.report.status, sol.report.relative_gap, "lipschitz_norm")?;
        best = best.max(-2.0 * sol.report.dual_objective);
    }
    Ok(best)
}

/// Optimal coupling cost and the witness coupling on `H ⊗ H`.
#[derive(Clone, Debug)]
pub struct AsymResult {
    pub value: f64,
    pub coupling: CMat,
    pub status: SolveStatus,
}

fn swap_operator(d: usize) -> CMat {
    let mut f = CMat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            f[(a * d + b, b * d + a)] = ONE;
        }
    }
    f
}

/// `Σ_i (I - F_i) / 2` on `H ⊗ H`, where `F_i` swaps copy-A site `i` with copy-B site `i`.
fn site_asym_projectors(dims: &[usize]) -> CMat {
    let n = dims.len();
    let full: Vec<usize> = dims.iter().chain(dims).copied().collect();
    let dd = total_dim(&full);
    let mut acc = CMat::zeros(dd, dd);
    for i in 0..n {
        let di = dims[i];
        let p = (CMat::identity(di * di, di * di) - swap_operator(di)) * c(0.5, 0.0);
        acc += embed_on_sites(&p, &full, &[i, n + i]);
    }
    acc
}

/// Orthonormal basis of the support, as columns.
fn support(rho: &DensityOperator) -> Result<(CMat, Vec<f64>)> {
    let s = eig_hermitian(rho.matrix())?;
    let r = s.rank(tolerances().rank_cutoff).max(1);
    Ok((s.vectors.columns(0, r).into_owned(), s.values[..r].to_vec()))
}

fn coupling_sdp(rho: &DensityOperator, sigma: &DensityOperator, cost: &CMat) -> Result<AsymResult> {
    let (va, la) = support(rho)?;
    let (vb, lb) = support(sigma)?;
    let (ra, rb) = (la.len(), lb.len());
    let r = ra * rb;
    if r > MAX_COUPLING_DIM {
        return Err(Error::Capacity(format!("coupling support dimension {r} exceeds {MAX_COUPLING_DIM}")));
    }
    let k = va.kronecker(&vb);
    let q = k.adjoint() * cost * &k;
    let mut sdp = SemidefiniteProgram::default();
    let blk = sdp.add_block(2 * r);
    for &(i, j, v) in &hermitian_functional(&upper_entries(&q), r) {
        sdp.add_objective(blk, i, j, v);
    }
    let rdims = [ra, rb];
    // Tr_B τ = diag(la) in the support basis, all entries.
    for e in hermitian_basis(ra) {
        let (a, b, _) = e;
        let rhs = if a == b { la[a] } else { 0.0 };
        let mut con = SdpConstraint::new(rhs);
        for &(i, j, v) in &hermitian_functional(&lift_entries(e, &rdims, 1), r) {
            con.add(blk, i, j, v);
        }
        sdp.add_constraint(con);
    }
    // Tr_A τ = diag(lb), dropping one diagonal (trace already fixed).
    for e in hermitian_basis(rb) {
        let (a, b, _) = e;
        if a == b && a == rb - 1 {
            continue;
        }
        let rhs = if a == b { lb[a] } else { 0.0 };
        let mut con = SdpConstraint::new(rhs);
        for &(i, j, v) in &hermitian_functional(&lift_entries(e, &rdims, 0), r) {
            con.add(blk, i, j, v);
        }
        sdp.add_constraint(con);
    }
    let sol = solve_sdp(&sdp);
    accept(sol.report.status, sol.report.relative_gap, "asym_cost")?;
    let tau_r = unembed_hermitian(&sol.x[blk]);
    let coupling = &k * tau_r * k.adjoint();
    Ok(AsymResult { value: sol.report.primal_objective.max(0.0), coupling, status: sol.report.status })
}

fn check_pair(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dims() != sigma.dims() {
        return Err(Error::validation("equal_dims", format!("{:?} vs {:?}", rho.dims(), sigma.dims())));
    }
    Ok(())
}

/// `min Tr[τ Σ_i P_{i,asym}]` over couplings `τ` of `ρ` and `σ`.
///
/// With `per_site`, one projector per tensor factor; otherwise the whole
/// space is treated as a single site.
pub fn asym_cost(rho: &DensityOperator, sigma: &DensityOperator, per_site: bool) -> Result<AsymResult> {
    check_pair(rho, sigma)?;
    let dims: Vec<usize> = if per_site { rho.dims().to_vec() } else { vec![rho.dim()] };
    coupling_sdp(rho, sigma, &site_asym_projectors(&dims))
}

/// Adjoin a maximally mixed qubit (one per site with `per_site`, else one in
/// total) and evaluate [`asym_cost`] on the enlarged sites.
pub fn asym_cost_stabilized(rho: &DensityOperator, sigma: &DensityOperator, per_site: bool) -> Result<AsymResult> {
    check_pair(rho, sigma)?;
    let widen = |s: &DensityOperator| -> (DensityOperator, Vec<usize>) {
        let dims = s.dims();
        let n = dims.len();
        if per_site {
            let half = CMat::identity(2, 2) * c(0.5, 0.0);
            let mut m = s.matrix().clone();
            let mut full = dims.to_vec();
            for _ in 0..n {
                m = m.kronecker(&half);
            }
            full.extend(std::iter::repeat_n(2, n));
            let perm: Vec<usize> = (0..n).flat_map(|i| [i, n + i]).collect();
            let m = permute_sites(&m, &full, &perm);
            let new_dims: Vec<usize> = dims.iter().map(|d| 2 * d).collect();
            (DensityOperator::from_trusted(m, new_dims.clone()), new_dims)
        } else {
            let d = s.dim();
            let m = s.matrix().kronecker(&(CMat::identity(2, 2) * c(0.5, 0.0)));
            (DensityOperator::from_trusted(m, vec![2 * d]), vec![2 * d])
        }
    };
    let (r2, dims) = widen(rho);
    let (s2, _) = widen(sigma);
    coupling_sdp(&r2, &s2, &site_asym_projectors(&dims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical_ot::{hamming_matrix, wp_discrete};
    use crate::states::linalg::{CVec, ZERO};
    use crate::states::{random_mixed, PureState};
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVec::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        DensityOperator::from_pure(&PureState::new(v, vec![2, 2]).unwrap())
    }

    fn pure_basis(dims: Vec<usize>, k: usize) -> DensityOperator {
        DensityOperator::from_pure(&PureState::basis(dims, k).unwrap())
    }

    #[test]
    fn w1h_point_mass_vs_uniform_is_one() {
        let a = pure_basis(vec![2, 2], 0);
        let b = DensityOperator::maximally_mixed(vec![2, 2]).unwrap();
        let r = w1h_norm(&TracelessHermitian::difference(&a, &b).unwrap()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.certified_lower(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn w1h_diagonal_matches_classical() {
        let d = hamming_matrix(2, 2);
        let p = [0.1, 0.2, 0.3, 0.4];
        let q = [0.4, 0.1, 0.25, 0.25];
        let a = DensityOperator::diagonal(vec![2, 2], &p).unwrap();
        let b = DensityOperator::diagonal(vec![2, 2], &q).unwrap();
        let classical = wp_discrete(&p, &q, &d, 1.0).unwrap().value;
        assert_abs_diff_eq!(w1h_distance(&a, &b).unwrap(), classical, epsilon = 1e-6);
    }

    #[test]
    fn w1h_single_site_is_half_trace_norm() {
        let a = random_mixed(&[3], 3, 1).unwrap();
        let b = random_mixed(&[3], 2, 2).unwrap();
        let x = a.matrix() - b.matrix();
        let want = 0.5 * crate::states::trace_norm(&x).unwrap();
        assert_abs_diff_eq!(w1h_distance(&a, &b).unwrap(), want, epsilon = 1e-6);
    }

    #[test]
    fn w1h_decomposition_is_feasible() {
        let a = random_mixed(&[2, 2], 4, 3).unwrap();
        let b = random_mixed(&[2, 2], 2, 4).unwrap();
        let x = TracelessHermitian::difference(&a, &b).unwrap();
        let r = w1h_norm(&x).unwrap();
        let mut sum = CMat::zeros(4, 4);
        for (i, (p, q)) in r.decomposition.iter().enumerate() {
            sum += p - q;
            let red = partial_trace(&(p - q), &[2, 2], &[1 - i]);
            assert!(red.norm() < 1e-6);
            assert!(eigvals(p).unwrap().iter().all(|&l| l > -1e-7));
        }
        assert!((sum - x.matrix()).norm() < 1e-6);
        assert!(r.certificate <= 1.0 + 1e-6);
        assert_abs_diff_eq!(r.value, r.dual_value, epsilon = 1e-6);
    }

    #[test]
    fn lipschitz_of_z_on_first_qubit() {
        let z = CMat::from_diagonal(&CVec::from_vec(vec![ONE, -ONE]));
        let o = z.kronecker(&CMat::identity(2, 2));
        assert_abs_diff_eq!(lipschitz_upper(&o, &[2, 2]).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lipschitz_norm(&o, &[2, 2]).unwrap(), 2.0, epsilon = 1e-6);
        assert!(lipschitz_upper(&CMat::identity(4, 4), &[2, 2]).is_err());
    }

    #[test]
    fn exact_lipschitz_never_exceeds_upper() {
        for seed in 0..4 {
            let a = random_mixed(&[2, 2], 4, seed).unwrap();
            let b = random_mixed(&[2, 2], 4, seed + 100).unwrap();
            let o = a.matrix() - b.matrix();
            let up = lipschitz_upper(&o, &[2, 2]).unwrap();
            let ex = lipschitz_norm(&o, &[2, 2]).unwrap();
            assert!(ex <= up + 1e-7, "{ex} > {up}");
        }
    }

    #[test]
    fn asym_examples() {
        let b = bell();
        assert_abs_diff_eq!(asym_cost(&b, &b, true).unwrap().value, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(asym_cost(&b, &b, false).unwrap().value, 0.0, epsilon = 1e-6);
        assert!(asym_cost_stabilized(&b, &b, true).unwrap().value >= 0.5 - 1e-6);
        let z0 = pure_basis(vec![2], 0);
        let z1 = pure_basis(vec![2], 1);
        assert_abs_diff_eq!(asym_cost(&z0, &z0, false).unwrap().value, 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(asym_cost(&z0, &z1, false).unwrap().value, 0.5, epsilon = 1e-7);
    }

    #[test]
    fn asym_is_symmetric() {
        let a = random_mixed(&[2], 2, 5).unwrap();
        let b = random_mixed(&[2], 2, 6).unwrap();
        let ab = asym_cost(&a, &b, false).unwrap().value;
        let ba = asym_cost(&b, &a, false).unwrap().value;
        assert_abs_diff_eq!(ab, ba, epsilon = 1e-7);
    }
}
