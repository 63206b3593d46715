// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Pure states, density operators and the matrix machinery beneath them.

pub mod eigen;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod random;

pub use eigen::{eig_hermitian, Spectrum};
pub use linalg::{CMat, CVec, C64};
pub use measures::{op_norm, trace_norm, two_norm, von_neumann_entropy};
pub use random::{haar_pure, haar_unitary, random_mixed};

use crate::config::tolerances;
use crate::error::{Error, Result};
use linalg::{c, total_dim};

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::validation("positive_dims", format!("dims {dims:?}")));
    }
    Ok(total_dim(dims))
}

/// Unit vector with a tensor-product structure. Equality ignores global phase.
#[derive(Clone, Debug)]
pub struct PureState {
    amps: CVec,
    dims: Vec<usize>,
}

impl PureState {
    /// Build from amplitudes; fails unless the norm is one within tolerance.
    pub fn new(amps: CVec, dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        if amps.len() != d {
            return Err(Error::validation(
                "dimension_match",
                format!("{} amplitudes for dims {dims:?}", amps.len()),
            ));
        }
        let n = amps.norm();
        if (n - 1.0).abs() > tolerances().normalization {
            return Err(Error::validation("unit_norm", format!("norm {n}")));
        }
        Ok(PureState { amps, dims })
    }

    /// Build from any nonzero vector, rescaling to unit norm.
    pub fn normalized(amps: CVec, dims: Vec<usize>) -> Result<Self> {
        let n = amps.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::validation("nonzero_vector", format!("norm {n}")));
        }
        let d = check_dims(&dims)?;
        if amps.len() != d {
            return Err(Error::validation(
                "dimension_match",
                format!("{} amplitudes for dims {dims:?}", amps.len()),
            ));
        }
        Ok(PureState { amps: amps.unscale(n), dims })
    }

    /// Unit vector with matching dims, already checked by the caller.
    pub(crate) fn from_trusted(amps: CVec, dims: Vec<usize>) -> Self {
        PureState { amps, dims }
    }

    /// Computational basis state `|index>`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let d = check_dims(&dims)?;
        if index >= d {
            return Err(Error::validation("basis_index", format!("{index} >= {d}")));
        }
        let mut v = CVec::zeros(d);
        v[index] = c(1.0, 0.0);
        Ok(PureState { amps: v, dims })
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> CMat {
        linalg::projector(&self.amps)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { amps: linalg::kron_vec(&self.amps, &other.amps), dims }
    }

    /// Same ray, up to `tol` in the chordal gap.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.dims == other.dims && self.ray_gap(other) <= tol
    }

    /// Chordal gap `min_θ ‖ψ - e^{iθ}φ‖`, accurate for nearly equal rays.
    pub fn ray_gap(&self, other: &PureState) -> f64 {
        let ov = self.overlap(other);
        let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { c(1.0, 0.0) };
        (&self.amps - other.amps.map(|z| z * ph.conj())).norm()
    }

    /// Representative with the first non-negligible amplitude real and positive.
    pub fn canonical_phase(&self) -> PureState {
        let lead = self.amps.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or(c(1.0, 0.0));
        let ph = lead / lead.norm();
        PureState { amps: self.amps.map(|z| z * ph.conj()), dims: self.dims.clone() }
    }
}

impl PartialEq for PureState {
    fn eq(&self, other: &Self) -> bool {
        self.same_ray(other, tolerances().normalization)
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: CMat,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validate Hermiticity, positivity and trace, then store the Hermitian part.
    pub fn new(matrix: CMat, dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::validation(
                "dimension_match",
                format!("{}x{} matrix for dims {dims:?}", matrix.nrows(), matrix.ncols()),
            ));
        }
        let tol = tolerances();
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > tol.hermitian {
            return Err(Error::validation("hermitian", format!("defect {defect:e}")));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::validation("unit_trace", format!("trace {tr}")));
        }
        let lmin = eig_hermitian(&matrix)?.min();
        if lmin < -tol.psd {
            return Err(Error::validation("positive_semidefinite", format!("eigenvalue {lmin:e}")));
        }
        Ok(DensityOperator { matrix, dims })
    }

    /// Internal constructor for matrices known to be valid by construction.
    pub(crate) fn from_trusted(matrix: CMat, dims: Vec<usize>) -> Self {
        DensityOperator { matrix: linalg::hermitian_part(&matrix), dims }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityOperator { matrix: psi.projector(), dims: psi.dims.clone() }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        Ok(DensityOperator { matrix: CMat::identity(d, d).unscale(d as f64), dims })
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(dims: Vec<usize>, probs: &[f64]) -> Result<Self> {
        let m = CMat::from_diagonal(&CVec::from_iterator(
            probs.len(),
            probs.iter().map(|&p| c(p, 0.0)),
        ));
        DensityOperator::new(m, dims)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eig_hermitian(&self.matrix)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }

    /// `Σ w_k |ψ_k><ψ_k|` for a weighted ensemble; not validated.
    pub fn from_ensemble<'a>(items: impl IntoIterator<Item = (f64, &'a PureState)>) -> CMat {
        let mut acc: Option<CMat> = None;
        for (w, psi) in items {
            let p = psi.projector() * c(w, 0.0);
            acc = Some(match acc {
                Some(a) => a + p,
                None => p,
            });
        }
        acc.unwrap_or_else(|| CMat::zeros(0, 0))
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityOperator { matrix: linalg::kron(&self.matrix, &other.matrix), dims }
    }
}

/// Rank-one projector of a pure state.
pub fn projector(psi: &PureState) -> DensityOperator {
    DensityOperator::from_pure(psi)
}

/// Reduced state on the sites in `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let n = rho.dims.len();
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n || seen[k] {
            return Err(Error::validation("keep_sites", format!("{keep:?} for {n} sites")));
        }
        seen[k] = true;
    }
    if keep.is_empty() {
        return Err(Error::validation("keep_sites", "empty keep set"));
    }
    let m = linalg::partial_trace(&rho.matrix, &rho.dims, keep);
    let dims = keep.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityOperator::from_trusted(m, dims))
}
