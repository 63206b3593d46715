// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON interchange for states and operators.
//!
//! Density operators and Hermitian operators:
//! `{"dims": [2, 2], "matrix": [[[re, im], ...], ...]}`.
//! Pure states: `{"dims": [2], "vec": [[re, im], ...]}`.

use super::linalg::{c, CMat, CVec};
use super::{DensityOperator, PureState};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub dims: Vec<usize>,
    pub vec: Vec<[f64; 2]>,
}

/// Either shape, as found in a state file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Pure(VectorJson),
    Mixed(MatrixJson),
}

fn rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_to_json(m: &CMat, dims: &[usize]) -> MatrixJson {
    MatrixJson { dims: dims.to_vec(), matrix: rows(m) }
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<CMat> {
    let n = j.matrix.len();
    if j.matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("matrix rows must form a square array".into()));
    }
    Ok(CMat::from_fn(n, n, |r, col| {
        let [re, im] = j.matrix[r][col];
        c(re, im)
    }))
}

pub fn density_to_json(rho: &DensityOperator) -> MatrixJson {
    matrix_to_json(rho.matrix(), rho.dims())
}

pub fn density_from_json(j: &MatrixJson) -> Result<DensityOperator> {
    DensityOperator::new(matrix_from_json(j)?, j.dims.clone())
}

pub fn pure_to_json(psi: &PureState) -> VectorJson {
    VectorJson {
        dims: psi.dims().to_vec(),
        vec: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
    }
}

pub fn pure_from_json(j: &VectorJson) -> Result<PureState> {
    let v = CVec::from_iterator(j.vec.len(), j.vec.iter().map(|&[re, im]| c(re, im)));
    PureState::new(v, j.dims.clone())
}

/// Density operator from either a pure or a mixed state record.
pub fn state_from_json(j: &StateJson) -> Result<DensityOperator> {
    match j {
        StateJson::Pure(p) => Ok(DensityOperator::from_pure(&pure_from_json(p)?)),
        StateJson::Mixed(m) => density_from_json(m),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

pub fn load_state(path: &Path) -> Result<DensityOperator> {
    let j: StateJson = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    state_from_json(&j)
}

pub fn load_pure(path: &Path) -> Result<PureState> {
    let j: VectorJson = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    pure_from_json(&j)
}

/// Hermitian operator in the matrix layout, checked for Hermiticity only.
pub fn load_operator(path: &Path) -> Result<(CMat, Vec<usize>)> {
    let j: MatrixJson = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let m = matrix_from_json(&j)?;
    if m.nrows() != super::linalg::total_dim(&j.dims) {
        return Err(Error::validation("dimension_match", "operator size vs dims"));
    }
    let defect = super::linalg::hermiticity_defect(&m);
    if defect > crate::config::tolerances().hermitian {
        return Err(Error::validation("hermitian", format!("defect {defect:e}")));
    }
    Ok((super::linalg::hermitian_part(&m), j.dims))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_roundtrip_is_bit_exact() {
        let rho = crate::states::random_mixed(&[2, 2], 3, 4).unwrap();
        let s = serde_json::to_string(&density_to_json(&rho)).unwrap();
        let back = density_from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
        assert_eq!(back.dims(), rho.dims());
    }

    #[test]
    fn pure_roundtrip_is_bit_exact() {
        let psi = crate::states::random::haar_pure_seeded(&[3], 8).unwrap();
        let s = serde_json::to_string(&pure_to_json(&psi)).unwrap();
        let back = pure_from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn untagged_state_accepts_both_shapes() {
        let p: StateJson = serde_json::from_str(r#"{"dims":[2],"vec":[[1,0],[0,0]]}"#).unwrap();
        let m: StateJson =
            serde_json::from_str(r#"{"dims":[1],"matrix":[[[1,0]]]}"#).unwrap();
        assert_eq!(state_from_json(&p).unwrap().dim(), 2);
        assert_eq!(state_from_json(&m).unwrap().dim(), 1);
    }

    #[test]
    fn ragged_matrix_is_parse_error() {
        let j: MatrixJson =
            serde_json::from_str(r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0]]]}"#).unwrap();
        assert!(matches!(density_from_json(&j), Err(Error::Parse(_))));
    }
}
