// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Convex solvers: dense simplex for linear programs and a primal-dual
//! interior-point method for block-diagonal semidefinite programs.

pub mod debug;
pub mod embed;
pub mod lp;
pub mod sdp;

pub use embed::{embed_hermitian, unembed_hermitian};
pub use lp::{solve_lp, solve_lp_columns, ColumnSource, LinearProgram};
pub use sdp::{solve_sdp, SdpBlock, SdpConstraint, SdpSolution, SemidefiniteProgram};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
    NumericalFailure,
}

/// Outcome of a solve. `x` is the primal point, `y` the equality multipliers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

impl SolveReport {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// `|p - d| / (1 + |p| + |d|)`.
pub fn relative_gap(p: f64, d: f64) -> f64 {
    (p - d).abs() / (1.0 + p.abs() + d.abs())
}
