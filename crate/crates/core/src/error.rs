// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented invariant. The string names the invariant.
    #[error("validation failed: {invariant}: {detail}")]
    Validation { invariant: &'static str, detail: String },

    /// Problem size beyond what the built-in solvers are configured for.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Iterative solver did not reach the requested accuracy.
    #[error("solver failure: {0}")]
    Solver(String),

    /// A user supplied metric failed an axiom check.
    #[error("metric axiom violated: {axiom}: {detail}")]
    MetricAxiom { axiom: &'static str, detail: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation { invariant, detail: detail.into() }
    }

    /// Short machine-readable tag used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation { .. } => "validation",
            Error::Capacity(_) => "capacity",
            Error::Solver(_) => "solver",
            Error::MetricAxiom { .. } => "metric_axiom",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
