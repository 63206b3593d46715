// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical tolerances, kept in one record.
//!
//! The active record is process-wide. Library code reads it through
//! [`tolerances`]; front ends may replace it once at start-up.

use serde::{Deserialize, Serialize};
use std::sync::RwLock;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max deviation from Hermiticity accepted for a density operator.
    pub hermitian: f64,
    /// Most negative eigenvalue accepted for a density operator.
    pub psd: f64,
    /// Max deviation of the trace from one.
    pub trace: f64,
    /// Max deviation of a pure-state norm from one.
    pub normalization: f64,
    /// Off-diagonal stopping threshold of the Jacobi eigensolver.
    pub jacobi_offdiag: f64,
    /// Eigenvalues at or below this count as zero when taking supports.
    pub rank_cutoff: f64,
    /// Marginal drift accepted for transport plans.
    pub marginal: f64,
    /// SDP relative duality gap target.
    pub sdp_gap: f64,
    /// SDP primal/dual infeasibility target.
    pub sdp_feasibility: f64,
    pub sdp_max_iterations: usize,
    /// Slack allowed in the metric axiom checks.
    pub metric_axiom_slack: f64,
    /// Entries below this weight are dropped from plans.
    pub plan_weight_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-10,
            psd: 1e-10,
            trace: 1e-10,
            normalization: 1e-10,
            jacobi_offdiag: 1e-12,
            rank_cutoff: 1e-10,
            marginal: 1e-10,
            sdp_gap: 1e-8,
            sdp_feasibility: 1e-9,
            sdp_max_iterations: 200,
            metric_axiom_slack: 1e-9,
            plan_weight_floor: 1e-14,
        }
    }
}

static ACTIVE: RwLock<Option<Tolerances>> = RwLock::new(None);

/// The active tolerance record.
pub fn tolerances() -> Tolerances {
    ACTIVE.read().expect("tolerance lock").clone().unwrap_or_default()
}

/// Replace the active tolerance record.
pub fn set_tolerances(t: Tolerances) {
    *ACTIVE.write().expect("tolerance lock") = Some(t);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_json() {
        let t = Tolerances::default();
        let s = serde_json::to_string(&t).unwrap();
        let back: Tolerances = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn partial_override_keeps_other_defaults() {
        let t: Tolerances = serde_json::from_str(r#"{"sdp_gap": 1e-6}"#).unwrap();
        assert_eq!(t.sdp_gap, 1e-6);
        assert_eq!(t.psd, Tolerances::default().psd);
    }
}
