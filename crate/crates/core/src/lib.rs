// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Wasserstein distances between quantum states built from transport plans
//! over pure-state decompositions.
//!
//! The crate is layered bottom-up:
//!
//! - [`states`]: pure states, density operators, Hermitian eigensolver, sampling.
//! - [`solver`]: dense simplex LP and primal-dual interior-point SDP.
//! - [`classical_ot`]: discrete optimal transport on finite supports.
//! - [`metrics`]: pure-state metrics (trace, Hamming/W1H, plug-ins).
//! - [`norms`]: the W1H norm, Lipschitz bounds and the asymmetric coupling cost.
//! - [`transport`]: transport plans, plan reduction and distance brackets.
//! - [`dual`]: Lipschitz estimates and the dual distance.
//! - [`channels`]: channels that lift transport plans.
//! - [`experiments`]: random-state ensembles and hypercontractivity checks.

// `!(x > 0.0)` rejects NaN on purpose; dense kernels index by position.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::explicit_counter_loop)]

pub mod channels;
pub mod classical_ot;
pub mod config;
pub mod dual;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod metrics;
pub mod norms;
pub mod rng;
pub mod solver;
pub mod states;
pub mod transport;

pub use error::{Error, Result};
