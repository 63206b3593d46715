// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

use super::{PartialTransportPlan, PlanEntry};
use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::states::linalg::{total_dim, CMat, CVec};
use crate::states::PureState;

/// Replace the weighted bipartite pure coupling `q |χ><χ|` by its Schmidt
/// pairs `{(q p_i, a_i, b_i)}`; both marginals are preserved.
///
/// The first half of the sites of `χ` is the source factor, the second half
/// the target factor; the halves must have equal site dimensions.
pub fn schmidt_flatten(q: f64, chi: &PureState) -> Result<PartialTransportPlan> {
    let dims = chi.dims();
    let n = dims.len();
    if n < 2 || !n.is_multiple_of(2) || dims[..n / 2] != dims[n / 2..] {
        return Err(Error::validation("bipartite_equal_factors", format!("dims {dims:?}")));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::validation("weight_in_unit_interval", format!("q = {q}")));
    }
    let half = dims[..n / 2].to_vec();
    let d = total_dim(&half);
    let amps = chi.amplitudes();
    let m = CMat::from_fn(d, d, |i, j| amps[i * d + j]);
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.expect("left vectors"), svd.v_t.expect("right vectors"));
    let floor = tolerances().plan_weight_floor;
    let mut entries = Vec::new();
    for k in 0..svd.singular_values.len() {
        let p = svd.singular_values[k] * svd.singular_values[k];
        if q * p <= floor {
            continue;
        }
        let a = PureState::normalized(u.column(k).into_owned(), half.clone())?;
        let b = PureState::normalized(CVec::from_iterator(d, vt.row(k).iter().copied()), half.clone())?;
        entries.push(PlanEntry { q: q * p, psi: a, phi: b });
    }
    PartialTransportPlan::new(entries)
}
