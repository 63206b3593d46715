// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Hamming-type metric on qudit strings: the W1H norm of the projector
//! difference.

use super::{Diameter, Hoelder, MetricSpec, NormCertificate, PureMetric};
use crate::error::{Error, Result};
use crate::norms::{lipschitz_norm, w1h_norm, TracelessHermitian};
use crate::states::linalg::{CMat, CVec};
use crate::states::PureState;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

pub const MAX_HAMMING_SITES: usize = 3;
pub const MAX_HAMMING_LOCAL: usize = 3;
const CACHE_LIMIT: usize = 200_000;

/// Cached value and dual probe for the ordered pair `(low, high)` of fingerprints.
#[derive(Clone)]
struct Entry {
    value: f64,
    probe: Arc<CMat>,
}

pub struct HammingMetric {
    dims: Vec<usize>,
    cache: RwLock<HashMap<(u64, u64), Entry>>,
}

/// Phase-invariant fingerprint of a ray.
fn fingerprint(s: &PureState) -> u64 {
    let canon = s.canonical_phase();
    let mut h = DefaultHasher::new();
    s.dims().hash(&mut h);
    for z in canon.amplitudes().iter() {
        ((z.re * 1e12).round() as i64).hash(&mut h);
        ((z.im * 1e12).round() as i64).hash(&mut h);
    }
    h.finish()
}

impl HammingMetric {
    pub fn new(dims: Vec<usize>) -> Self {
        HammingMetric { dims, cache: RwLock::new(HashMap::new()) }
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    /// Value and probe `O` with `d = Tr[O(|a><a| - |b><b|)]`.
    fn evaluate(&self, a: &PureState, b: &PureState) -> (f64, Arc<CMat>) {
        let (fa, fb) = (fingerprint(a), fingerprint(b));
        if fa == fb && a.same_ray(b, 1e-12) {
            let d = a.dim();
            return (0.0, Arc::new(CMat::zeros(d, d)));
        }
        let (key, flip) = if fa <= fb { ((fa, fb), false) } else { ((fb, fa), true) };
        if let Some(e) = self.cache.read().ok().and_then(|c| c.get(&key).cloned()) {
            let probe = if flip { Arc::new(-(*e.probe).clone()) } else { e.probe };
            return (e.value, probe);
        }
        let (lo, hi) = if flip { (b, a) } else { (a, b) };
        let x = TracelessHermitian::new(lo.projector() - hi.projector(), self.dims.clone())
            .expect("projector difference is traceless Hermitian");
        let (value, probe) = match w1h_norm(&x) {
            Ok(r) => (r.value.max(0.0), Arc::new(r.probe)),
            Err(e) => {
                log::warn!("hamming metric evaluation failed ({e}); using trace-norm fallback");
                let d = x.matrix().nrows();
                let v = 0.5 * crate::states::trace_norm(x.matrix()).unwrap_or(f64::NAN);
                (v, Arc::new(CMat::zeros(d, d)))
            }
        };
        if let Ok(mut c) = self.cache.write() {
            if c.len() >= CACHE_LIMIT {
                c.clear();
            }
            c.insert(key, Entry { value, probe: probe.clone() });
        }
        let probe = if flip { Arc::new(-(*probe).clone()) } else { probe };
        (value, probe)
    }
}

impl PureMetric for HammingMetric {
    fn name(&self) -> String {
        format!("hamming:{},{}", self.dims[0], self.dims.len())
    }

    fn distance(&self, a: &PureState, b: &PureState) -> f64 {
        self.evaluate(a, b).0
    }

    fn gradient(&self, a: &PureState, b: &PureState) -> Option<(CVec, CVec)> {
        // Danskin: d is a max of Tr[O X] over the dual set, so O a and -O b.
        let (_, o) = self.evaluate(a, b);
        Some((&*o * a.amplitudes(), -(&*o * b.amplitudes())))
    }
}

/// The W1H norm as an exact lower-bound norm.
pub struct W1hNorm;

impl NormCertificate for W1hNorm {
    fn name(&self) -> &'static str {
        "w1h_norm"
    }

    fn norm(&self, x: &TracelessHermitian) -> Result<f64> {
        Ok(w1h_norm(x)?.value)
    }

    fn dual_probe(&self, x: &TracelessHermitian) -> Result<(CMat, f64)> {
        let r = w1h_norm(x)?;
        Ok((r.probe, r.certificate))
    }

    fn lipschitz_bound(&self, o: &CMat, dims: &[usize]) -> Result<(f64, bool)> {
        Ok((lipschitz_norm(o, dims)?, false))
    }
}

/// Metric induced by the W1H norm on `n` qudits of dimension `d`.
pub fn hamming_metric(d: usize, n: usize) -> Result<MetricSpec> {
    if d < 2 || n < 1 {
        return Err(Error::validation("hamming_shape", format!("d = {d}, n = {n}")));
    }
    if d > MAX_HAMMING_LOCAL || n > MAX_HAMMING_SITES {
        return Err(Error::Capacity(format!(
            "hamming metric supports d <= {MAX_HAMMING_LOCAL}, n <= {MAX_HAMMING_SITES}; got d = {d}, n = {n}"
        )));
    }
    let dims = vec![d; n];
    let mut spec = MetricSpec::new(
        format!("hamming:{d},{n}"),
        Arc::new(HammingMetric::new(dims.clone())),
        Diameter { value: n as f64, exact: false },
        // ‖X‖_W1H ≥ ½‖X‖₁, and ‖ψψ† - φφ†‖₂ = √2 · ½‖ψψ† - φφ†‖₁ for pure states.
        Some(Hoelder { c: std::f64::consts::SQRT_2, alpha: 1.0 }),
        Some(Arc::new(W1hNorm)),
        Some(dims),
    );
    spec.expensive = true;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::trace_metric;
    use crate::rng;
    use crate::states::haar_pure;
    use crate::states::linalg::{c, ZERO};
    use approx::assert_abs_diff_eq;

    fn basis(k: usize) -> PureState {
        PureState::basis(vec![2, 2], k).unwrap()
    }

    #[test]
    fn basis_examples() {
        let m = hamming_metric(2, 2).unwrap();
        assert_abs_diff_eq!(m.distance(&basis(0), &basis(1)), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m.distance(&basis(0), &basis(3)), 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m.distance(&basis(2), &basis(2)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_shortcut_bound() {
        let m = hamming_metric(2, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(CVec::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(-s, 0.0)]), vec![2, 2]).unwrap();
        let v = m.distance(&basis(0), &bell);
        assert!(v <= std::f64::consts::SQRT_2 + 1e-6, "{v}");
        assert_abs_diff_eq!(v, 0.5 + std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-6);
    }

    #[test]
    fn capacity_and_cache() {
        assert!(matches!(hamming_metric(2, 4), Err(Error::Capacity(_))));
        assert!(matches!(hamming_metric(4, 2), Err(Error::Capacity(_))));
        let h = HammingMetric::new(vec![2, 2]);
        let mut r = rng::rng(3);
        let a = haar_pure(&[2, 2], &mut r).unwrap();
        let b = haar_pure(&[2, 2], &mut r).unwrap();
        let ab = h.distance(&a, &b);
        let ba = h.distance(&b, &a);
        assert_eq!(ab, ba);
        assert_eq!(h.cache_len(), 1);
    }

    #[test]
    fn single_site_agrees_with_trace_and_dominates_it() {
        let h1 = hamming_metric(3, 1).unwrap();
        let t = trace_metric(&[3]).unwrap();
        let h2 = hamming_metric(2, 2).unwrap();
        let t2 = trace_metric(&[2, 2]).unwrap();
        let mut r = rng::rng(11);
        for _ in 0..5 {
            let a = haar_pure(&[3], &mut r).unwrap();
            let b = haar_pure(&[3], &mut r).unwrap();
            assert_abs_diff_eq!(h1.distance(&a, &b), t.distance(&a, &b), epsilon = 1e-6);
            let a = haar_pure(&[2, 2], &mut r).unwrap();
            let b = haar_pure(&[2, 2], &mut r).unwrap();
            let v = h2.distance(&a, &b);
            assert!(v >= t2.distance(&a, &b) - 1e-7 && v <= 2.0 + 1e-7);
        }
    }

    #[test]
    fn danskin_gradient_matches_differences() {
        let spec = hamming_metric(2, 2).unwrap();
        let mut r = rng::rng(5);
        let a = haar_pure(&[2, 2], &mut r).unwrap();
        let b = haar_pure(&[2, 2], &mut r).unwrap();
        let (ga, _) = spec.gradient(&a, &b).unwrap();
        let (na, _) = spec.numerical_gradient(&a, &b, 1e-4);
        let proj = |v: &CVec, g: &CVec| g - v * v.dotc(g);
        let err = (proj(a.amplitudes(), &ga) - proj(a.amplitudes(), &na)).norm();
        assert!(err < 1e-3, "{err}");
    }
}
