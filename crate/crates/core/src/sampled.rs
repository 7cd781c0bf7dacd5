//! Sampler-backed measures on the circle and Monte Carlo evaluation.
//!
//! A [`SampledMeasure`] owns a deterministic sampler `(key, index) -> point`,
//! so a fixed seed reproduces the identical draw stream regardless of how the
//! index loop is scheduled. Measures may carry an exact evaluator on arc
//! unions (the uniform measure evaluates arcs by length), which serves as the
//! ground-truth oracle in the circle scenarios.

use std::sync::Arc;

use thiserror::Error;

use crate::circle::{Angle, ArcUnion};
use crate::rng::SampleKey;
use crate::testfn::TestFunction;

/// Default per-comparison failure probability of the half-width policy.
pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum McError {
    #[error("sample budget must be positive")]
    ZeroBudget,
    #[error("measure '{0}' has no exact evaluator and the sample budget is 0")]
    NoEvaluator(String),
}

type ArcEvaluator = Arc<dyn Fn(&ArcUnion) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct SampledMeasure {
    label: String,
    sampler: Arc<dyn Fn(SampleKey, u64) -> Angle + Send + Sync>,
    exact_on_arcs: Option<ArcEvaluator>,
}

impl SampledMeasure {
    pub fn new(
        label: impl Into<String>,
        sampler: impl Fn(SampleKey, u64) -> Angle + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), sampler: Arc::new(sampler), exact_on_arcs: None }
    }

    pub fn with_exact_evaluator(
        mut self,
        evaluator: impl Fn(&ArcUnion) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.exact_on_arcs = Some(Arc::new(evaluator));
        self
    }

    /// The uniform (Haar) measure: draws are raw unit samples, arcs evaluate
    /// to their length.
    pub fn uniform() -> Self {
        Self::new("uniform", |key, index| Angle::new(key.unit_at(index)))
            .with_exact_evaluator(ArcUnion::total_length)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_exact_evaluator(&self) -> bool {
        self.exact_on_arcs.is_some()
    }

    /// The draw at one index of one stream.
    pub fn sample(&self, key: SampleKey, index: u64) -> Angle {
        (self.sampler)(key, index)
    }

    pub fn sample_block(&self, key: SampleKey, start: u64, count: u64) -> Vec<Angle> {
        (start..start + count).map(|i| self.sample(key, i)).collect()
    }

    /// ν(E) through the exact evaluator, when the measure has one.
    pub fn exact_mass(&self, set: &ArcUnion) -> Option<f64> {
        self.exact_on_arcs.as_ref().map(|eval| eval(set))
    }

    /// Push-forward under rotation by `g`: draws are rotated, and an exact
    /// evaluator transports through the preimage `E - g`.
    pub fn rotate(&self, g: Angle) -> Self {
        let inner = Arc::clone(&self.sampler);
        let rotated_sampler = move |key: SampleKey, index: u64| inner(key, index).rotate(g);
        let mut out = Self {
            label: format!("rot({g})·{}", self.label),
            sampler: Arc::new(rotated_sampler),
            exact_on_arcs: None,
        };
        if let Some(eval) = &self.exact_on_arcs {
            let eval = Arc::clone(eval);
            out.exact_on_arcs = Some(Arc::new(move |set: &ArcUnion| eval(&set.rotate(g.negate()))));
        }
        out
    }
}

impl std::fmt::Debug for SampledMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledMeasure")
            .field("label", &self.label)
            .field("exact_on_arcs", &self.exact_on_arcs.is_some())
            .finish()
    }
}

/// A Monte Carlo value with its Hoeffding half-width. Exact results report a
/// zero half-width and a zero sample count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub half_width: f64,
    pub samples: u64,
}

impl McEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, half_width: 0.0, samples: 0 }
    }

    /// Two estimates agree when their interval half-widths overlap.
    pub fn agrees_with(&self, other: &Self) -> bool {
        (self.value - other.value).abs() <= self.half_width + other.half_width
    }
}

/// Half-width of the two-sided Hoeffding bound at confidence `1 - delta` for
/// a function bounded by `bound`: `B·sqrt(ln(2/δ) / (2n))`.
pub fn hoeffding_half_width(bound: f64, delta: f64, samples: u64) -> f64 {
    assert!(samples > 0);
    assert!(delta > 0.0 && delta < 1.0, "delta must be in (0,1)");
    bound * ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

/// `∫ f dν` by the empirical mean of `budget` seeded draws, with the
/// half-width at `delta` reported alongside.
pub fn integrate_sampled(
    f: &TestFunction<Angle, f64>,
    nu: &SampledMeasure,
    key: SampleKey,
    budget: u64,
    delta: f64,
) -> Result<McEstimate, McError> {
    if budget == 0 {
        return Err(McError::ZeroBudget);
    }
    let mut sum = 0.0;
    for index in 0..budget {
        sum += f.evaluate(&nu.sample(key, index));
    }
    Ok(McEstimate {
        value: sum / budget as f64,
        half_width: hoeffding_half_width(*f.bound(), delta, budget),
        samples: budget,
    })
}

/// ν(E): the exact evaluator when present, otherwise the empirical frequency
/// of `budget` draws.
pub fn mass_sampled(
    nu: &SampledMeasure,
    set: &ArcUnion,
    key: SampleKey,
    budget: u64,
    delta: f64,
) -> Result<McEstimate, McError> {
    if let Some(value) = nu.exact_mass(set) {
        return Ok(McEstimate::exact(value));
    }
    if budget == 0 {
        return Err(McError::NoEvaluator(nu.label().to_string()));
    }
    let hits = (0..budget).filter(|&i| set.contains(nu.sample(key, i))).count();
    Ok(McEstimate {
        value: hits as f64 / budget as f64,
        half_width: hoeffding_half_width(1.0, delta, budget),
        samples: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::circle_catalog;

    #[test]
    fn uniform_arcs_evaluate_by_length() {
        let uniform = SampledMeasure::uniform();
        let set = ArcUnion::new([(0.25, 0.5)]).unwrap();
        assert_eq!(uniform.exact_mass(&set), Some(0.25));
        let est = mass_sampled(&uniform, &set, SampleKey::new(1, 0), 0, DEFAULT_DELTA).unwrap();
        assert_eq!(est, McEstimate::exact(0.25));
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let uniform = SampledMeasure::uniform();
        let f = circle_catalog("cos:1").unwrap();
        let key = SampleKey::new(99, 3);
        let a = integrate_sampled(&f, &uniform, key, 4096, DEFAULT_DELTA).unwrap();
        let b = integrate_sampled(&f, &uniform, key, 4096, DEFAULT_DELTA).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn cosine_over_uniform_vanishes_within_half_width() {
        let uniform = SampledMeasure::uniform();
        let f = circle_catalog("cos:1").unwrap();
        let est = integrate_sampled(&f, &uniform, SampleKey::new(7, 0), 20_000, DEFAULT_DELTA)
            .unwrap();
        assert!(est.value.abs() < est.half_width, "{est:?}");
    }

    #[test]
    fn zero_budget_is_an_error() {
        let uniform = SampledMeasure::uniform();
        let f = circle_catalog("cos:1").unwrap();
        assert_eq!(
            integrate_sampled(&f, &uniform, SampleKey::new(1, 0), 0, DEFAULT_DELTA).unwrap_err(),
            McError::ZeroBudget
        );
        let bare = SampledMeasure::new("bare", |key, i| Angle::new(key.unit_at(i)));
        let set = ArcUnion::full();
        assert!(matches!(
            mass_sampled(&bare, &set, SampleKey::new(1, 0), 0, DEFAULT_DELTA),
            Err(McError::NoEvaluator(_))
        ));
    }

    #[test]
    fn rotation_leaves_uniform_invariant_exactly() {
        // exact arc-length evaluator before and after the push-forward
        let uniform = SampledMeasure::uniform();
        let rotated = uniform.rotate(Angle::new(0.25));
        for set in [
            ArcUnion::new([(0.0, 0.5)]).unwrap(),
            ArcUnion::new([(0.125, 0.625)]).unwrap(),
            ArcUnion::new([(0.75, 0.25)]).unwrap(),
        ] {
            assert_eq!(rotated.exact_mass(&set), uniform.exact_mass(&set));
        }
    }

    #[test]
    fn empirical_frequency_tracks_exact_mass() {
        let bare = SampledMeasure::new("u", |key, i| Angle::new(key.unit_at(i)));
        let set = ArcUnion::new([(0.1, 0.45)]).unwrap();
        let est = mass_sampled(&bare, &set, SampleKey::new(13, 0), 20_000, DEFAULT_DELTA).unwrap();
        assert!((est.value - 0.35).abs() < est.half_width, "{est:?}");
    }
}
