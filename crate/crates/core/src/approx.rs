//! Approximating the convolution action of an arbitrary group measure by an
//! empirical average of point masses.
//!
//! Given constraints `r_i < ∫f_i d(μ∗ν_i) < s_i` that `μ` satisfies with
//! slack `ε`, the module draws `n` group elements i.i.d. from `μ` — with `n`
//! from the Hoeffding bound and a union bound over the constraints — and
//! checks that `Av(ḡ) = (1/n)Σδ_{g_j}` lands in the same neighborhood. The
//! pivot function of constraint `i` is `H_i(g) = ∫f_i(g·x)dν_i(x)`, a finite
//! exact sum since the anchors `ν_i` are finitely supported, and
//! `∫H_i dAv(ḡ) = ∫f_i d(Av(ḡ)∗ν_i)` holds by the Fubini identity.

use serde::Serialize;
use thiserror::Error;

use crate::circle::Angle;
use crate::convolution::convolve;
use crate::measure::FiniteMeasure;
use crate::rng::SampleKey;
use crate::sampled::{hoeffding_half_width, SampledMeasure};
use crate::system::{Point, System};
use crate::testfn::TestFunction;
use crate::weight::Weight;

#[derive(Debug, Error, PartialEq)]
pub enum ApproxError {
    #[error("slack epsilon must be positive, got {0}")]
    InvalidSlack(f64),
    #[error("failure probability delta must be in (0,1), got {0}")]
    InvalidFailureProbability(f64),
    #[error("at least one constraint is required")]
    NoConstraints,
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("unsolvable request at constraint {constraint} ('{label}'): {reason}")]
    Unsolvable { constraint: usize, label: String, reason: String },
}

/// Smallest `n` for which an empirical mean of a function with the given
/// range width stays within `epsilon` of its expectation, simultaneously for
/// `constraints` functions, with failure probability at most `delta`:
/// `n = ⌈width²·ln(2k/δ) / (2ε²)⌉`. Width-zero functions need one sample.
pub fn hoeffding_samples(
    epsilon: f64,
    delta: f64,
    constraints: usize,
    range_width: f64,
) -> Result<u64, ApproxError> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(ApproxError::InvalidSlack(epsilon));
    }
    if delta.is_nan() || delta <= 0.0 || delta >= 1.0 {
        return Err(ApproxError::InvalidFailureProbability(delta));
    }
    assert!(constraints >= 1, "need at least one constraint");
    assert!(range_width >= 0.0, "range width must be nonnegative");
    if range_width == 0.0 {
        return Ok(1);
    }
    let k = constraints as f64;
    let n = (range_width * range_width * (2.0 * k / delta).ln() / (2.0 * epsilon * epsilon)).ceil();
    Ok((n as u64).max(1))
}

/// Sources that can be sampled for group elements. Finite measures draw by
/// inverse CDF over canonical support order; sampler-backed measures draw
/// directly. Finite sources also expose the exact integral used to pin down
/// approximation targets.
pub trait GroupDraw<G> {
    fn draw(&self, key: SampleKey, index: u64) -> G;

    /// `∫h dμ` when the representation affords an exact finite sum.
    fn integrate_f64(&self, h: &dyn Fn(&G) -> f64) -> Option<f64> {
        let _ = h;
        None
    }
}

impl<G: Point, W: Weight> GroupDraw<G> for FiniteMeasure<G, W> {
    fn draw(&self, key: SampleKey, index: u64) -> G {
        self.sample_at(key, index).clone()
    }

    fn integrate_f64(&self, h: &dyn Fn(&G) -> f64) -> Option<f64> {
        Some(
            self.entries()
                .iter()
                .fold(0.0, |acc, (g, w)| acc + w.to_f64() * h(g)),
        )
    }
}

impl GroupDraw<Angle> for SampledMeasure {
    fn draw(&self, key: SampleKey, index: u64) -> Angle {
        self.sample(key, index)
    }
}

/// `Av(ḡ)` for `ḡ` drawn i.i.d. from the source: the uniform average
/// `(1/n)Σδ_{g_j}`, collisions merged. Returns the draw list alongside.
pub fn empirical_average<G: Point, W: Weight>(
    source: &impl GroupDraw<G>,
    n: u64,
    key: SampleKey,
) -> Result<(Vec<G>, FiniteMeasure<G, W>), ApproxError> {
    if n == 0 {
        return Err(ApproxError::ZeroSamples);
    }
    let draws: Vec<G> = (0..n).map(|i| source.draw(key, i)).collect();
    let average = FiniteMeasure::average_of_points(&draws).expect("n >= 1");
    Ok((draws, average))
}

/// Deterministic counterpart of [`empirical_average`]: when every `n·w_i` is
/// an integer, the multiset holding each support point `n·w_i` times has
/// `Av = μ` exactly. Returns `None` otherwise.
pub fn enumerate_average<G: Point, W: Weight>(
    mu: &FiniteMeasure<G, W>,
    n: u64,
) -> Option<Vec<G>> {
    let mut draws = Vec::with_capacity(n as usize);
    for (g, w) in mu.entries() {
        let scaled = w.clone() * W::from_ratio(n as i64, 1);
        let count = scaled.to_f64().round();
        if (scaled - W::from_f64(count)).abs() != W::zero() {
            return None;
        }
        for _ in 0..count as u64 {
            draws.push(g.clone());
        }
    }
    Some(draws)
}

/// One pinned constraint of the target neighborhood: an anchor measure, a
/// test function, and the open band the convolution must land in.
#[derive(Clone, Debug)]
pub struct PinnedConstraint<S: System, W> {
    pub anchor: FiniteMeasure<S::SpacePoint, W>,
    pub test_fn: TestFunction<S::SpacePoint, W>,
    pub lower: W,
    pub upper: W,
}

#[derive(Clone, Debug)]
pub struct ApproximationRequest<S: System, W> {
    pub constraints: Vec<PinnedConstraint<S, W>>,
    /// Approximation slack: targets must sit `epsilon` inside their bands.
    pub epsilon: f64,
    /// Failure probability budget of the draw.
    pub delta: f64,
    /// Total attempts (first try plus retries on statistical failure).
    pub max_attempts: u32,
    /// Pilot budget for estimating targets when the source has no exact path.
    pub estimate_budget: u64,
}

impl<S: System, W> ApproximationRequest<S, W> {
    pub fn new(constraints: Vec<PinnedConstraint<S, W>>, epsilon: f64, delta: f64) -> Self {
        Self { constraints, epsilon, delta, max_attempts: 4, estimate_budget: 4096 }
    }
}

/// Per-constraint record of one attempt.
#[derive(Clone, Debug, Serialize)]
pub struct ConstraintRecord {
    pub constraint: usize,
    pub label: String,
    /// `∫f d(μ∗ν)` — the value being approximated.
    pub target: f64,
    /// Uncertainty of the target (zero when computed exactly).
    pub target_half_width: f64,
    /// `∫f d(Av(ḡ)∗ν)`, computed exactly from the finite average.
    pub achieved: f64,
    /// Realized Hoeffding half-width of the draw at size `n`.
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    /// Strict membership `lower < achieved < upper`.
    pub inside: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttemptRecord {
    pub attempt: u32,
    pub inside: bool,
    pub constraints: Vec<ConstraintRecord>,
}

/// Everything an approximation run produced.
#[derive(Clone, Debug)]
pub struct ApproxOutcome<G> {
    /// The drawn tuple of the last attempt.
    pub sample: Vec<G>,
    /// Draw count per attempt, from [`hoeffding_samples`].
    pub samples_per_attempt: u64,
    pub seed: u64,
    pub attempts: Vec<AttemptRecord>,
    /// Final verdict: did `(Av(ḡ)∗-)` land in the neighborhood.
    pub inside: bool,
}

/// Run the approximation: pin targets, size the draw, sample, verify, retry.
///
/// Statistical failure after all attempts is a normal outcome (`inside =
/// false`); an unsolvable request (a band narrower than `2ε`, or a target
/// demonstrably outside its shrunken band) is an error.
pub fn approximate_action<S, W, M>(
    sys: &S,
    source: &M,
    request: &ApproximationRequest<S, W>,
    seed: u64,
) -> Result<ApproxOutcome<S::GroupElem>, ApproxError>
where
    S: System,
    W: Weight,
    M: GroupDraw<S::GroupElem>,
{
    if request.constraints.is_empty() {
        return Err(ApproxError::NoConstraints);
    }
    if request.epsilon.is_nan() || request.epsilon <= 0.0 {
        return Err(ApproxError::InvalidSlack(request.epsilon));
    }
    if request.delta.is_nan() || request.delta <= 0.0 || request.delta >= 1.0 {
        return Err(ApproxError::InvalidFailureProbability(request.delta));
    }
    let key = SampleKey::new(seed, 0);

    // The pivots H_i(g) = Σ_x ν_i(x)·f_i(g·x), exact finite sums.
    let pivot = |c: &PinnedConstraint<S, W>, g: &S::GroupElem| -> W {
        c.anchor.entries().iter().fold(W::zero(), |acc, (x, wx)| {
            acc + wx.clone() * c.test_fn.evaluate(&sys.act(g, x))
        })
    };

    // Targets t_i = ∫H_i dμ, exact when the source allows, else a pilot
    // estimate; and the structural slack check.
    let mut targets = Vec::with_capacity(request.constraints.len());
    let mut max_range_width: f64 = 0.0;
    for (i, c) in request.constraints.iter().enumerate() {
        let (lower, upper) = (c.lower.to_f64(), c.upper.to_f64());
        let label = c.test_fn.label().to_string();
        if upper - lower <= 2.0 * request.epsilon {
            return Err(ApproxError::Unsolvable {
                constraint: i,
                label,
                reason: format!(
                    "band width {} leaves no room for slack 2ε = {}",
                    upper - lower,
                    2.0 * request.epsilon
                ),
            });
        }
        let bound = c.test_fn.bound().to_f64();
        max_range_width = max_range_width.max(2.0 * bound);
        let h = |g: &S::GroupElem| pivot(c, g).to_f64();
        let (target, target_half_width) = match source.integrate_f64(&h) {
            Some(exact) => (exact, 0.0),
            None => {
                let m = request.estimate_budget.max(1);
                let pilot_key = key.substream(0);
                let mean = (0..m)
                    .map(|j| h(&source.draw(pilot_key, j)))
                    .sum::<f64>()
                    / m as f64;
                (mean, hoeffding_half_width(bound, request.delta, m))
            }
        };
        // demonstrably outside the shrunken band (beyond estimation noise)
        if target <= lower + request.epsilon - target_half_width
            || target >= upper - request.epsilon + target_half_width
        {
            return Err(ApproxError::Unsolvable {
                constraint: i,
                label,
                reason: format!(
                    "target {target} violates the slack condition ({} , {})",
                    lower + request.epsilon,
                    upper - request.epsilon
                ),
            });
        }
        targets.push((target, target_half_width));
    }

    let n = hoeffding_samples(
        request.epsilon,
        request.delta,
        request.constraints.len(),
        max_range_width,
    )?;
    let realized_half_width = if max_range_width == 0.0 {
        0.0
    } else {
        // invert the sample-size bound at the realized n
        max_range_width
            * ((2.0 * request.constraints.len() as f64 / request.delta).ln() / (2.0 * n as f64))
                .sqrt()
    };

    let mut attempts = Vec::new();
    let mut last_sample = Vec::new();
    let mut inside = false;
    for attempt in 0..request.max_attempts.max(1) {
        let draw_key = key.substream(1 + u64::from(attempt));
        let (draws, average) = empirical_average::<S::GroupElem, W>(source, n, draw_key)?;
        let mut records = Vec::with_capacity(request.constraints.len());
        let mut all_inside = true;
        for (i, c) in request.constraints.iter().enumerate() {
            let achieved = convolve(sys, &average, &c.anchor).integrate(&c.test_fn);
            let is_inside = c.lower < achieved && achieved < c.upper;
            all_inside &= is_inside;
            records.push(ConstraintRecord {
                constraint: i,
                label: c.test_fn.label().to_string(),
                target: targets[i].0,
                target_half_width: targets[i].1,
                achieved: achieved.to_f64(),
                half_width: realized_half_width,
                lower: c.lower.to_f64(),
                upper: c.upper.to_f64(),
                inside: is_inside,
            });
        }
        attempts.push(AttemptRecord { attempt, inside: all_inside, constraints: records });
        last_sample = draws;
        if all_inside {
            inside = true;
            break;
        }
    }

    Ok(ApproxOutcome {
        sample: last_sample,
        samples_per_attempt: n,
        seed,
        attempts,
        inside,
    })
}
