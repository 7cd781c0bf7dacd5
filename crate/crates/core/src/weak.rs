//! Basic weak-open neighborhoods `{ν : r_i < ∫f_i dν < s_i}`, membership
//! tests, the Dirac embedding diagnostic, and the constructive continuity
//! witness: pulling a neighborhood of `μ∗ν` back to one of `ν`.
//!
//! Exact mode decides strict inequalities exactly and reports boundary hits
//! as outside (the sets are open). Sampled mode decides only when every
//! estimate clears its bound by the Hoeffding half-width, and says so
//! otherwise.

use thiserror::Error;

use crate::circle::Angle;
use crate::measure::FiniteMeasure;
use crate::rng::SampleKey;
use crate::sampled::{integrate_sampled, McError, SampledMeasure};
use crate::system::{Point, System};
use crate::testfn::TestFunction;
use crate::weight::Weight;

#[derive(Debug, Error, PartialEq)]
pub enum WeakError {
    #[error("constraint '{label}' needs lower < upper, got [{lower}, {upper}]")]
    InvalidBounds { label: String, lower: String, upper: String },
}

/// One band constraint `r < ∫f dν < s`.
#[derive(Clone, Debug)]
pub struct Constraint<P, W> {
    pub test_fn: TestFunction<P, W>,
    pub lower: W,
    pub upper: W,
}

/// A basic weak-open set: finitely many band constraints.
#[derive(Clone, Debug)]
pub struct WeakNeighborhood<P, W> {
    constraints: Vec<Constraint<P, W>>,
}

impl<P: Point, W: Weight> WeakNeighborhood<P, W> {
    pub fn new(
        constraints: impl IntoIterator<Item = (TestFunction<P, W>, W, W)>,
    ) -> Result<Self, WeakError> {
        let constraints: Vec<Constraint<P, W>> = constraints
            .into_iter()
            .map(|(test_fn, lower, upper)| Constraint { test_fn, lower, upper })
            .collect();
        for c in &constraints {
            if c.lower >= c.upper {
                return Err(WeakError::InvalidBounds {
                    label: c.test_fn.label().to_string(),
                    lower: c.lower.to_string(),
                    upper: c.upper.to_string(),
                });
            }
        }
        Ok(Self { constraints })
    }

    pub fn constraints(&self) -> &[Constraint<P, W>] {
        &self.constraints
    }
}

/// Outcome of a membership test. Exact mode never returns `Undecided`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Membership {
    Inside,
    Outside,
    /// The data cannot decide: the worst clearance (estimate distance to a
    /// bound minus the half-width) is reported; it is below zero.
    Undecided { margin: f64 },
}

/// Exact membership of a finite measure: every integral strictly inside its
/// band. A boundary hit is outside.
pub fn member<P: Point, W: Weight>(
    nu: &FiniteMeasure<P, W>,
    neighborhood: &WeakNeighborhood<P, W>,
) -> Membership {
    for c in neighborhood.constraints() {
        let value = nu.integrate(&c.test_fn);
        if value <= c.lower || value >= c.upper {
            return Membership::Outside;
        }
    }
    Membership::Inside
}

/// Statistical membership of a sampled measure. Inside/outside only when the
/// respective inequality clears the Hoeffding half-width for every (resp.
/// some) constraint; otherwise undecided with the worst margin.
pub fn member_sampled(
    nu: &SampledMeasure,
    neighborhood: &WeakNeighborhood<Angle, f64>,
    key: SampleKey,
    budget: u64,
    delta: f64,
) -> Result<Membership, McError> {
    let mut worst_inside_clearance = f64::INFINITY;
    for (lane, c) in neighborhood.constraints().iter().enumerate() {
        let est = integrate_sampled(&c.test_fn, nu, key.substream(lane as u64), budget, delta)?;
        let inside_clearance = (est.value - c.lower).min(c.upper - est.value) - est.half_width;
        let outside_clearance = (c.lower - est.value).max(est.value - c.upper) - est.half_width;
        if outside_clearance >= 0.0 {
            return Ok(Membership::Outside);
        }
        worst_inside_clearance = worst_inside_clearance.min(inside_clearance);
    }
    if worst_inside_clearance > 0.0 {
        Ok(Membership::Inside)
    } else {
        Ok(Membership::Undecided { margin: worst_inside_clearance })
    }
}

/// How far apart two points look through a finite test family:
/// `max_i |f_i(x) − f_i(y)|`. Zero when `x = y`.
pub fn dirac_embedding_check<P: Point, W: Weight>(
    x: &P,
    y: &P,
    testset: &[TestFunction<P, W>],
) -> W {
    testset.iter().fold(W::zero(), |best, f| {
        let gap = (f.evaluate(x) - f.evaluate(y)).abs();
        if gap > best {
            gap
        } else {
            best
        }
    })
}

/// Pull a neighborhood of `μ∗ν` back through a finite `μ`: constraint `i`
/// becomes `(H_i, r_i, s_i)` with `H_i(x) = Σ_g μ(g)·f_i(g·x)`, so that
/// `∫f_i d(μ∗ν′) = ∫H_i dν′` exactly and membership transports.
pub fn pull_back_neighborhood<S, W>(
    sys: &S,
    mu: &FiniteMeasure<S::GroupElem, W>,
    neighborhood: &WeakNeighborhood<S::SpacePoint, W>,
) -> WeakNeighborhood<S::SpacePoint, W>
where
    S: System + Clone + Send + Sync + 'static,
    W: Weight,
{
    let constraints = neighborhood.constraints().iter().map(|c| {
        let sys = sys.clone();
        let mu = mu.clone();
        let f = c.test_fn.clone();
        let bound = f.bound().clone();
        let label = format!("pullback({})", f.label());
        let pulled = TestFunction::new(label, bound, move |x: &S::SpacePoint| {
            mu.entries().iter().fold(W::zero(), |acc, (g, wg)| {
                acc + wg.clone() * f.evaluate(&sys.act(g, x))
            })
        });
        Constraint { test_fn: pulled, lower: c.lower.clone(), upper: c.upper.clone() }
    });
    WeakNeighborhood { constraints: constraints.collect() }
}

/// Pull-back through a sampled `μ` on the circle. A sample of `budget` group
/// elements is frozen once and shared by every evaluation point, so each
/// `H_i(x) = mean_j f_i(g_j + x)` is a genuine (deterministic) function.
pub fn pull_back_neighborhood_sampled(
    mu: &SampledMeasure,
    neighborhood: &WeakNeighborhood<Angle, f64>,
    key: SampleKey,
    budget: u64,
) -> Result<WeakNeighborhood<Angle, f64>, McError> {
    if budget == 0 {
        return Err(McError::ZeroBudget);
    }
    let frozen = mu.sample_block(key, 0, budget);
    let constraints = neighborhood
        .constraints()
        .iter()
        .map(|c| {
            let f = c.test_fn.clone();
            let bound = *f.bound();
            let label = format!("pullback[{budget}]({})", f.label());
            let sample = frozen.clone();
            let pulled = TestFunction::new(label, bound, move |x: &Angle| {
                let sum: f64 = sample.iter().map(|g| f.evaluate(&x.rotate(*g))).sum();
                sum / sample.len() as f64
            });
            Constraint { test_fn: pulled, lower: c.lower, upper: c.upper }
        })
        .collect();
    Ok(WeakNeighborhood { constraints })
}
