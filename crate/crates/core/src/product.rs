//! Product measures on `G × X` and their slicing identities.
//!
//! In finite mode the product is the weight grid `w(g,x) = μ(g)·ν(x)`; the
//! rectangle identity `λ(A×B) = μ(A)·ν(B)` holds exactly, and the iterated
//! integral over either axis equals the direct grid mass of a product set. In
//! sampled mode the product pairs draws from two independent streams.


use crate::circle::RectUnion;
use crate::measure::FiniteMeasure;
use crate::rng::SampleKey;
use crate::sampled::{hoeffding_half_width, McError, McEstimate, SampledMeasure};
use crate::system::{Point, PointSet, System};
use crate::weight::Weight;

/// Which coordinate the iterated integral runs over first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Integrate the group coordinate outside: `Σ_g μ(g)·ν(W_g)`.
    Left,
    /// Integrate the space coordinate outside: `Σ_x ν(x)·μ(W^x)`.
    Right,
}

/// The finite-mode product measure `μ × ν`, kept in factored form; the grid
/// weight of `(g, x)` is `μ(g)·ν(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductMeasure<G, X, W> {
    left: FiniteMeasure<G, W>,
    right: FiniteMeasure<X, W>,
}

impl<G: Point, X: Point, W: Weight> ProductMeasure<G, X, W> {
    pub fn new(left: FiniteMeasure<G, W>, right: FiniteMeasure<X, W>) -> Self {
        Self { left, right }
    }

    pub fn left(&self) -> &FiniteMeasure<G, W> {
        &self.left
    }

    pub fn right(&self) -> &FiniteMeasure<X, W> {
        &self.right
    }

    /// The materialized grid, in canonical (left, right) support order.
    pub fn grid(&self) -> impl Iterator<Item = (&G, &X, W)> {
        self.left.entries().iter().flat_map(move |(g, wg)| {
            self.right
                .entries()
                .iter()
                .map(move |(x, wx)| (g, x, wg.clone() * wx.clone()))
        })
    }

    pub fn total_mass(&self) -> W {
        self.grid().fold(W::zero(), |acc, (_, _, w)| acc + w)
    }

    /// The rectangle identity: `λ(A×B) = μ(A)·ν(B)`.
    pub fn rectangle_mass<SA, SB>(&self, a: &SA, b: &SB) -> W
    where
        SA: PointSet<G> + ?Sized,
        SB: PointSet<X> + ?Sized,
    {
        self.left.mass_in(a) * self.right.mass_in(b)
    }

    /// Direct grid mass of a product set: `Σ_{(g,x) ∈ W} μ(g)·ν(x)`.
    pub fn mass_of<S>(&self, sys: &S, set: &S::ProductSet) -> W
    where
        S: System<GroupElem = G, SpacePoint = X>,
    {
        self.grid().fold(W::zero(), |acc, (g, x, w)| {
            if sys.pair_in(set, g, x) {
                acc + w
            } else {
                acc
            }
        })
    }

    /// The iterated integral over one axis; equals [`ProductMeasure::mass_of`]
    /// exactly for every product set.
    pub fn slice_integral<S>(&self, sys: &S, set: &S::ProductSet, axis: Axis) -> W
    where
        S: System<GroupElem = G, SpacePoint = X>,
    {
        match axis {
            Axis::Left => self.left.entries().iter().fold(W::zero(), |acc, (g, wg)| {
                acc + wg.clone() * self.right.mass_in(&sys.slice_at_group(set, g))
            }),
            Axis::Right => self.right.entries().iter().fold(W::zero(), |acc, (x, wx)| {
                acc + wx.clone() * self.left.mass_in(&sys.slice_at_point(set, x))
            }),
        }
    }
}

/// Sampled-mode product on the circle: coordinates drawn from independent
/// sub-streams of the same key.
#[derive(Clone, Debug)]
pub struct SampledProduct {
    left: SampledMeasure,
    right: SampledMeasure,
}

impl SampledProduct {
    pub fn new(left: SampledMeasure, right: SampledMeasure) -> Self {
        Self { left, right }
    }

    pub fn sample(&self, key: SampleKey, index: u64) -> (crate::circle::Angle, crate::circle::Angle) {
        (
            self.left.sample(key.substream(0), index),
            self.right.sample(key.substream(1), index),
        )
    }

    /// Exact mass of a disjoint rectangle union when both factors carry exact
    /// evaluators: `Σ_j μ(A_j)·ν(B_j)`.
    pub fn exact_mass(&self, set: &RectUnion) -> Option<f64> {
        if !self.left.has_exact_evaluator() || !self.right.has_exact_evaluator() {
            return None;
        }
        let mut total = 0.0;
        for (a, b) in set.rects() {
            total += self.left.exact_mass(a)? * self.right.exact_mass(b)?;
        }
        Some(total)
    }

    /// Empirical frequency of paired draws landing in the set.
    pub fn mass_estimate(
        &self,
        set: &RectUnion,
        key: SampleKey,
        budget: u64,
        delta: f64,
    ) -> Result<McEstimate, McError> {
        if budget == 0 {
            return Err(McError::ZeroBudget);
        }
        let hits = (0..budget)
            .filter(|&i| {
                let (g, x) = self.sample(key, i);
                set.contains(g, x)
            })
            .count();
        Ok(McEstimate {
            value: hits as f64 / budget as f64,
            half_width: hoeffding_half_width(1.0, delta, budget),
            samples: budget,
        })
    }

    /// One-axis iterated integral: Monte Carlo on the chosen axis, the exact
    /// evaluator of the other factor on each slice. The other factor must
    /// carry an evaluator.
    pub fn slice_integral_estimate(
        &self,
        set: &RectUnion,
        axis: Axis,
        key: SampleKey,
        budget: u64,
        delta: f64,
    ) -> Result<McEstimate, McError> {
        if budget == 0 {
            return Err(McError::ZeroBudget);
        }
        let (outer, inner, lane) = match axis {
            Axis::Left => (&self.left, &self.right, 0),
            Axis::Right => (&self.right, &self.left, 1),
        };
        if !inner.has_exact_evaluator() {
            return Err(McError::NoEvaluator(inner.label().to_string()));
        }
        let mut sum = 0.0;
        for index in 0..budget {
            let t = outer.sample(key.substream(lane), index);
            let slice = match axis {
                Axis::Left => set.slice_at_first(t),
                Axis::Right => set.slice_at_second(t),
            };
            sum += inner.exact_mass(&slice).expect("evaluator checked above");
        }
        Ok(McEstimate {
            value: sum / budget as f64,
            half_width: hoeffding_half_width(1.0, delta, budget),
            samples: budget,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::group::GroupIndex;
    use crate::sampled::DEFAULT_DELTA;
    use crate::sets::IndexSet;
    use crate::system::{PairSet, PointIndex};
    use crate::weight::{ratio, Rational};

    fn z2_product() -> ProductMeasure<GroupIndex, PointIndex, Rational> {
        let mu = FiniteMeasure::new(vec![
            (GroupIndex(0), ratio(1, 2)),
            (GroupIndex(1), ratio(1, 2)),
        ])
        .unwrap();
        let nu = FiniteMeasure::dirac(PointIndex(0));
        ProductMeasure::new(mu, nu)
    }

    #[test]
    fn dirac_product_rectangle() {
        let lambda = ProductMeasure::<GroupIndex, PointIndex, Rational>::new(
            FiniteMeasure::dirac(GroupIndex(1)),
            FiniteMeasure::dirac(PointIndex(0)),
        );
        let sys = builtin::z2_swap();
        let w = PairSet::new([(GroupIndex(1), PointIndex(0))]);
        assert_eq!(lambda.mass_of(&sys, &w), ratio(1, 1));
    }

    #[test]
    fn rectangle_formula_and_total_mass() {
        let lambda = z2_product();
        let sys = builtin::z2_swap();
        // (½δ₀+½δ₁)×δ_a on {(0,a)} -> 1/2
        let w = PairSet::new([(GroupIndex(0), PointIndex(0))]);
        assert_eq!(lambda.mass_of(&sys, &w), ratio(1, 2));
        assert_eq!(
            lambda.rectangle_mass(
                &IndexSet::from_indices(2, [0]),
                &IndexSet::from_indices(2, [0])
            ),
            ratio(1, 2)
        );
        assert_eq!(lambda.total_mass(), ratio(1, 1));
    }

    #[test]
    fn slice_integral_example_both_axes() {
        // μ=½δ₀+½δ₁, ν=δ_a, W={(0,a),(1,b)}: both axes -> 1/2
        let lambda = z2_product();
        let sys = builtin::z2_swap();
        let w = PairSet::new([(GroupIndex(0), PointIndex(0)), (GroupIndex(1), PointIndex(1))]);
        // oracle: direct grid summation
        let direct = lambda.mass_of(&sys, &w);
        assert_eq!(direct, ratio(1, 2));
        assert_eq!(lambda.slice_integral(&sys, &w, Axis::Left), direct);
        assert_eq!(lambda.slice_integral(&sys, &w, Axis::Right), direct);
    }

    #[test]
    fn full_and_empty_product_sets() {
        let lambda = z2_product();
        let sys = builtin::z2_swap();
        let full = sys.all_pairs();
        let empty = PairSet::empty();
        for axis in [Axis::Left, Axis::Right] {
            assert_eq!(lambda.slice_integral(&sys, &full, axis), ratio(1, 1));
            assert_eq!(lambda.slice_integral(&sys, &empty, axis), ratio(0, 1));
        }
    }

    #[test]
    fn sampled_product_rectangle_in_expectation() {
        let product = SampledProduct::new(SampledMeasure::uniform(), SampledMeasure::uniform());
        let set = RectUnion::from_spans([((0.0, 0.5), (0.25, 0.75))]).unwrap();
        assert_eq!(product.exact_mass(&set), Some(0.25));
        let est = product
            .mass_estimate(&set, SampleKey::new(3, 0), 20_000, DEFAULT_DELTA)
            .unwrap();
        assert!((est.value - 0.25).abs() < est.half_width, "{est:?}");
    }

    #[test]
    fn sampled_slice_matches_exact_mass() {
        let product = SampledProduct::new(SampledMeasure::uniform(), SampledMeasure::uniform());
        let set = RectUnion::from_spans([((0.0, 0.5), (0.25, 0.75)), ((0.5, 0.75), (0.0, 0.25))])
            .unwrap();
        let exact = product.exact_mass(&set).unwrap();
        assert!((exact - 0.3125).abs() < 1e-15);
        for axis in [Axis::Left, Axis::Right] {
            let est = product
                .slice_integral_estimate(&set, axis, SampleKey::new(4, 0), 20_000, DEFAULT_DELTA)
                .unwrap();
            assert!((est.value - exact).abs() < est.half_width, "{axis:?}: {est:?}");
        }
    }

    #[test]
    fn sampled_slice_requires_inner_evaluator() {
        let bare = SampledMeasure::new("bare", |key, i| crate::Angle::new(key.unit_at(i)));
        let product = SampledProduct::new(SampledMeasure::uniform(), bare);
        let set = RectUnion::full();
        assert!(matches!(
            product.slice_integral_estimate(&set, Axis::Left, SampleKey::new(1, 0), 16, 0.05),
            Err(McError::NoEvaluator(_))
        ));
    }
}
