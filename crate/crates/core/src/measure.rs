//! Finite-support probability measures.
//!
//! A [`FiniteMeasure`] is a canonical list of `(point, weight)` pairs: sorted
//! by point, duplicates merged, zero weights dropped, total mass 1 (exactly in
//! rational mode, within drift policy in float mode). Canonical form makes
//! representation equality coincide with equality as measures.

use thiserror::Error;

use crate::rng::SampleKey;
use crate::system::{Point, PointSet, System};
use crate::testfn::TestFunction;
use crate::weight::{UnitSumCheck, Weight};

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("a probability measure needs nonempty support")]
    EmptySupport,
    #[error("negative weight {weight} at support index {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("total mass {mass} is not 1 (exact mode requires equality)")]
    MassNotOne { mass: String },
    #[error("total mass {mass} drifts too far from 1 to be float noise")]
    MassDrift { mass: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasure<P, W> {
    entries: Vec<(P, W)>,
}

impl<P: Point, W: Weight> FiniteMeasure<P, W> {
    /// Canonicalize and validate: merge duplicate points, drop zero weights,
    /// reject negatives, apply the mode's total-mass policy.
    pub fn new(entries: Vec<(P, W)>) -> Result<Self, MeasureError> {
        for (index, (_, w)) in entries.iter().enumerate() {
            if *w < W::zero() {
                return Err(MeasureError::NegativeWeight { index, weight: w.to_f64() });
            }
        }
        let canonical = Self::canonicalize(entries);
        if canonical.entries.is_empty() {
            return Err(MeasureError::EmptySupport);
        }
        let mass = canonical.total_mass();
        match W::unit_sum_check(&mass) {
            UnitSumCheck::Ok => Ok(canonical),
            UnitSumCheck::Renormalize => {
                let entries = canonical
                    .entries
                    .into_iter()
                    .map(|(p, w)| (p, w / mass.clone()))
                    .collect();
                Ok(Self { entries })
            }
            UnitSumCheck::Reject => {
                if W::EXACT {
                    Err(MeasureError::MassNotOne { mass: mass.to_string() })
                } else {
                    Err(MeasureError::MassDrift { mass: mass.to_f64() })
                }
            }
        }
    }

    // Canonical form without the mass policy; for internal ops that preserve
    // mass by construction (push-forward, convolution) and must stay total.
    pub(crate) fn from_unchecked(entries: Vec<(P, W)>) -> Self {
        Self::canonicalize(entries)
    }

    fn canonicalize(mut entries: Vec<(P, W)>) -> Self {
        entries.sort_by(|(p, _), (q, _)| p.cmp(q));
        let mut merged: Vec<(P, W)> = Vec::with_capacity(entries.len());
        for (p, w) in entries {
            match merged.last_mut() {
                Some((q, acc)) if *q == p => *acc = acc.clone() + w,
                _ => merged.push((p, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        Self { entries: merged }
    }

    /// Unit mass at one point.
    pub fn dirac(point: P) -> Self {
        Self { entries: vec![(point, W::one())] }
    }

    /// The uniform average `(1/n) Σ δ_{points[i]}`; duplicates merge.
    pub fn average_of_points(points: &[P]) -> Result<Self, MeasureError> {
        if points.is_empty() {
            return Err(MeasureError::EmptySupport);
        }
        let n = points.len() as u64;
        let share = W::from_ratio(1, n);
        Ok(Self::from_unchecked(
            points.iter().cloned().map(|p| (p, share.clone())).collect(),
        ))
    }

    pub fn entries(&self) -> &[(P, W)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = &P> {
        self.entries.iter().map(|(p, _)| p)
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn total_mass(&self) -> W {
        self.entries
            .iter()
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// The weight of a single point (zero off support).
    pub fn weight_of(&self, point: &P) -> W {
        match self.entries.binary_search_by(|(p, _)| p.cmp(point)) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => W::zero(),
        }
    }

    /// ν(E): the mass of a measurable set, an exact sum of support weights.
    pub fn mass_in<S: PointSet<P> + ?Sized>(&self, set: &S) -> W {
        self.entries
            .iter()
            .filter(|(p, _)| set.contains_point(p))
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// ∫ f dν = Σ w_i f(x_i), summed in canonical support order.
    pub fn integrate(&self, f: &TestFunction<P, W>) -> W {
        self.entries
            .iter()
            .fold(W::zero(), |acc, (p, w)| acc + w.clone() * f.evaluate(p))
    }

    /// Relabel support through `map` and merge collisions.
    pub fn map_points<Q: Point>(&self, map: impl Fn(&P) -> Q) -> FiniteMeasure<Q, W> {
        FiniteMeasure::from_unchecked(
            self.entries.iter().map(|(p, w)| (map(p), w.clone())).collect(),
        )
    }

    /// Inverse-CDF draw over canonical support order at one sample index.
    pub fn sample_at(&self, key: SampleKey, index: u64) -> &P {
        let u = key.unit_at(index);
        let mut cumulative = 0.0;
        for (p, w) in &self.entries {
            cumulative += w.to_f64();
            if u < cumulative {
                return p;
            }
        }
        &self.entries.last().expect("nonempty support").0
    }

    /// Total variation distance: `½ Σ |w₁(x) − w₂(x)|` over merged support.
    /// Zero exactly when the two measures are equal (rational mode).
    pub fn tv_distance(&self, other: &Self) -> W {
        let mut sum = W::zero();
        let (mut i, mut j) = (0, 0);
        let half = W::from_ratio(1, 2);
        while i < self.entries.len() || j < other.entries.len() {
            let order = match (self.entries.get(i), other.entries.get(j)) {
                (Some((p, _)), Some((q, _))) => p.cmp(q),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => unreachable!(),
            };
            let delta = match order {
                std::cmp::Ordering::Less => {
                    let w = self.entries[i].1.clone();
                    i += 1;
                    w
                }
                std::cmp::Ordering::Greater => {
                    let w = other.entries[j].1.clone();
                    j += 1;
                    w
                }
                std::cmp::Ordering::Equal => {
                    let w = (self.entries[i].1.clone() - other.entries[j].1.clone()).abs();
                    i += 1;
                    j += 1;
                    w
                }
            };
            sum = sum + delta;
        }
        half * sum
    }
}

/// Push-forward `g∗ν`: relabel the support through the action of `g`.
pub fn pushforward<S: System, W: Weight>(
    sys: &S,
    g: &S::GroupElem,
    nu: &FiniteMeasure<S::SpacePoint, W>,
) -> FiniteMeasure<S::SpacePoint, W> {
    nu.map_points(|x| sys.act(g, x))
}
