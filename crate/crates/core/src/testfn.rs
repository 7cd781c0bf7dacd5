//! Bounded test functions: the integrands that generate the weak topology.
//!
//! Every function carries a declared bound `B` with `|f| <= B`, checked at
//! every evaluation. A label keeps reports and configs readable; the label
//! grammar of the built-in catalog is parsed by [`finite_catalog`] and
//! [`circle_catalog`].

use std::f64::consts::TAU;
use std::sync::Arc;

use thiserror::Error;

use crate::circle::{Angle, ArcUnion};
use crate::sets::IndexSet;
use crate::system::{Point, PointSet};
use crate::weight::Weight;

#[derive(Clone)]
pub struct TestFunction<P, W> {
    label: String,
    bound: W,
    eval: Arc<dyn Fn(&P) -> W + Send + Sync>,
}

impl<P: Point, W: Weight> TestFunction<P, W> {
    pub fn new(
        label: impl Into<String>,
        bound: W,
        eval: impl Fn(&P) -> W + Send + Sync + 'static,
    ) -> Self {
        assert!(bound >= W::zero(), "bound must be nonnegative");
        Self { label: label.into(), bound, eval: Arc::new(eval) }
    }

    pub fn constant(value: W) -> Self {
        let bound = value.abs();
        let label = format!("const:{value}");
        Self::new(label, bound, move |_| value.clone())
    }

    /// Indicator of a measurable set (bound 1).
    pub fn indicator<S>(label: impl Into<String>, set: S) -> Self
    where
        S: PointSet<P> + Send + Sync + 'static,
    {
        Self::new(label, W::one(), move |p| {
            if set.contains_point(p) {
                W::one()
            } else {
                W::zero()
            }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bound(&self) -> &W {
        &self.bound
    }

    /// Evaluate, asserting the declared bound.
    pub fn evaluate(&self, point: &P) -> W {
        let value = (self.eval)(point);
        assert!(
            value.abs() <= self.bound,
            "test function '{}' broke its bound at {point}: |{value}| > {}",
            self.label,
            self.bound
        );
        value
    }
}

impl<P, W: std::fmt::Debug> std::fmt::Debug for TestFunction<P, W> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .finish()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown test-function label '{0}'")]
    Unknown(String),
    #[error("label '{label}': {problem}")]
    BadArgument { label: String, problem: String },
}

fn bad(label: &str, problem: impl Into<String>) -> CatalogError {
    CatalogError::BadArgument { label: label.to_string(), problem: problem.into() }
}

fn parse_scalar<W: Weight>(label: &str, text: &str) -> Result<W, CatalogError> {
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad(label, "bad numerator"))?;
        let den: u64 = den.trim().parse().map_err(|_| bad(label, "bad denominator"))?;
        if den == 0 {
            return Err(bad(label, "zero denominator"));
        }
        Ok(W::from_ratio(num, den))
    } else {
        let value: f64 = text.trim().parse().map_err(|_| bad(label, "bad number"))?;
        Ok(W::from_f64(value))
    }
}

/// Resolve a label against the finite-space catalog:
/// `const:<scalar>`, `point:<i>`, `set:<i>,<j>,...`.
pub fn finite_catalog<W: Weight>(
    label: &str,
    space_size: usize,
) -> Result<TestFunction<crate::system::PointIndex, W>, CatalogError> {
    let (kind, arg) = label.split_once(':').unwrap_or((label, ""));
    match kind {
        "const" => Ok(TestFunction::constant(parse_scalar(label, arg)?)),
        "point" => {
            let i: usize = arg.trim().parse().map_err(|_| bad(label, "bad index"))?;
            if i >= space_size {
                return Err(bad(label, format!("index {i} out of space size {space_size}")));
            }
            Ok(TestFunction::indicator(label, IndexSet::from_indices(space_size, [i])))
        }
        "set" => {
            let mut indices = Vec::new();
            for part in arg.split(',').filter(|s| !s.trim().is_empty()) {
                let i: usize = part.trim().parse().map_err(|_| bad(label, "bad index"))?;
                if i >= space_size {
                    return Err(bad(label, format!("index {i} out of space size {space_size}")));
                }
                indices.push(i);
            }
            Ok(TestFunction::indicator(label, IndexSet::from_indices(space_size, indices)))
        }
        _ => Err(CatalogError::Unknown(label.to_string())),
    }
}

/// Resolve a label against the circle catalog:
/// `const:<scalar>`, `cos:<k>`, `sin:<k>`, `cos2:<k>`, `arc:<a>,<b>`.
pub fn circle_catalog(label: &str) -> Result<TestFunction<Angle, f64>, CatalogError> {
    let (kind, arg) = label.split_once(':').unwrap_or((label, ""));
    let parse_freq = |arg: &str| -> Result<f64, CatalogError> {
        let k: u32 = arg.trim().parse().map_err(|_| bad(label, "bad frequency"))?;
        if k == 0 {
            return Err(bad(label, "frequency must be positive"));
        }
        Ok(f64::from(k))
    };
    match kind {
        "const" => Ok(TestFunction::constant(parse_scalar(label, arg)?)),
        "cos" => {
            let k = parse_freq(arg)?;
            Ok(TestFunction::new(label, 1.0, move |t: &Angle| (TAU * k * t.value()).cos()))
        }
        "sin" => {
            let k = parse_freq(arg)?;
            Ok(TestFunction::new(label, 1.0, move |t: &Angle| (TAU * k * t.value()).sin()))
        }
        "cos2" => {
            let k = parse_freq(arg)?;
            Ok(TestFunction::new(label, 1.0, move |t: &Angle| {
                (TAU * k * t.value()).cos().powi(2)
            }))
        }
        "arc" => {
            let (a, b) = arg.split_once(',').ok_or_else(|| bad(label, "need two endpoints"))?;
            let a: f64 = a.trim().parse().map_err(|_| bad(label, "bad endpoint"))?;
            let b: f64 = b.trim().parse().map_err(|_| bad(label, "bad endpoint"))?;
            let set = ArcUnion::new([(a, b)]).map_err(|e| bad(label, e.to_string()))?;
            Ok(TestFunction::indicator(label, set))
        }
        _ => Err(CatalogError::Unknown(label.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::PointIndex;
    use crate::weight::{ratio, Rational};

    #[test]
    fn constant_and_indicator_evaluate() {
        let c: TestFunction<PointIndex, Rational> = TestFunction::constant(ratio(2, 3));
        assert_eq!(c.evaluate(&PointIndex(0)), ratio(2, 3));
        let ind: TestFunction<PointIndex, Rational> =
            TestFunction::indicator("point:0", IndexSet::from_indices(2, [0]));
        assert_eq!(ind.evaluate(&PointIndex(0)), ratio(1, 1));
        assert_eq!(ind.evaluate(&PointIndex(1)), ratio(0, 1));
    }

    #[test]
    #[should_panic(expected = "broke its bound")]
    fn bound_violation_panics() {
        let f: TestFunction<PointIndex, Rational> =
            TestFunction::new("bad", ratio(1, 2), |_| ratio(1, 1));
        f.evaluate(&PointIndex(0));
    }

    #[test]
    fn finite_catalog_labels() {
        let f = finite_catalog::<Rational>("const:1/2", 3).unwrap();
        assert_eq!(f.evaluate(&PointIndex(2)), ratio(1, 2));
        let f = finite_catalog::<Rational>("set:0,2", 3).unwrap();
        assert_eq!(f.evaluate(&PointIndex(2)), ratio(1, 1));
        assert_eq!(f.evaluate(&PointIndex(1)), ratio(0, 1));
        assert!(finite_catalog::<Rational>("point:9", 3).is_err());
        assert!(finite_catalog::<Rational>("mystery", 3).is_err());
    }

    #[test]
    fn circle_catalog_labels() {
        let f = circle_catalog("cos:1").unwrap();
        assert!((f.evaluate(&Angle::new(0.0)) - 1.0).abs() < 1e-15);
        assert!((f.evaluate(&Angle::new(0.5)) + 1.0).abs() < 1e-15);
        let f = circle_catalog("arc:0.25,0.5").unwrap();
        assert_eq!(f.evaluate(&Angle::new(0.3)), 1.0);
        assert_eq!(f.evaluate(&Angle::new(0.6)), 0.0);
        assert!(circle_catalog("cos:0").is_err());
        assert!(circle_catalog("tan:1").is_err());
    }
}
