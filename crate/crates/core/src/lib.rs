//! Convolution of probability measures over group actions.
//!
//! The toolkit computes the convolution `μ∗ν` of a measure on an acting group
//! with a measure on the space — exactly for finitely supported measures and
//! by seeded Monte Carlo for sampler-backed measures — and verifies its
//! structural laws at desk scale: Fubini identities, associativity, the
//! semigroup of measures on a group, weak-topology continuity, empirical
//! approximation of measures by averages of point masses, and the finite
//! enveloping-semigroup picture in exact rational arithmetic.

pub mod approx;
pub mod builtin;
pub mod circle;
pub mod convolution;
pub mod ellis;
pub mod group;
pub mod io;
pub mod laws;
pub mod measure;
pub mod product;
pub mod rng;
pub mod sampled;
pub mod weak;
pub mod sets;
pub mod system;
pub mod testfn;
pub mod weight;

pub use circle::{Angle, Arc, ArcUnion, RectUnion};
pub use group::{FiniteGroup, GroupIndex};
pub use measure::{pushforward, FiniteMeasure, MeasureError};
pub use rng::SampleKey;
pub use sampled::{McEstimate, SampledMeasure};
pub use sets::IndexSet;
pub use system::{CircleRotation, FiniteSelfAction, FiniteSystem, PairSet, PointIndex, System};
pub use testfn::TestFunction;
pub use weight::{Rational, Weight};
