//! Shared fixtures for the benchmarks.

use convact_core::builtin;
use convact_core::system::{FiniteSystem, PointIndex};
use convact_core::weight::{ratio, Rational};
use convact_core::{FiniteMeasure, GroupIndex, SampleKey};

pub fn dihedral() -> FiniteSystem {
    builtin::dihedral_4()
}

/// A seeded rational measure with full support over `0..universe`.
pub fn rational_group_measure(sys: &FiniteSystem, seed: u64) -> FiniteMeasure<GroupIndex, Rational> {
    seeded_measure(sys.group().order(), seed, GroupIndex)
}

pub fn rational_space_measure(sys: &FiniteSystem, seed: u64) -> FiniteMeasure<PointIndex, Rational> {
    seeded_measure(sys.space_size(), seed, PointIndex)
}

fn seeded_measure<P: Clone + Ord + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static>(
    universe: usize,
    seed: u64,
    point: impl Fn(usize) -> P,
) -> FiniteMeasure<P, Rational> {
    let key = SampleKey::new(seed, 0);
    let raw: Vec<u64> = (0..universe as u64).map(|i| key.value_at(i) % 16 + 1).collect();
    let den: u64 = raw.iter().sum();
    FiniteMeasure::new(
        raw.iter()
            .enumerate()
            .map(|(i, &v)| (point(i), ratio(v as i64, den)))
            .collect(),
    )
    .expect("normalized")
}
