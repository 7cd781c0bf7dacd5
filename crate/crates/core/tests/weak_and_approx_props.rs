//! Property tests for the weak-topology witness and the sample-size bound.

use convact_core::approx::hoeffding_samples;
use convact_core::builtin;
use convact_core::convolution::convolve;
use convact_core::testfn::TestFunction;
use convact_core::weak::{member, pull_back_neighborhood, Membership, WeakNeighborhood};
use convact_core::weight::{ratio, Rational};
use convact_core::{FiniteMeasure, GroupIndex, PointIndex};

use proptest::prelude::*;

fn weights(universe: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..=16, universe)
        .prop_filter("needs mass", |raw| raw.iter().any(|&v| v > 0))
}

fn measure_from<P: Clone + Ord + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static>(
    raw: &[u64],
    point: impl Fn(usize) -> P,
) -> FiniteMeasure<P, Rational> {
    let mut raw = raw.to_vec();
    if raw.iter().all(|&v| v == 0) {
        raw[0] = 1;
    }
    let den: u64 = raw.iter().sum();
    FiniteMeasure::new(
        raw.iter()
            .enumerate()
            .map(|(i, &v)| (point(i), ratio(v as i64, den)))
            .collect(),
    )
    .expect("normalized by construction")
}

proptest! {
    #[test]
    fn pull_back_is_sound_and_exact(
        raw_mu in weights(8),
        raw_nu in weights(4),
        values in prop::collection::vec(-8i64..=8, 4),
        lo in -16i64..=14,
        width in 1i64..=16,
    ) {
        let sys = builtin::dihedral_4();
        let mu = measure_from(&raw_mu, GroupIndex);
        let nu_prime = measure_from(&raw_nu, PointIndex);
        let table: Vec<Rational> = values.iter().map(|&v| ratio(v, 8)).collect();
        let f = TestFunction::new("table", ratio(1, 1), move |x: &PointIndex| table[x.0].clone());
        let neighborhood = WeakNeighborhood::new([(
            f,
            ratio(lo, 16),
            ratio(lo + width, 16),
        )]).unwrap();
        let pulled = pull_back_neighborhood(&sys, &mu, &neighborhood);

        // the displayed chain holds exactly
        let convolved = convolve(&sys, &mu, &nu_prime);
        let lhs = convolved.integrate(&neighborhood.constraints()[0].test_fn);
        let rhs = nu_prime.integrate(&pulled.constraints()[0].test_fn);
        prop_assert_eq!(lhs, rhs);

        // membership transports
        if member(&nu_prime, &pulled) == Membership::Inside {
            prop_assert_eq!(member(&convolved, &neighborhood), Membership::Inside);
        }
    }

    #[test]
    fn member_is_monotone_under_widening(
        raw in weights(4),
        values in prop::collection::vec(-8i64..=8, 4),
        lo in -16i64..=14,
        width in 1i64..=8,
        widen in 1i64..=8,
    ) {
        let nu = measure_from(&raw, PointIndex);
        let table: Vec<Rational> = values.iter().map(|&v| ratio(v, 8)).collect();
        let f = || {
            let table = table.clone();
            TestFunction::new("table", ratio(1, 1), move |x: &PointIndex| table[x.0].clone())
        };
        let narrow = WeakNeighborhood::new([(f(), ratio(lo, 16), ratio(lo + width, 16))]).unwrap();
        let wide = WeakNeighborhood::new([(
            f(),
            ratio(lo - widen, 16),
            ratio(lo + width + widen, 16),
        )]).unwrap();
        if member(&nu, &narrow) == Membership::Inside {
            prop_assert_eq!(member(&nu, &wide), Membership::Inside);
        }
    }

    #[test]
    fn hoeffding_samples_monotone(
        eps_num in 1u64..=40,
        delta_num in 1u64..=19,
        k in 1usize..=8,
        width_num in 0u64..=8,
    ) {
        let eps = eps_num as f64 / 100.0;
        let delta = delta_num as f64 / 20.0;
        let width = width_num as f64 / 2.0;
        let n = hoeffding_samples(eps, delta, k, width).unwrap();
        prop_assert!(n >= 1);
        // tightening any knob never shrinks the sample size
        prop_assert!(hoeffding_samples(eps / 2.0, delta, k, width).unwrap() >= n);
        prop_assert!(hoeffding_samples(eps, delta / 2.0, k, width).unwrap() >= n);
        prop_assert!(hoeffding_samples(eps, delta, k + 1, width).unwrap() >= n);
        prop_assert!(hoeffding_samples(eps, delta, k, width + 0.5).unwrap() >= n);
    }
}
