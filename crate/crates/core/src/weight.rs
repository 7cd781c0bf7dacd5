//! Scalar weights for finite-support measures.
//!
//! Two arithmetic modes share one interface: [`Rational`] weights make the
//! semigroup laws hold with equality (no epsilons), [`f64`] weights back the
//! Monte Carlo paths. Construction-time mass checks differ per mode, see
//! [`Weight::unit_sum_check`].

use std::fmt::{Debug, Display};

use num::traits::{Signed, ToPrimitive};
use num::BigRational;

/// Exact rational weight. All algebraic-law suites run in this mode.
pub type Rational = BigRational;

/// Verdict of the total-mass check at measure construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSumCheck {
    /// Mass is acceptable as given.
    Ok,
    /// Mass drifted within the renormalization band; divide weights by the sum.
    Renormalize,
    /// Mass is too far from 1 to be float noise.
    Reject,
}

/// Float drift up to this bound is accepted as-is.
pub const FLOAT_DRIFT_ACCEPT: f64 = 1e-12;
/// Float drift up to this bound is renormalized away; beyond it, rejected.
pub const FLOAT_DRIFT_RENORMALIZE: f64 = 1e-9;

/// Scalar type usable as a measure weight.
///
/// `Signed` supplies the ring operations, `abs`, and zero/one. Implementations
/// additionally pin down the mode-specific mass policy and conversions.
pub trait Weight:
    Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// True when arithmetic in this mode is exact (laws hold with equality).
    const EXACT: bool;

    /// The fraction `num/den`, exact in rational mode.
    fn from_ratio(num: i64, den: u64) -> Self;

    /// Exact image of a float (rational mode converts the binary value).
    fn from_f64(value: f64) -> Self;

    /// Nearest float, for reports and sampling.
    fn to_f64(&self) -> f64;

    /// Mass policy applied to the sum of weights at construction.
    fn unit_sum_check(sum: &Self) -> UnitSumCheck;
}

impl Weight for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(num.into(), den.into())
    }

    fn from_f64(value: f64) -> Self {
        BigRational::from_float(value).expect("non-finite weight")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn unit_sum_check(sum: &Self) -> UnitSumCheck {
        if *sum == BigRational::from_integer(1.into()) {
            UnitSumCheck::Ok
        } else {
            UnitSumCheck::Reject
        }
    }
}

impl Weight for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(value: f64) -> Self {
        value
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn unit_sum_check(sum: &Self) -> UnitSumCheck {
        let drift = (sum - 1.0).abs();
        if drift <= FLOAT_DRIFT_ACCEPT {
            UnitSumCheck::Ok
        } else if drift <= FLOAT_DRIFT_RENORMALIZE {
            UnitSumCheck::Renormalize
        } else {
            UnitSumCheck::Reject
        }
    }
}

/// Shorthand for the exact rational `num/den`.
pub fn ratio(num: i64, den: u64) -> Rational {
    Rational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::{One, Zero};

    #[test]
    fn rational_sum_check_is_strict() {
        assert_eq!(Rational::unit_sum_check(&ratio(1, 1)), UnitSumCheck::Ok);
        assert_eq!(
            Rational::unit_sum_check(&ratio(999_999_999, 1_000_000_000)),
            UnitSumCheck::Reject
        );
    }

    #[test]
    fn float_sum_check_bands() {
        assert_eq!(f64::unit_sum_check(&1.0), UnitSumCheck::Ok);
        assert_eq!(f64::unit_sum_check(&(1.0 + 5e-13)), UnitSumCheck::Ok);
        assert_eq!(f64::unit_sum_check(&(1.0 + 5e-10)), UnitSumCheck::Renormalize);
        assert_eq!(f64::unit_sum_check(&(1.0 + 5e-9)), UnitSumCheck::Reject);
    }

    #[test]
    fn ratio_arithmetic_is_exact() {
        let half = ratio(1, 2);
        let third = ratio(1, 3);
        assert_eq!(half.clone() + third.clone(), ratio(5, 6));
        assert_eq!(half * third, ratio(1, 6));
        assert!(ratio(0, 5).is_zero());
        assert!(ratio(7, 7).is_one());
    }

    #[test]
    fn from_f64_rational_is_exact_binary() {
        assert_eq!(Rational::from_f64(0.25), ratio(1, 4));
        assert_eq!(Weight::to_f64(&Rational::from_f64(0.1)), 0.1);
    }
}
