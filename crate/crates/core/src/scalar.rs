//! Numeric backends.
//!
//! Every probability, payoff and risk value in the crate is generic over
//! [`Scalar`]. `f64` is the fast path used for sweeps and randomized checks;
//! [`Rational`] (arbitrary-precision fractions) gives exact arithmetic for the
//! oracle suites, where tolerances collapse to zero.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar: Clone + Debug + Display + PartialOrd + Signed + Send + Sync + 'static {
    /// Converts from a float. Exact for `Rational` (every finite float is a
    /// dyadic rational).
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Tolerance used where a float comparison needs slack; zero for exact
    /// backends.
    fn tol(eps: f64) -> Self;

    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn is_finite_value(&self) -> bool {
        self.to_f64().is_finite() || Self::EXACT
    }

    /// `self > 0`. Unlike `Signed::is_positive`, false for `+0.0`.
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    /// `self < 0`. Unlike `Signed::is_negative`, false for `-0.0`.
    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tol(eps: f64) -> Self {
        eps
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn tol(_eps: f64) -> Self {
        BigRational::zero()
    }

    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from_usize(n).expect("usize fits BigInt"))
    }
}

/// `n / d` as a rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `|a - b| <= tol`.
pub fn close<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub fn sum<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    values
        .into_iter()
        .fold(T::zero(), |acc, v| acc + v.clone())
}

/// Inner product of two equally long slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub(crate) fn cmp<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}
