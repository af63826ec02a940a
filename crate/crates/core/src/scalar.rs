//! Numeric abstraction shared by the feature, rule and evaluation code.
//!
//! Feature vectors and validity rules are generic over [`Scalar`], which is
//! implemented for `f32`, `f64` and the exact [`Rational64`]. The sampling and
//! normalization machinery needs transcendental functions and uses
//! [`FloatScalar`] instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// A number a feature value can be stored in.
pub trait Scalar:
    Num + Signed + PartialOrd + Copy + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Nearest representable value to `numer / denom`.
    ///
    /// Floating-point implementations round once, so a value computed from an
    /// exact fraction never drifts past a bound that the fraction respects.
    fn from_fraction(numer: i128, denom: i128) -> Self;

    fn from_count(count: u64) -> Self {
        Self::from_fraction(count as i128, 1)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Round half away from zero.
    fn round_nearest(self) -> Self;

    fn is_integral(self) -> bool {
        self.round_nearest() == self
    }
}

/// Floating-point scalars, for everything that needs `sqrt` or a Gaussian.
pub trait FloatScalar: Scalar + Float + Sum + Display {}

impl<T> FloatScalar for T where T: Scalar + Float + Sum + Display {}

fn reduce(numer: i128, denom: i128) -> (i128, i128) {
    assert!(denom != 0, "zero denominator");
    let (mut a, mut b) = (numer.unsigned_abs(), denom.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    let g = a.max(1) as i128;
    let sign = if denom < 0 { -1 } else { 1 };
    (sign * numer / g, sign * denom / g)
}

impl Scalar for f64 {
    fn from_fraction(numer: i128, denom: i128) -> Self {
        let (n, d) = reduce(numer, denom);
        // Exact when both fit in the 53-bit mantissa; IEEE division then
        // returns the correctly rounded quotient.
        n as f64 / d as f64
    }

    fn round_nearest(self) -> Self {
        self.round()
    }
}

impl Scalar for f32 {
    fn from_fraction(numer: i128, denom: i128) -> Self {
        let (n, d) = reduce(numer, denom);
        if n.unsigned_abs() < (1 << 24) && d.unsigned_abs() < (1 << 24) {
            n as f32 / d as f32
        } else {
            (n as f64 / d as f64) as f32
        }
    }

    fn round_nearest(self) -> Self {
        self.round()
    }
}

impl Scalar for Rational64 {
    fn from_fraction(numer: i128, denom: i128) -> Self {
        let (n, d) = reduce(numer, denom);
        Rational64::new(
            i64::try_from(n).expect("numerator overflows i64"),
            i64::try_from(d).expect("denominator overflows i64"),
        )
    }

    fn round_nearest(self) -> Self {
        self.round()
    }

    fn to_f64_lossy(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
