//! Floating-point scalars the numerical routines are generic over.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, ToPrimitive};
use twofloat::TwoFloat;

/// Real scalar usable by the floating-point kernels.
///
/// Implemented for `f32`, `f64` and the double-double [`TwoFloat`]. The
/// exact side of the crate works on [`BigRational`] and converts through
/// [`Real::from_rational`] only when a floating value is requested.
pub trait Real: Float + FloatConst + Debug + Display + Send + Sync + 'static {
    /// Exact conversion from an `f64` value (rounded for `f32`).
    fn of(x: f64) -> Self;

    /// Nearest representable value of an exact rational.
    fn from_rational(value: &BigRational) -> Self;

    /// Lossy conversion to `f64` for reporting.
    fn to_f64_lossy(self) -> f64;

    /// Unit roundoff of the type.
    fn unit_roundoff() -> Self;

    /// Correctly rounded (to working precision) division.
    ///
    /// Same as `/` except for [`TwoFloat`], whose `Div` impl in twofloat 0.8
    /// computes the reciprocal correction without an FMA and only delivers
    /// `f64` accuracy.
    fn quotient(self, rhs: Self) -> Self {
        self / rhs
    }
}

/// Shorthand for [`Real::of`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::of(x)
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }

    fn from_rational(value: &BigRational) -> Self {
        value.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }

    fn unit_roundoff() -> Self {
        f64::EPSILON / 2.0
    }
}

impl Real for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }

    fn from_rational(value: &BigRational) -> Self {
        value.to_f64().map(|v| v as f32).unwrap_or(f32::NAN)
    }

    fn to_f64_lossy(self) -> f64 {
        self as f64
    }

    fn unit_roundoff() -> Self {
        f32::EPSILON / 2.0
    }
}

impl Real for TwoFloat {
    // `FromPrimitive::from_f64` on TwoFloat truncates to an integer.
    fn of(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn from_rational(value: &BigRational) -> Self {
        let Some(hi) = value.to_f64() else {
            return TwoFloat::from(f64::NAN);
        };
        if !hi.is_finite() {
            return TwoFloat::from(hi);
        }
        let hi_exact = BigRational::from_float(hi).unwrap_or_else(|| BigRational::from(BigInt::from(0)));
        let lo = (value - hi_exact).to_f64().unwrap_or(0.0);
        TwoFloat::from(hi) + TwoFloat::from(lo)
    }

    fn to_f64_lossy(self) -> f64 {
        self.hi() + self.lo()
    }

    fn unit_roundoff() -> Self {
        // 2^-104
        TwoFloat::from(f64::EPSILON * f64::EPSILON / 4.0)
    }

    fn quotient(self, rhs: Self) -> Self {
        let r = TwoFloat::from(rhs.hi().recip());
        let mut q = self * r;
        for _ in 0..2 {
            q = q + (self - rhs * q) * r;
        }
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn third_in_double_double_beats_f64() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let dd = TwoFloat::from_rational(&third);
        let back = dd * TwoFloat::from(3.0) - TwoFloat::from(1.0);
        assert!(back.to_f64_lossy().abs() < 1e-30);
        assert_eq!(f64::from_rational(&third), 1.0 / 3.0);
    }

    #[test]
    fn double_double_quotient_is_accurate() {
        let q = TwoFloat::from(1.0).quotient(TwoFloat::from(3.0));
        let err = q * TwoFloat::from(3.0) - TwoFloat::from(1.0);
        assert!(err.to_f64_lossy().abs() < 1e-31);
        let d = lit::<TwoFloat>(7.0) + lit::<TwoFloat>(1e-20);
        let q = lit::<TwoFloat>(2.0).quotient(d);
        let err = q * d - lit::<TwoFloat>(2.0);
        assert!(err.to_f64_lossy().abs() < 1e-31);
    }

    #[test]
    fn literals_keep_fractional_parts() {
        assert_eq!(lit::<TwoFloat>(3.25).hi(), 3.25);
        assert_eq!(lit::<f32>(0.5), 0.5f32);
    }
}
