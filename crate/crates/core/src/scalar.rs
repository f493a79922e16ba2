//! Scalar abstraction shared by every spatial type in the crate.
//!
//! Geometry, potentials, activities and the chain itself are generic over
//! [`Real`]; statistical summaries ([`crate::Estimate`]) are always `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable for coordinates and potential values.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or sample.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    /// Conversion into `f64` for statistics and reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("Real converts into f64")
    }
}

/// Euclidean remainder `x mod m` in `[0, m]` (may round up to `m`).
#[inline]
pub fn rem_euclid<T: Real>(x: T, m: T) -> T {
    let r = x % m;
    if r < T::zero() {
        r + m
    } else {
        r
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{-x}` with the hard-core convention `e^{-inf} = 0` exactly.
#[inline]
pub fn exp_neg<T: Real>(x: T) -> T {
    if x == T::infinity() {
        T::zero()
    } else {
        (-x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_neg_hard_core_is_exact_zero() {
        assert_eq!(exp_neg(f64::INFINITY), 0.0);
        assert_eq!(exp_neg(f32::INFINITY), 0.0);
        assert_eq!(exp_neg(0.0f64), 1.0);
        assert!((exp_neg(std::f64::consts::LN_2) - 0.5).abs() < 1e-15);
    }
}
