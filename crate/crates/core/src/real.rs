//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// `1 - x^e` given both `x` and `1 - x`, accurate when `x` is close to one.
#[inline]
pub(crate) fn one_minus_pow<T: Real>(x: T, one_minus_x: T, e: T) -> T {
    if x < lit(0.5) {
        T::one() - x.powf(e)
    } else {
        -(e * (-one_minus_x).ln_1p()).exp_m1()
    }
}

/// `|x|^(m-2) x`, the signed power appearing in the p-Laplacian.
#[inline]
pub fn signed_pow<T: Real>(x: T, m: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x.signum() * x.abs().powf(m - T::one())
    }
}
