//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar the core is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + crate::linalg::Field<Re = Self>
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Lossy conversion used for diagnostics and error payloads.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `sinh(z)/z`, accurate near the origin.
pub(crate) fn sinhc<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < lit(1e-3) {
        let z2 = z * z;
        creal::<T>(T::one()) + z2 * (creal(lit::<T>(1.0 / 6.0)) + z2 * lit::<T>(1.0 / 120.0))
    } else {
        z.sinh() / z
    }
}

/// `(exp(z) - 1)/z`, accurate near the origin.
pub(crate) fn expm1_over<T: Real>(z: T) -> T {
    if z.abs() < lit(1e-8) {
        T::one() + z / lit(2.0)
    } else {
        z.exp_m1() / z
    }
}
