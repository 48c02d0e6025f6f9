use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar accepted by the spectral machinery.
pub trait Real:
    Float + FloatConst + FftNum + FromPrimitive + ToPrimitive + Default + Display + LowerExp + Debug
{
}

impl<T> Real for T where
    T: Float + FloatConst + FftNum + FromPrimitive + ToPrimitive + Default + Display + LowerExp + Debug
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable")
}

#[inline]
pub fn from_usize<T: Real>(v: usize) -> T {
    T::from_usize(v).expect("index representable")
}

#[inline]
pub fn from_i64<T: Real>(v: i64) -> T {
    T::from_i64(v).expect("integer representable")
}

#[inline]
pub fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// `2^e` for a real exponent.
#[inline]
pub fn pow2<T: Real>(e: T) -> T {
    (T::one() + T::one()).powf(e)
}

/// `2^e` for an integer exponent, exact in binary floating point.
#[inline]
pub fn pow2i<T: Real>(e: i32) -> T {
    (T::one() + T::one()).powi(e)
}
