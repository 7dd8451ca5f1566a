//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Square root with the decaying branch for negative arguments:
/// `+sqrt(s)` for `s >= 0`, `+i sqrt(-s)` otherwise.
#[inline]
pub fn branch_sqrt<T: Real>(s: T) -> Complex<T> {
    if s >= T::zero() {
        Complex::new(s.sqrt(), T::zero())
    } else {
        Complex::new(T::zero(), (-s).sqrt())
    }
}
