//! Quaternion arithmetic in symplectic form.
//!
//! A quaternion is stored as a pair of complex numbers, `q = z1 + j z2`.
//! Everything follows from the commutation rule `z j = j conj(z)`:
//!
//! ```text
//! (z1 + j z2)(y1 + j y2) = (z1 y1 - conj(z2) y2) + j (conj(z1) y2 + z2 y1)
//! ```

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::num::Real;

/// Which side a complex scalar multiplies from. Left and right scaling
/// differ because `j` does not commute with `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `q = z1 + j z2` with complex `z1`, `z2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion<T> {
    pub z1: Complex<T>,
    pub z2: Complex<T>,
}

impl<T: Real> Quaternion<T> {
    pub const fn new(z1: Complex<T>, z2: Complex<T>) -> Self {
        Self { z1, z2 }
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        Self::new(z, Complex::new(T::zero(), T::zero()))
    }

    /// `j z`, the pure-j part alone.
    pub fn from_j(z: Complex<T>) -> Self {
        Self::new(Complex::new(T::zero(), T::zero()), z)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_complex(Complex::new(T::one(), T::zero()))
    }

    pub fn i() -> Self {
        Self::from_complex(Complex::new(T::zero(), T::one()))
    }

    pub fn j() -> Self {
        Self::from_j(Complex::new(T::one(), T::zero()))
    }

    /// `k = i j = j (-i)`.
    pub fn k() -> Self {
        Self::from_j(Complex::new(T::zero(), -T::one()))
    }

    /// Builds `a + b i + c j + d k`.
    pub fn from_real4([a, b, c, d]: [T; 4]) -> Self {
        Self::new(Complex::new(a, b), Complex::new(c, -d))
    }

    /// Returns `[a, b, c, d]` for `a + b i + c j + d k`.
    pub fn to_real4(self) -> [T; 4] {
        [self.z1.re, self.z1.im, self.z2.re, -self.z2.im]
    }

    pub fn conj(self) -> Self {
        Self::new(self.z1.conj(), -self.z2)
    }

    pub fn norm_sqr(self) -> T {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    pub fn norm(self) -> T {
        self.z1.norm().hypot(self.z2.norm())
    }

    /// Multiplies by the complex scalar `c` from the given side.
    pub fn scale(self, c: Complex<T>, side: Side) -> Self {
        match side {
            Side::Right => Self::new(self.z1 * c, self.z2 * c),
            Side::Left => Self::new(c * self.z1, c.conj() * self.z2),
        }
    }

    pub fn scale_real(self, s: T) -> Self {
        Self::new(self.z1 * s, self.z2 * s)
    }

    /// `i q i`, which for `q = z1 + j z2` is `-z1 + j z2`.
    pub fn i_sandwich(self) -> Self {
        Self::new(-self.z1, self.z2)
    }

    pub fn is_finite(self) -> bool {
        self.z1.re.is_finite()
            && self.z1.im.is_finite()
            && self.z2.re.is_finite()
            && self.z2.im.is_finite()
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.z1 * rhs.z1 - self.z2.conj() * rhs.z2,
            self.z1.conj() * rhs.z2 + self.z2 * rhs.z1,
        )
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.z1 + rhs.z1, self.z2 + rhs.z2)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.z1 - rhs.z1, self.z2 - rhs.z2)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.z1, -self.z2)
    }
}

pub fn mul<T: Real>(p: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    p * q
}

pub fn i_sandwich<T: Real>(q: Quaternion<T>) -> Quaternion<T> {
    q.i_sandwich()
}
