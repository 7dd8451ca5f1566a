//! Dirac-representation matrices, complex and quaternionic 4-spinors, and
//! the reduced quaternionic Dirac equation for motion along `z`.
//!
//! A quaternionic spinor is held in its symplectic form `psi = u + j w`.
//! The plane-wave factor and the momentum `Q` act on `psi` from the right,
//! so complex `Q` multiplies `u` and `w` alike.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::num::{re, Real};
use crate::qalg::{Quaternion, Side};
use crate::stepsolve::StepPotential;

/// Complex 4-spinor in Dirac ordering (upper pair, lower pair).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Spinor4<T> {
    pub c: [Complex<T>; 4],
}

impl<T: Real> Spinor4<T> {
    pub fn new(c: [Complex<T>; 4]) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn norm_sqr(&self) -> T {
        self.c.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.c.map(|z| z * s))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.c
            .iter()
            .zip(other.c.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }
}

impl<T: Real> Add for Spinor4<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(std::array::from_fn(|r| self.c[r] + rhs.c[r]))
    }
}

impl<T: Real> Sub for Spinor4<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(std::array::from_fn(|r| self.c[r] - rhs.c[r]))
    }
}

/// Quaternionic 4-spinor `psi = u + j w`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QSpinor<T> {
    pub u: Spinor4<T>,
    pub w: Spinor4<T>,
}

impl<T: Real> QSpinor<T> {
    pub fn new(u: Spinor4<T>, w: Spinor4<T>) -> Self {
        Self { u, w }
    }

    /// Quaternionic component `u_r + j w_r`.
    pub fn component(&self, r: usize) -> Quaternion<T> {
        Quaternion::new(self.u.c[r], self.w.c[r])
    }

    pub fn from_components(q: [Quaternion<T>; 4]) -> Self {
        Self::new(Spinor4::new(q.map(|x| x.z1)), Spinor4::new(q.map(|x| x.z2)))
    }

    pub fn norm(&self) -> T {
        (self.u.norm_sqr() + self.w.norm_sqr()).sqrt()
    }

    /// Right multiplication by a complex scalar.
    pub fn scale_right(&self, s: Complex<T>) -> Self {
        Self::new(self.u.scale(s), self.w.scale(s))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.u
            .max_abs_diff(&other.u)
            .max(self.w.max_abs_diff(&other.w))
    }
}

/// Dense 4x4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Matrix4C<T> {
    pub e: [[Complex<T>; 4]; 4],
}

impl<T: Real> Matrix4C<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::diag([T::one(); 4])
    }

    pub fn diag(d: [T; 4]) -> Self {
        let mut m = Self::zero();
        for (r, v) in d.into_iter().enumerate() {
            m.e[r][r] = re(v);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                t.e[c][r] = self.e[r][c];
            }
        }
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.e.iter_mut().flatten().for_each(|z| *z = z.conj());
        t
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut m = *self;
        m.e.iter_mut().flatten().for_each(|z| *z = *z * s);
        m
    }

    pub fn mul_vec(&self, v: &Spinor4<T>) -> Spinor4<T> {
        Spinor4::new(std::array::from_fn(|r| {
            (0..4).fold(re(T::zero()), |acc, c| acc + self.e[r][c] * v.c[c])
        }))
    }

    pub fn max_abs(&self) -> T {
        self.e
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius(&self) -> T {
        self.e
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }
}

impl<T> Index<(usize, usize)> for Matrix4C<T> {
    type Output = Complex<T>;

    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.e[r][c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix4C<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.e[r][c]
    }
}

impl<T: Real> Mul for Matrix4C<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut p = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                p.e[r][c] = (0..4).fold(re(T::zero()), |acc, k| acc + self.e[r][k] * rhs.e[k][c]);
            }
        }
        p
    }
}

impl<T: Real> Add for Matrix4C<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..4 {
            for c in 0..4 {
                m.e[r][c] = m.e[r][c] + rhs.e[r][c];
            }
        }
        m
    }
}

impl<T: Real> Sub for Matrix4C<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..4 {
            for c in 0..4 {
                m.e[r][c] = m.e[r][c] - rhs.e[r][c];
            }
        }
        m
    }
}

/// Order of the operator product in [`product_matrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductOrder {
    /// `M+ M-`, acting on `u`.
    PlusMinus,
    /// `M- M+`, acting on `w`.
    MinusPlus,
}

/// `(alpha3, beta)` in the Dirac representation: `alpha3` carries `sigma3`
/// in its off-diagonal blocks, `beta = diag(1, 1, -1, -1)`.
pub fn dirac_matrices<T: Real>() -> (Matrix4C<T>, Matrix4C<T>) {
    let one = T::one();
    let mut alpha3 = Matrix4C::zero();
    alpha3[(0, 2)] = re(one);
    alpha3[(1, 3)] = re(-one);
    alpha3[(2, 0)] = re(one);
    alpha3[(3, 1)] = re(-one);
    let beta = Matrix4C::diag([one, one, -one, -one]);
    (alpha3, beta)
}

fn dirac_operator<T: Real>(energy: T, q: Complex<T>, mass_sign: T, shift: T) -> Matrix4C<T> {
    let (alpha3, beta) = dirac_matrices::<T>();
    Matrix4C::identity().scale(re(energy + shift)) - alpha3.scale(q) + beta.scale(re(mass_sign))
}

/// `M- = E - alpha3 Q - beta m - V0`.
pub fn m_minus<T: Real>(energy: T, q: Complex<T>, mass: T, v0: T) -> Matrix4C<T> {
    dirac_operator(energy, q, -mass, -v0)
}

/// `M+ = E - alpha3 Q + beta m + V0`.
pub fn m_plus<T: Real>(energy: T, q: Complex<T>, mass: T, v0: T) -> Matrix4C<T> {
    dirac_operator(energy, q, mass, v0)
}

/// Closed block form of `M+ M-`:
///
/// ```text
/// [ E^2 + Q^2 - (V0 + m)^2      -2 Q (E + m) sigma3     ]
/// [ -2 Q (E - m) sigma3         E^2 + Q^2 - (V0 - m)^2  ]
/// ```
///
/// `M- M+` is its transpose.
pub fn product_matrix<T: Real>(
    energy: T,
    q: Complex<T>,
    mass: T,
    v0: T,
    order: ProductOrder,
) -> Matrix4C<T> {
    let two = T::lit(2.0);
    let q2 = q * q;
    let top = q2 + re(energy * energy - (v0 + mass) * (v0 + mass));
    let bottom = q2 + re(energy * energy - (v0 - mass) * (v0 - mass));
    let upper_right = -q * (two * (energy + mass));
    let lower_left = -q * (two * (energy - mass));

    let mut p = Matrix4C::zero();
    p[(0, 0)] = top;
    p[(1, 1)] = top;
    p[(2, 2)] = bottom;
    p[(3, 3)] = bottom;
    p[(0, 2)] = upper_right;
    p[(1, 3)] = -upper_right;
    p[(2, 0)] = lower_left;
    p[(3, 1)] = -lower_left;
    match order {
        ProductOrder::PlusMinus => p,
        ProductOrder::MinusPlus => p.transpose(),
    }
}

/// Left-hand side of the reduced equation
/// `(E - alpha3 Q) psi + (beta m + V0 - j W0) i psi i`,
/// evaluated component by component with quaternion arithmetic.
/// Vanishes for exact solutions.
pub fn apply_dirac<T: Real>(
    psi: &QSpinor<T>,
    q: Complex<T>,
    energy: T,
    mass: T,
    pot: &StepPotential<T>,
) -> QSpinor<T> {
    let (alpha3, beta) = dirac_matrices::<T>();
    let jw = Quaternion::from_j(pot.w0);
    let out: [Quaternion<T>; 4] = std::array::from_fn(|r| {
        let psi_r = psi.component(r);
        let kinetic = (0..4).fold(Quaternion::zero(), |acc, c| {
            // alpha3 entries are real, so the side of this scaling is immaterial
            acc + psi.component(c).scale(alpha3[(r, c)], Side::Left)
        });
        let sandwiched = psi_r.i_sandwich();
        psi_r.scale_real(energy) - kinetic.scale(q, Side::Right)
            + sandwiched.scale_real(beta[(r, r)].re * mass + pot.v0)
            - jw * sandwiched
    });
    QSpinor::from_components(out)
}

/// The same residual from the coupled complex system:
/// `(M- u + conj(W0) w, M+ w + W0 u)`.
pub fn coupled_residual<T: Real>(
    psi: &QSpinor<T>,
    q: Complex<T>,
    energy: T,
    mass: T,
    pot: &StepPotential<T>,
) -> QSpinor<T> {
    let mm = m_minus(energy, q, mass, pot.v0);
    let mp = m_plus(energy, q, mass, pot.v0);
    QSpinor::new(
        mm.mul_vec(&psi.u) + psi.w.scale(pot.w0.conj()),
        mp.mul_vec(&psi.w) + psi.u.scale(pot.w0),
    )
}
