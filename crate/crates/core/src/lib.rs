//! Closed-form solutions of the quaternionic Dirac equation for a step
//! potential `i V0 + k W0`, together with independent numerical oracles.
//!
//! The physics is generic over the scalar type (`f32` or `f64`); the
//! aliases below fix the double-precision instantiation used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dirac;
pub mod error;
pub mod num;
pub mod oracle;
pub mod qalg;
pub mod stepsolve;

pub use error::{Error, Result};
pub use num::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Quaternion64 = qalg::Quaternion<f64>;
pub type Quaternion32 = qalg::Quaternion<f32>;
pub type Spinor64 = dirac::Spinor4<f64>;
pub type QSpinor64 = dirac::QSpinor<f64>;
pub type Matrix64 = dirac::Matrix4C<f64>;
pub type StepPotential64 = stepsolve::StepPotential<f64>;
pub type Kinematics64 = stepsolve::Kinematics<f64>;
pub type Momenta64 = stepsolve::Momenta<f64>;
pub type Coefficients64 = stepsolve::SpinorCoefficients<f64>;
