//! Certification, checking and falsification of Bohr-type operator
//! inequalities for finite-dimensional complex matrices.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the CLI and the fuzzing
//! machinery use.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod error;
pub mod instance;
pub mod jensen;
pub mod majorization;
pub mod matkernel;
pub mod order;
pub mod random;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use matkernel::{HermitianEig, Matrix, ScalarFunction, Tolerance};
pub use num_complex::Complex;
pub use scalar::Real;

/// Double-precision complex matrix.
pub type CMatrix = Matrix<f64>;
/// Single-precision complex matrix.
pub type CMatrix32 = Matrix<f32>;
pub type C64 = Complex<f64>;
pub type Tol = Tolerance<f64>;
