//! Dense complex matrices, the Hermitian eigensolver, and spectral calculus.

mod calculus;
mod eig;
mod matrix;
mod tolerance;

pub use calculus::{
    abs_op, abs_power, apply_to_eig, func_calculus, lambda_min, mapped_spectrum, singular_values, spectral_bounds,
    spectral_norm, ScalarFunction,
};
pub use eig::{herm_eig, HermitianEig, MAX_SWEEPS};
pub use matrix::Matrix;
pub use tolerance::Tolerance;
