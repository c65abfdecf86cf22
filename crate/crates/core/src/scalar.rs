//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All kernels are written against [`Real`] so the same code runs in `f32`
//! and `f64`. Tolerance defaults and the Jacobi stopping rule are tied to
//! the precision of the concrete type.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar used for matrix entries (via `Complex<Self>`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Default absolute tolerance.
    const DEFAULT_ATOL: f64;
    /// Default relative tolerance.
    const DEFAULT_RTOL: f64;
    /// Jacobi stops when the off-diagonal Frobenius norm drops below this
    /// fraction of the input's Frobenius norm.
    const JACOBI_REL_TOL: f64;

    /// Converts an `f64` literal. Every `f64` is representable (possibly
    /// rounded) in the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_ATOL: f64 = 1e-10;
    const DEFAULT_RTOL: f64 = 1e-8;
    const JACOBI_REL_TOL: f64 = 1e-13;
}

impl Real for f32 {
    const DEFAULT_ATOL: f64 = 1e-5;
    const DEFAULT_RTOL: f64 = 1e-4;
    const JACOBI_REL_TOL: f64 = 1e-6;
}
