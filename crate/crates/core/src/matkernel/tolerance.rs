use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute/relative tolerance pair. Every acceptance threshold in the crate
/// is `atol + rtol * scale` for a scale chosen by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Tolerance<T: Real> {
    pub atol: T,
    pub rtol: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(atol: T, rtol: T) -> Result<Self> {
        if !(atol > T::zero() && atol.is_finite()) || !(rtol > T::zero() && rtol.is_finite()) {
            return Err(Error::BadParam(format!("tolerances must be positive and finite (atol={atol}, rtol={rtol})")));
        }
        Ok(Self { atol, rtol })
    }

    /// `atol + rtol * scale`.
    #[inline]
    pub fn threshold(&self, scale: T) -> T {
        self.atol + self.rtol * scale.abs()
    }

    /// Strict-positivity floor used for negative powers and "0 <" hypotheses.
    #[inline]
    pub fn eps_pos(&self) -> T {
        self.atol
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self { atol: T::lit(T::DEFAULT_ATOL), rtol: T::lit(T::DEFAULT_RTOL) }
    }
}
