use serde::{Deserialize, Serialize};

use super::{herm_eig, HermitianEig, Matrix, Tolerance};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Scalar function applied to Hermitian matrices through their spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real")]
pub enum ScalarFunction<T: Real> {
    /// `|t|^r`
    AbsPower { r: T },
    /// `t^r`; non-integer `r` needs a non-negative spectrum, negative `r` a
    /// strictly positive one.
    Power { r: T },
    /// `c0 + c1 t + c2 t^2 + ...` (ascending coefficients).
    Polynomial { coeffs: Vec<T> },
}

impl<T: Real> ScalarFunction<T> {
    pub fn abs_power(r: T) -> Self {
        Self::AbsPower { r }
    }

    pub fn power(r: T) -> Self {
        Self::Power { r }
    }

    pub fn polynomial(coeffs: Vec<T>) -> Self {
        Self::Polynomial { coeffs }
    }

    pub fn eval(&self, t: T) -> T {
        match self {
            Self::AbsPower { r } => pow(t.abs(), *r),
            Self::Power { r } => pow(t, *r),
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c),
        }
    }

    /// Exponent for the power families, `None` for polynomials.
    pub fn exponent(&self) -> Option<T> {
        match self {
            Self::AbsPower { r } | Self::Power { r } => Some(*r),
            Self::Polynomial { .. } => None,
        }
    }

    /// Degree after dropping trailing zero coefficients (`None` for powers).
    pub fn degree(&self) -> Option<usize> {
        match self {
            Self::Polynomial { coeffs } => Some(coeffs.iter().rposition(|c| *c != T::zero()).unwrap_or(0)),
            _ => None,
        }
    }
}

fn is_integer<T: Real>(r: T) -> bool {
    r == r.round()
}

fn pow<T: Real>(t: T, r: T) -> T {
    if is_integer(r) && r.abs() <= T::lit(64.0) {
        t.powi(r.to_i32().expect("small integer exponent"))
    } else {
        t.powf(r)
    }
}

/// Applies `f` to the spectrum of the Hermitian matrix `m`.
///
/// Domain rules: `Power` with negative exponent needs `lambda_min >= atol`;
/// `Power` with a non-integer exponent clamps eigenvalues in `[-tau, 0)` to
/// zero and rejects anything below `-tau`; `AbsPower` with negative exponent
/// needs every `|lambda| >= atol`.
pub fn func_calculus<T: Real>(m: &Matrix<T>, f: &ScalarFunction<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    let eig = herm_eig(m, tol)?;
    apply_to_eig(&eig, f, tol)
}

pub fn apply_to_eig<T: Real>(eig: &HermitianEig<T>, f: &ScalarFunction<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    let spectrum = mapped_spectrum(eig, f, tol)?;
    Ok(eig.with_spectrum(&spectrum))
}

/// `f(lambda_i)` in the eigenvalue order of `eig`, with the domain rules of
/// [`func_calculus`].
pub fn mapped_spectrum<T: Real>(eig: &HermitianEig<T>, f: &ScalarFunction<T>, tol: &Tolerance<T>) -> Result<Vec<T>> {
    let tau = eig.tau(tol);
    match f {
        ScalarFunction::Power { r } if *r < T::zero() => {
            if eig.min() < tol.eps_pos() {
                return Err(Error::DomainError(format!(
                    "negative power {r} needs a strictly positive spectrum (lambda_min = {:e})",
                    eig.min()
                )));
            }
        }
        ScalarFunction::Power { r } if !is_integer(*r) => {
            if eig.min() < -tau {
                return Err(Error::DomainError(format!(
                    "fractional power {r} of an indefinite matrix (lambda_min = {:e})",
                    eig.min()
                )));
            }
        }
        ScalarFunction::AbsPower { r } if *r < T::zero() && eig.values.iter().any(|l| l.abs() < tol.eps_pos()) => {
            return Err(Error::DomainError(format!("negative power {r} of a singular matrix")));
        }
        _ => {}
    }
    let clamp = matches!(f, ScalarFunction::Power { r } if !is_integer(*r) && *r >= T::zero());
    Ok(eig.values.iter().map(|&l| if clamp && l < T::zero() { f.eval(T::zero()) } else { f.eval(l) }).collect())
}

/// `|C| = (C* C)^{1/2}`; for a `rows x cols` input the result is `cols x cols`.
pub fn abs_op<T: Real>(c: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    let eig = herm_eig(&c.gram(), tol)?;
    Ok(eig.map_spectrum(|l| l.max(T::zero()).sqrt()))
}

/// `|C|^r` computed directly from the spectrum of `C* C`.
pub fn abs_power<T: Real>(c: &Matrix<T>, r: T, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    let eig = herm_eig(&c.gram(), tol)?;
    let half = r / T::lit(2.0);
    Ok(eig.map_spectrum(|l| pow(l.max(T::zero()), half)))
}

/// Singular values of `C`, descending (`cols` of them).
pub fn singular_values<T: Real>(c: &Matrix<T>, tol: &Tolerance<T>) -> Result<Vec<T>> {
    let eig = herm_eig(&c.gram(), tol)?;
    Ok(eig.values.iter().map(|l| l.max(T::zero()).sqrt()).collect())
}

/// `(lambda_min, lambda_max)` of a Hermitian matrix.
pub fn spectral_bounds<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<(T, T)> {
    let eig = herm_eig(m, tol)?;
    Ok((eig.min(), eig.max()))
}

/// Spectral norm of an arbitrary matrix.
pub fn spectral_norm<T: Real>(c: &Matrix<T>, tol: &Tolerance<T>) -> Result<T> {
    Ok(singular_values(c, tol)?[0])
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<T> {
    Ok(herm_eig(m, tol)?.min())
}
