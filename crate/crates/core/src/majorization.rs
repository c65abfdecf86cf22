//! Eigenvalue partial sums, weak majorization and the eigenvalue forms of
//! the Jensen and Bohr inequalities.
//!
//! Margins are `min_k (sum_{j<=k} lambda_j(RHS) - sum_{j<=k} lambda_j(LHS))`.

use serde::{Deserialize, Serialize};

use crate::catalog::CheckOutcome;
use crate::error::{Error, Result};
use crate::jensen::PositiveLinearMap;
use crate::matkernel::{abs_op, func_calculus, herm_eig, Matrix, ScalarFunction, Tolerance};
use crate::scalar::Real;

/// Real values sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "Vec<T>", into = "Vec<T>")]
pub struct SpectrumVector<T: Real>(Vec<T>);

impl<T: Real> SpectrumVector<T> {
    /// Fails unless `values` is finite and already descending.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("spectrum entries must be finite".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::BadParam("spectrum must be sorted in descending order".into()));
        }
        Ok(Self(values))
    }

    pub fn from_unsorted(mut values: Vec<T>) -> Result<Self> {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self::new(values)
    }

    /// Eigenvalues of a Hermitian matrix.
    pub fn of_hermitian(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        Ok(Self(herm_eig(m, tol)?.values))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Real> TryFrom<Vec<T>> for SpectrumVector<T> {
    type Error = Error;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<SpectrumVector<T>> for Vec<T> {
    fn from(s: SpectrumVector<T>) -> Self {
        s.0
    }
}

pub fn partial_sums<T: Real>(s: &SpectrumVector<T>) -> Vec<T> {
    s.0.iter()
        .scan(T::zero(), |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// `x` weakly majorized by `y`: every prefix sum of `x` is at most the
/// matching prefix sum of `y` plus the tolerance.
pub fn weak_major_leq<T: Real>(x: &SpectrumVector<T>, y: &SpectrumVector<T>, tol: &Tolerance<T>) -> Result<bool> {
    let (gap, scale) = prefix_gap(x, y)?;
    Ok(gap >= -tol.threshold(scale))
}

/// `(min_k (Y_k - X_k), max_k max(|X_k|, |Y_k|))` over prefix sums.
fn prefix_gap<T: Real>(x: &SpectrumVector<T>, y: &SpectrumVector<T>) -> Result<(T, T)> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!("spectra of length {} and {}", x.len(), y.len())));
    }
    let (px, py) = (partial_sums(x), partial_sums(y));
    let gap = px.iter().zip(&py).map(|(&a, &b)| b - a).fold(T::infinity(), T::min);
    let scale = px.iter().chain(&py).fold(T::zero(), |m, v| m.max(v.abs()));
    Ok((gap, scale))
}

fn partial_sum_outcome<T: Real>(lhs: &Matrix<T>, rhs: &Matrix<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    let (l, r) = (SpectrumVector::of_hermitian(lhs, tol)?, SpectrumVector::of_hermitian(rhs, tol)?);
    let (gap, scale) = prefix_gap(&l, &r)?;
    Ok(CheckOutcome::from_margin(gap, scale.max(T::one()), tol))
}

/// Congruence data for the corollary: `A_i` Hermitian `n_i x n_i`, `X_i`
/// of shape `n_i x m`, weights `alpha_i > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MajorJensenInstance<T: Real> {
    pub operators: Vec<Matrix<T>>,
    pub x: Vec<Matrix<T>>,
    pub weights: Vec<T>,
    pub f: ScalarFunction<T>,
}

/// Eigenvalue Bohr data: `A_i` Hermitian, `X_i` congruence factors,
/// weights `p_i > 0` and `r > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EigenBohrInstance<T: Real> {
    pub operators: Vec<Matrix<T>>,
    pub x: Vec<Matrix<T>>,
    pub weights: Vec<T>,
    pub r: T,
}

/// Common output dimension `m` of the congruences `X_i* A_i X_i`.
fn congruence_dims<T: Real>(ops: &[Matrix<T>], xs: &[Matrix<T>], weights: &[T]) -> Result<usize> {
    if ops.is_empty() || ops.len() != xs.len() || ops.len() != weights.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} operators, {} factors, {} weights",
            ops.len(),
            xs.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
        return Err(Error::BadParam("weights must be positive".into()));
    }
    let m = xs[0].cols();
    for (i, (a, x)) in ops.iter().zip(xs).enumerate() {
        if !a.is_square() || x.rows() != a.rows() || x.cols() != m {
            return Err(Error::ShapeMismatch(format!(
                "pair {i}: A is {}x{}, X is {}x{} (need X with {} rows and {m} columns)",
                a.rows(),
                a.cols(),
                x.rows(),
                x.cols(),
                a.rows()
            )));
        }
    }
    Ok(m)
}

/// `sum c_i X_i* B_i X_i`.
fn congruence_sum<T: Real>(c: &[T], xs: &[Matrix<T>], bs: &[Matrix<T>]) -> Matrix<T> {
    let m = xs[0].cols();
    c.iter()
        .zip(xs)
        .zip(bs)
        .fold(Matrix::zeros(m, m), |acc, ((&ci, x), b)| &acc + &(&(&x.adjoint() * b) * x).scale_real(ci))
}

/// `eps_pos <= lambda_min(h)` and `lambda_max(h) <= bound`.
fn check_sandwich<T: Real>(h: &Matrix<T>, bound: T, what: &str, tol: &Tolerance<T>) -> Result<()> {
    let eig = herm_eig(h, tol)?;
    if eig.min() < tol.eps_pos() {
        return Err(Error::ConditionViolated(format!(
            "{what} is not strictly positive (lambda_min = {:e})",
            eig.min()
        )));
    }
    if eig.max() > bound + tol.threshold(bound) {
        return Err(Error::ConditionViolated(format!("{what} exceeds {bound} (lambda_max = {:e})", eig.max())));
    }
    Ok(())
}

fn require_abs_power<T: Real>(f: &ScalarFunction<T>) -> Result<T> {
    match f {
        ScalarFunction::AbsPower { r } if *r >= T::one() => Ok(*r),
        _ => Err(Error::BadParam(format!(
            "{f:?} is not admissible: need a convex, submultiplicative f with f(0) <= 0, i.e. AbsPower(r >= 1)"
        ))),
    }
}

/// Weak-majorization Jensen inequality, congruence form:
/// `f(sum X_i* A_i X_i) <_w sum alpha_i f(1/alpha_i) X_i* f(A_i) X_i`
/// under `0 < sum alpha_i X_i* X_i <= I`.
pub fn check_major_jensen<T: Real>(inst: &MajorJensenInstance<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    require_abs_power(&inst.f)?;
    let m = congruence_dims(&inst.operators, &inst.x, &inst.weights)?;
    let grams: Vec<Matrix<T>> = inst.x.iter().map(|x| Matrix::identity(x.rows())).collect();
    let h = congruence_sum(&inst.weights, &inst.x, &grams);
    check_sandwich(&h, T::one(), "sum alpha_i X_i* X_i", tol)?;
    let ones = vec![T::one(); inst.weights.len()];
    let lhs = func_calculus(&congruence_sum(&ones, &inst.x, &inst.operators), &inst.f, tol)?;
    let fa = inst.operators.iter().map(|a| func_calculus(a, &inst.f, tol)).collect::<Result<Vec<_>>>()?;
    let c: Vec<T> = inst.weights.iter().map(|&a| a * inst.f.eval(T::one() / a)).collect();
    let rhs = congruence_sum(&c, &inst.x, &fa);
    debug_assert_eq!(lhs.rows(), m);
    partial_sum_outcome(&lhs, &rhs, tol)
}

/// `f` convex with `f(0) <= 0` on an interval containing `0`.
fn require_theorem_admissible<T: Real>(f: &ScalarFunction<T>) -> Result<()> {
    let ok = match f {
        ScalarFunction::AbsPower { r } => *r >= T::one(),
        ScalarFunction::Polynomial { coeffs } => {
            coeffs.first().is_none_or(|&c0| c0 <= T::zero())
                && (coeffs.len() <= 2 || (coeffs.len() == 3 && coeffs[2] >= T::zero()))
        }
        ScalarFunction::Power { .. } => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::BadParam(format!("{f:?} is not admissible: need f convex with f(0) <= 0")))
    }
}

/// Map form: `f(sum alpha_i Phi_i(A)) <_w sum alpha_i Phi_i(f(A))` under
/// `0 < sum alpha_i Phi_i(I) <= I`.
pub fn check_major_jensen_maps<T: Real>(
    a: &Matrix<T>,
    maps: &[PositiveLinearMap<T>],
    alpha: &[T],
    f: &ScalarFunction<T>,
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    require_theorem_admissible(f)?;
    if maps.is_empty() || maps.len() != alpha.len() {
        return Err(Error::ShapeMismatch(format!("{} maps for {} weights", maps.len(), alpha.len())));
    }
    if alpha.iter().any(|&w| !(w >= T::zero())) {
        return Err(Error::BadParam("weights must be non-negative".into()));
    }
    let n = a.rows();
    let weighted = |b: &Matrix<T>| -> Result<Matrix<T>> {
        let mut out: Option<Matrix<T>> = None;
        for (phi, &w) in maps.iter().zip(alpha) {
            let term = phi.apply(b)?.scale_real(w);
            out = Some(match out {
                None => term,
                Some(acc) => acc.try_add(&term)?,
            });
        }
        Ok(out.expect("non-empty family"))
    };
    check_sandwich(&weighted(&Matrix::identity(n))?, T::one(), "sum alpha_i Phi_i(I)", tol)?;
    let lhs = func_calculus(&weighted(a)?, f, tol)?;
    let rhs = weighted(&func_calculus(a, f, tol)?)?;
    partial_sum_outcome(&lhs, &rhs, tol)
}

/// Block-diagonal reformulation of a congruence instance:
/// `A = diag(A_i / alpha_i)` and `Phi_i(A) = X_i* A_ii X_i`.
pub fn block_diagonal_form<T: Real>(inst: &MajorJensenInstance<T>) -> Result<(Matrix<T>, Vec<PositiveLinearMap<T>>)> {
    let m = congruence_dims(&inst.operators, &inst.x, &inst.weights)?;
    let blocks: Vec<Matrix<T>> =
        inst.operators.iter().zip(&inst.weights).map(|(a, &w)| a.scale_real(T::one() / w)).collect();
    let total: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut offset = 0;
    let maps = inst
        .x
        .iter()
        .map(|x| {
            let lo = offset;
            offset += x.rows();
            let embedded = Matrix::from_fn(total, m, |r, c| {
                if r >= lo && r < lo + x.rows() {
                    x[(r - lo, c)]
                } else {
                    num_complex::Complex::new(T::zero(), T::zero())
                }
            });
            PositiveLinearMap::congruence(embedded)
        })
        .collect();
    Ok((Matrix::block_diag(&blocks), maps))
}

/// Eigenvalue Bohr inequality:
/// `|sum X_i* A_i X_i|^r <_w S^{r-1} sum p_i X_i* |A_i|^r X_i` with
/// `S = sum p_i^{1/(1-r)}`, under `0 < sum p_i^{1/(1-r)} X_i* X_i <= S I`.
pub fn check_eigen_bohr<T: Real>(inst: &EigenBohrInstance<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    let r = inst.r;
    if !(r > T::one()) || !r.is_finite() {
        return Err(Error::BadParam(format!("eigenvalue Bohr needs r > 1 (r={r})")));
    }
    congruence_dims(&inst.operators, &inst.x, &inst.weights)?;
    let w = crate::jensen::conjugate_weights(&inst.weights, r);
    let s = w.iter().fold(T::zero(), |acc, &x| acc + x);
    let grams: Vec<Matrix<T>> = inst.x.iter().map(|x| Matrix::identity(x.rows())).collect();
    check_sandwich(&congruence_sum(&w, &inst.x, &grams), s, "sum p_i^{1/(1-r)} X_i* X_i", tol)?;
    let ones = vec![T::one(); w.len()];
    let power = ScalarFunction::power(r);
    let lhs = func_calculus(&abs_op(&congruence_sum(&ones, &inst.x, &inst.operators), tol)?, &power, tol)?;
    let abs_r = ScalarFunction::abs_power(r);
    let powered = inst.operators.iter().map(|a| func_calculus(a, &abs_r, tol)).collect::<Result<Vec<_>>>()?;
    let rhs = congruence_sum(&inst.weights, &inst.x, &powered).scale_real(s.powf(r - T::one()));
    partial_sum_outcome(&lhs, &rhs, tol)
}
