//! Evaluators for the concrete Bohr-type inequalities and identities.
//!
//! Operator inequalities report `margin = lambda_min(RHS - LHS)`; norm
//! inequalities report the smallest Ky Fan gap; scalar inequalities report
//! the plain difference. Identities report the spectral norm of
//! `LHS - RHS` as `residual`. In every case `holds` is decided against
//! `atol + rtol * scale` where `scale` is the magnitude of the two sides.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{herm_eig, singular_values, Matrix, ScalarFunction, Tolerance};
use crate::order::{
    expression_scale, gram, linear_combination, loewner_leq, operator_expression, GramTerm, ParamVector,
    QuadraticCertificateProblem, Sign, SymmetricMatrix,
};
use crate::scalar::Real;

/// Absolute tolerance on `1/p + 1/q - 1` and on simplex sums.
pub const CONJUGATE_TOL: f64 = 1e-12;
/// `|t|` below this is rejected where `1/t` appears.
pub const MIN_ABS_T: f64 = 1e-9;

/// Result of evaluating one inequality or identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CheckOutcome<T: Real> {
    pub holds: bool,
    pub margin: T,
    /// Acceptance threshold the margin (or residual) was compared against.
    pub threshold: T,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<T>,
    /// Scalar Bohr equality detector.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equality: Option<bool>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub hypothesis_failed: bool,
}

impl<T: Real> CheckOutcome<T> {
    /// Inequality outcome: holds iff `margin >= -(atol + rtol * scale)`.
    pub fn from_margin(margin: T, scale: T, tol: &Tolerance<T>) -> Self {
        let threshold = tol.threshold(scale);
        Self {
            holds: margin >= -threshold,
            margin,
            threshold,
            residual: None,
            equality: None,
            hypothesis_failed: false,
        }
    }

    /// Identity outcome: holds iff `residual <= atol + rtol * scale`;
    /// the margin is `-residual`.
    pub fn from_residual(residual: T, scale: T, tol: &Tolerance<T>) -> Self {
        let threshold = tol.threshold(scale);
        Self {
            holds: residual <= threshold,
            margin: -residual,
            threshold,
            residual: Some(residual),
            equality: None,
            hypothesis_failed: false,
        }
    }

    /// Outcome for an unmet hypothesis; `margin` is the hypothesis margin.
    pub fn hypothesis_failure(margin: T, scale: T, tol: &Tolerance<T>) -> Self {
        let mut out = Self::from_margin(margin, scale, tol);
        out.holds = false;
        out.hypothesis_failed = true;
        out
    }

    /// Combines outcomes, keeping the worst margin.
    pub fn worst(self, other: Self) -> Self {
        if other.margin < self.margin {
            other
        } else {
            self
        }
    }
}

/// `lambda_min(rhs - lhs)` with scale `max(||lhs||_2, ||rhs||_2, 1)`.
pub fn operator_gap<T: Real>(lhs: &Matrix<T>, rhs: &Matrix<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    let diff = rhs.try_sub(lhs)?;
    let margin = herm_eig(&diff, tol)?.min();
    let scale = herm_eig(lhs, tol)?.spectral_norm().max(herm_eig(rhs, tol)?.spectral_norm()).max(T::one());
    Ok(CheckOutcome::from_margin(margin, scale, tol))
}

fn identity_residual<T: Real>(lhs: &Matrix<T>, rhs: &Matrix<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    let residual = herm_eig(&lhs.try_sub(rhs)?, tol)?.spectral_norm();
    let scale = herm_eig(lhs, tol)?.spectral_norm().max(herm_eig(rhs, tol)?.spectral_norm()).max(T::one());
    Ok(CheckOutcome::from_residual(residual, scale, tol))
}

/// `p, q > 0` with `|1/p + 1/q - 1| <= 1e-12`.
pub fn validate_conjugate<T: Real>(p: T, q: T) -> Result<()> {
    if !(p > T::zero() && q > T::zero()) || !p.is_finite() || !q.is_finite() {
        return Err(Error::BadParam(format!("conjugate exponents must be positive (p={p}, q={q})")));
    }
    if (T::one() / p + T::one() / q - T::one()).abs() > T::lit(CONJUGATE_TOL) {
        return Err(Error::BadParam(format!("1/p+1/q != 1 (p={p}, q={q})")));
    }
    Ok(())
}

fn same_shape<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("A is {}x{} but B is {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    Ok(())
}

/// The two exact identities for the absolute value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Identity<T: Real> {
    /// `|A-B|^2 + |sqrt(p/q) A + sqrt(q/p) B|^2 = p|A|^2 + q|B|^2`
    Zhang { p: T, q: T },
    /// `|A-B|^2 + (1/t)|tA+B|^2 = (1+t)|A|^2 + (1+1/t)|B|^2`
    Parallelogram { t: T },
}

impl<T: Real> Identity<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Identity::Zhang { p, q } => validate_conjugate(p, q),
            Identity::Parallelogram { t } => {
                if !t.is_finite() || t.abs() < T::lit(MIN_ABS_T) {
                    Err(Error::BadParam(format!("parallelogram law needs t != 0 (t={t})")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Both sides of the identity.
    pub fn sides(&self, a: &Matrix<T>, b: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
        self.validate()?;
        same_shape(a, b)?;
        let diff = (a - b).gram();
        Ok(match *self {
            Identity::Zhang { p, q } => {
                let mixed = &a.scale_real((p / q).sqrt()) + &b.scale_real((q / p).sqrt());
                let lhs = &diff + &mixed.gram();
                let rhs = &a.gram().scale_real(p) + &b.gram().scale_real(q);
                (lhs, rhs)
            }
            Identity::Parallelogram { t } => {
                let mixed = &a.scale_real(t) + b;
                let lhs = &diff + &mixed.gram().scale_real(T::one() / t);
                let rhs = &a.gram().scale_real(T::one() + t) + &b.gram().scale_real(T::one() + T::one() / t);
                (lhs, rhs)
            }
        })
    }
}

/// Residual `||LHS - RHS||_2` of an exact identity.
pub fn residual_identity<T: Real>(
    id: &Identity<T>,
    a: &Matrix<T>,
    b: &Matrix<T>,
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    let (lhs, rhs) = id.sides(a, b)?;
    identity_residual(&lhs, &rhs, tol)
}

/// Classical scalar Bohr inequality `|a+b|^2 <= p|a|^2 + q|b|^2`, with the
/// equality detector for `(p-1)a = b`.
pub fn check_classical_bohr<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    p: T,
    q: T,
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    validate_conjugate(p, q)?;
    let lhs = (a + b).norm_sqr();
    let rhs = p * a.norm_sqr() + q * b.norm_sqr();
    let mut out = CheckOutcome::from_margin(rhs - lhs, lhs.max(rhs).max(T::one()), tol);
    out.equality = Some((rhs - lhs).abs() <= out.threshold);
    Ok(out)
}

/// Hirzallah's requirement `q >= p > 1`, `1/p + 1/q = 1`.
pub fn validate_hirzallah<T: Real>(p: T, q: T) -> Result<()> {
    validate_conjugate(p, q)?;
    if !(p > T::one() && q >= p) {
        return Err(Error::BadParam(format!("Hirzallah needs q >= p > 1 (p={p}, q={q})")));
    }
    Ok(())
}

/// Weight for the norm version: `X >= gamma I` read as
/// `lambda_min((X + X*)/2) >= gamma`.
#[derive(Debug, Clone)]
pub struct NormWeight<T: Real> {
    pub x: Matrix<T>,
    pub gamma: T,
}

/// `|A-B|^2 + |(p-1)A + B|^2 <= p|A|^2 + q|B|^2`, or with a weight the
/// unitarily-invariant-norm version
/// `gamma |||  |A-B|^2 ||| <= ||| p|A|^2 X + q X|B|^2 |||`, checked on every
/// Ky Fan norm.
pub fn check_hirzallah<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    p: T,
    q: T,
    weight: Option<&NormWeight<T>>,
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    validate_hirzallah(p, q)?;
    same_shape(a, b)?;
    let diff = (a - b).gram();
    let rhs = &a.gram().scale_real(p) + &b.gram().scale_real(q);
    match weight {
        None => {
            let lhs = &diff + &(&a.scale_real(p - T::one()) + b).gram();
            operator_gap(&lhs, &rhs, tol)
        }
        Some(w) => {
            let n = a.cols();
            validate_norm_weight(w, n, tol)?;
            let weighted = &(&a.gram().scale_real(p) * &w.x) + &(&w.x * &b.gram()).scale_real(q);
            let rhs_kf = ky_fan_norms(&weighted, tol)?;
            let lhs_kf = ky_fan_norms(&diff, tol)?;
            let margin = rhs_kf.iter().zip(&lhs_kf).map(|(&r, &l)| r - w.gamma * l).fold(T::infinity(), T::min);
            let scale = rhs_kf[n - 1].max(w.gamma * lhs_kf[n - 1]).max(T::one());
            Ok(CheckOutcome::from_margin(margin, scale, tol))
        }
    }
}

fn validate_norm_weight<T: Real>(w: &NormWeight<T>, n: usize, tol: &Tolerance<T>) -> Result<()> {
    if w.x.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!("X must be {n}x{n}, got {}x{}", w.x.rows(), w.x.cols())));
    }
    if !(w.gamma > T::zero()) {
        return Err(Error::BadParam(format!("gamma must be positive (gamma={})", w.gamma)));
    }
    let herm = herm_eig(&w.x.hermitian_part(), tol)?;
    if herm.min() < w.gamma - herm.tau(tol) {
        return Err(Error::BadParam(format!(
            "X >= gamma I fails: lambda_min((X+X*)/2) = {} < gamma = {}",
            herm.min(),
            w.gamma
        )));
    }
    Ok(())
}

/// Ky Fan norms `k = 1..n`: partial sums of the descending singular values.
pub fn ky_fan_norms<T: Real>(c: &Matrix<T>, tol: &Tolerance<T>) -> Result<Vec<T>> {
    let sv = singular_values(c, tol)?;
    Ok(sv
        .iter()
        .scan(T::zero(), |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Standard,
    Reverse,
}

/// Which of `|A -+ B|^2 + |tA +- B|^2` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    /// `|A - B|^2 + |tA + B|^2`
    MinusPlus,
    /// `|A + B|^2 + |tA - B|^2`
    PlusMinus,
}

/// Inequalities that reduce to a coefficient-matrix certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Template<T: Real> {
    /// `|A -+ B|^2 + |tA +- B|^2 <= (1+t)|A|^2 + (1+1/t)|B|^2` (or `>=`).
    Thm22 { t: T, direction: Direction, sign: SignPattern },
    /// `|a1 A + a2 B|^2 + |b1 A + b2 B|^2 <= p1|A|^2 + p2|B|^2`.
    Cor2x2 { a: [T; 2], b: [T; 2], p: [T; 2] },
    /// `sum_k |sum_i alpha_ik A_i|^2 >= sum_i p_i |A_i|^2`; `alpha[i][k]`.
    Chansangiam { alpha: Vec<Vec<T>>, p: Vec<T> },
    /// `|sum t_i A_i|^2 <= sum t_i |A_i|^2` for a probability vector `t`.
    ZhangConvex { t: Vec<T> },
    /// `|sum A_i|^2 <= sum r_i |A_i|^2` with `r_i >= 1`, `sum 1/r_i = 1`.
    JensenSquares { r: Vec<T> },
}

fn pvec<T: Real>(v: &[T]) -> Result<ParamVector<T>> {
    ParamVector::new(v.to_vec())
}

fn plus<T: Real>(v: &[T]) -> Result<GramTerm<T>> {
    Ok(GramTerm { sign: Sign::Plus, coeffs: pvec(v)? })
}

/// Compiles a template into a problem whose certification implies the
/// inequality (reverse directions negate the coefficient matrix).
pub fn compile_template<T: Real>(template: &Template<T>) -> Result<QuadraticCertificateProblem<T>> {
    match template {
        Template::Thm22 { t, direction, sign } => {
            let t = *t;
            if !t.is_finite() || t.abs() < T::lit(MIN_ABS_T) {
                return Err(Error::BadParam(format!("t must be non-zero (t={t})")));
            }
            let one = T::one();
            let (a, b) = match sign {
                SignPattern::MinusPlus => ([one, -one], [t, one]),
                SignPattern::PlusMinus => ([one, one], [t, -one]),
            };
            let c = [one + t, one + one / t];
            let p = QuadraticCertificateProblem::new(pvec(&c)?, vec![plus(&a)?, plus(&b)?])?;
            Ok(match direction {
                Direction::Standard => p,
                Direction::Reverse => p.reversed(),
            })
        }
        Template::Cor2x2 { a, b, p } => QuadraticCertificateProblem::new(pvec(p)?, vec![plus(a)?, plus(b)?]),
        Template::Chansangiam { alpha, p } => {
            let n = p.len();
            if alpha.len() != n || n == 0 {
                return Err(Error::BadParam(format!("alpha must have {n} rows (one per operator)")));
            }
            let m = alpha[0].len();
            if m == 0 || alpha.iter().any(|row| row.len() != m) {
                return Err(Error::BadParam("alpha rows must share a non-zero length m".into()));
            }
            let neg_p: Vec<T> = p.iter().map(|&x| -x).collect();
            let terms = (0..m)
                .map(|k| {
                    let col: Vec<T> = alpha.iter().map(|row| row[k]).collect();
                    Ok(GramTerm { sign: Sign::Minus, coeffs: pvec(&col)? })
                })
                .collect::<Result<Vec<_>>>()?;
            QuadraticCertificateProblem::new(pvec(&neg_p)?, terms)
        }
        Template::ZhangConvex { t } => {
            validate_simplex(t)?;
            QuadraticCertificateProblem::new(pvec(t)?, vec![plus(t)?])
        }
        Template::JensenSquares { r } => {
            validate_jensen_exponents(r)?;
            let ones = vec![T::one(); r.len()];
            QuadraticCertificateProblem::new(pvec(r)?, vec![plus(&ones)?])
        }
    }
}

/// `t_i > 0`, `|sum t_i - 1| <= 1e-12`.
pub fn validate_simplex<T: Real>(t: &[T]) -> Result<()> {
    if t.is_empty() || t.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::BadParam("weights must be positive".into()));
    }
    let sum = t.iter().fold(T::zero(), |a, &b| a + b);
    if (sum - T::one()).abs() > T::lit(CONJUGATE_TOL) {
        return Err(Error::BadParam(format!("weights must sum to 1 (sum={sum})")));
    }
    Ok(())
}

/// `r_i >= 1`, `|sum 1/r_i - 1| <= 1e-12`.
pub fn validate_jensen_exponents<T: Real>(r: &[T]) -> Result<()> {
    if r.is_empty() || r.iter().any(|&x| !(x >= T::one()) || !x.is_finite()) {
        return Err(Error::BadParam("exponents r_i must be finite and >= 1".into()));
    }
    let sum = r.iter().fold(T::zero(), |a, &b| a + T::one() / b);
    if (sum - T::one()).abs() > T::lit(CONJUGATE_TOL) {
        return Err(Error::BadParam(format!("sum of 1/r_i must be 1 (got {sum})")));
    }
    Ok(())
}

/// Scalar form of the 2x2 corollary's hypothesis.
pub fn cor2x2_conditions<T: Real>(a: [T; 2], b: [T; 2], p: [T; 2]) -> bool {
    let d1 = p[0] - (a[0] * a[0] + b[0] * b[0]);
    let d2 = p[1] - (a[1] * a[1] + b[1] * b[1]);
    let off = a[0] * a[1] + b[0] * b[1];
    d1 >= T::zero() && d2 >= T::zero() && d1 * d2 >= off * off
}

/// Evaluates a template's operator inequality on a concrete tuple:
/// `margin = lambda_min` of the compiled operator expression.
pub fn check_template_operators<T: Real>(
    template: &Template<T>,
    ops: &[Matrix<T>],
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    let problem = compile_template(template)?;
    let expr = operator_expression(&problem, ops)?;
    let margin = herm_eig(&expr, tol)?.min();
    Ok(CheckOutcome::from_margin(margin, expression_scale(&problem, ops)?, tol))
}

/// `|sum z_i|^r <= (sum a_i^{1/(1-r)})^{r-1} sum a_i |z_i|^r`.
pub fn check_vasic_keckic_scalar<T: Real>(
    z: &[Complex<T>],
    a: &[T],
    r: T,
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    let (lhs, rhs) = vasic_keckic_sides(z, a, r)?;
    Ok(CheckOutcome::from_margin(rhs - lhs, lhs.max(rhs).max(T::one()), tol))
}

pub fn vasic_keckic_sides<T: Real>(z: &[Complex<T>], a: &[T], r: T) -> Result<(T, T)> {
    if z.is_empty() || z.len() != a.len() {
        return Err(Error::BadParam(format!("need matching non-empty z and a (|z|={}, |a|={})", z.len(), a.len())));
    }
    if !(r > T::one()) || !r.is_finite() {
        return Err(Error::BadParam(format!("exponent must satisfy r > 1 (r={r})")));
    }
    if a.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
        return Err(Error::BadParam("weights a_i must be positive".into()));
    }
    let sum = z.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &x| acc + x);
    let lhs = sum.norm().powf(r);
    let e = T::one() / (T::one() - r);
    let s = a.iter().fold(T::zero(), |acc, &x| acc + x.powf(e));
    let weighted = z.iter().zip(a).fold(T::zero(), |acc, (x, &w)| acc + w * x.norm().powf(r));
    Ok((lhs, s.powf(r - T::one()) * weighted))
}

/// Structural check that `f` is nondecreasing and convex on `[0, inf)` with
/// non-negative values.
fn rassias_admissible<T: Real>(f: &ScalarFunction<T>) -> bool {
    match f {
        ScalarFunction::AbsPower { r } | ScalarFunction::Power { r } => *r >= T::one(),
        ScalarFunction::Polynomial { coeffs } => !coeffs.is_empty() && coeffs.iter().all(|&c| c >= T::zero()),
    }
}

/// `f(||sum p_j x_j|| / P) >= sum p_j f(||x_j||) / P` with `P = sum p_j`,
/// `p_1 > 0`, `p_j <= 0` otherwise, `P > 0`. Norms are Euclidean.
pub fn check_rassias_pecaric<T: Real>(
    x: &[Vec<T>],
    p: &[T],
    f: &ScalarFunction<T>,
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    if x.is_empty() || x.len() != p.len() {
        return Err(Error::BadParam("need one weight per vector".into()));
    }
    let dim = x[0].len();
    if dim == 0 || x.iter().any(|v| v.len() != dim) {
        return Err(Error::ShapeMismatch("vectors must share a non-zero dimension".into()));
    }
    if !(p[0] > T::zero()) || p[1..].iter().any(|&w| w > T::zero()) {
        return Err(Error::BadParam("sign pattern requires p_1 > 0 and p_j <= 0 for j >= 2".into()));
    }
    let total = p.iter().fold(T::zero(), |a, &b| a + b);
    if !(total > T::zero()) {
        return Err(Error::BadParam(format!("sum of p_j must be positive (got {total})")));
    }
    if !rassias_admissible(f) {
        return Err(Error::BadParam("f must be nondecreasing and convex on [0, inf)".into()));
    }
    let norm = |v: &[T]| v.iter().fold(T::zero(), |a, &b| a + b * b).sqrt();
    let combo: Vec<T> = (0..dim).map(|k| x.iter().zip(p).fold(T::zero(), |acc, (v, &w)| acc + w * v[k])).collect();
    let lhs = f.eval(norm(&combo) / total);
    let rhs = x.iter().zip(p).fold(T::zero(), |acc, (v, &w)| acc + w * f.eval(norm(v))) / total;
    Ok(CheckOutcome::from_margin(lhs - rhs, lhs.abs().max(rhs.abs()).max(T::one()), tol))
}

/// `F(a) = |sum a_i A_i|^2`.
pub fn f_of<T: Real>(a: &[T], ops: &[Matrix<T>]) -> Matrix<T> {
    linear_combination(a, ops).gram()
}

/// Scalar conditions of the 3D monotonicity corollary: `|a_i| <= |b_i|` and
/// `a_i b_j = a_j b_i`.
pub fn monotone_3d_conditions<T: Real>(a: &[T], b: &[T], tol: &Tolerance<T>) -> bool {
    if a.len() != 3 || b.len() != 3 {
        return false;
    }
    let scale = a.iter().chain(b).fold(T::zero(), |m, &x| m.max(x.abs()));
    let thr = tol.threshold(scale * scale);
    let bounded = a.iter().zip(b).all(|(&x, &y)| x.abs() <= y.abs() + tol.threshold(scale));
    let parallel = (0..3).all(|i| (0..3).all(|j| (a[i] * b[j] - a[j] * b[i]).abs() <= thr));
    bounded && parallel
}

/// All 2x2 minors (any rows `i < l`, any columns `j < k`) of `m`.
pub fn second_order_minors<T: Real>(m: &SymmetricMatrix<T>) -> Vec<T> {
    let n = m.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for l in i + 1..n {
            for j in 0..n {
                for k in j + 1..n {
                    out.push(m.get(i, j) * m.get(l, k) - m.get(i, k) * m.get(l, j));
                }
            }
        }
    }
    out
}

/// Order preservation of `F`: if `Λ(a) <= Λ(b)` (or the 3D conditions hold)
/// then `F(a) <= F(b)` on every supplied tuple.
pub fn check_monotonic_f<T: Real>(
    a: &[T],
    b: &[T],
    tuples: &[Vec<Matrix<T>>],
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    let (av, bv) = (pvec(a)?, pvec(b)?);
    if av.len() != bv.len() {
        return Err(Error::ShapeMismatch(format!("|a| = {} but |b| = {}", a.len(), b.len())));
    }
    if tuples.is_empty() {
        return Err(Error::BadParam("at least one operator tuple is required".into()));
    }
    if let Some(t) = tuples.iter().find(|t| t.len() != a.len()) {
        return Err(Error::ShapeMismatch(format!("tuple of length {} for vectors of length {}", t.len(), a.len())));
    }
    let (ga, gb) = (gram(&av).to_matrix(), gram(&bv).to_matrix());
    let hypothesis = loewner_leq(&ga, &gb, tol)? || monotone_3d_conditions(a, b, tol);
    if !hypothesis {
        let diff = &gb - &ga;
        let eig = herm_eig(&diff, tol)?;
        return Ok(CheckOutcome::hypothesis_failure(eig.min(), eig.spectral_norm().max(T::one()), tol));
    }
    let mut worst: Option<CheckOutcome<T>> = None;
    for ops in tuples {
        let shape = ops[0].shape();
        if ops.iter().any(|m| m.shape() != shape) {
            return Err(Error::ShapeMismatch("operators in a tuple must share one shape".into()));
        }
        let out = operator_gap(&f_of(a, ops), &f_of(b, ops), tol)?;
        worst = Some(match worst {
            None => out,
            Some(w) => w.worst(out),
        });
    }
    Ok(worst.expect("non-empty tuples"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{certify, coefficient_matrix};

    type M = Matrix<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn scalar(x: f64) -> M {
        M::scalar(c(x, 0.0))
    }

    fn sample_pair() -> (M, M) {
        let a = M::from_complex_rows(&[[c(1.0, 0.5), c(-0.3, 2.0)], [c(0.0, -1.0), c(0.7, 0.1)]]);
        let b = M::from_complex_rows(&[[c(-0.4, 0.0), c(1.2, -0.6)], [c(2.0, 0.3), c(-1.0, 1.0)]]);
        (a, b)
    }

    #[test]
    fn parallelogram_at_one_is_classical() {
        let (a, b) = sample_pair();
        let out = residual_identity(&Identity::Parallelogram { t: 1.0 }, &a, &b, &tol()).unwrap();
        assert!(out.holds, "{out:?}");
        assert!(out.residual.unwrap() < 1e-12);
    }

    #[test]
    fn zhang_identity_scalar_examples() {
        let out = residual_identity(&Identity::Zhang { p: 2.0, q: 2.0 }, &scalar(1.0), &scalar(1.0), &tol()).unwrap();
        assert_eq!(out.residual, Some(0.0));
        let (lhs, rhs) = Identity::Zhang { p: 3.0, q: 1.5 }.sides(&scalar(1.0), &scalar(1.0)).unwrap();
        assert!((lhs[(0, 0)].re - 4.5).abs() < 1e-14);
        assert!((rhs[(0, 0)].re - 4.5).abs() < 1e-14);
    }

    #[test]
    fn identity_parameter_errors() {
        let (a, b) = sample_pair();
        let e = residual_identity(&Identity::Parallelogram { t: 1e-12 }, &a, &b, &tol());
        assert!(matches!(e, Err(Error::BadParam(_))));
        let e = residual_identity(&Identity::Zhang { p: 3.0, q: 3.0 }, &a, &b, &tol());
        assert!(matches!(e, Err(Error::BadParam(ref m)) if m.contains("1/p+1/q != 1")));
    }

    #[test]
    fn hirzallah_examples() {
        let (a, _) = sample_pair();
        // p = q = 2, A = B: LHS = |2A|^2 = RHS
        let out = check_hirzallah(&a, &a, 2.0, 2.0, None, &tol()).unwrap();
        assert!(out.holds && out.margin.abs() < 1e-12);
        let out = check_hirzallah(&scalar(1.0), &scalar(2.0), 1.5, 3.0, None, &tol()).unwrap();
        // LHS = 1 + 6.25, RHS = 1.5 + 12
        assert!((out.margin - (13.5 - 7.25)).abs() < 1e-12);
        assert!(matches!(check_hirzallah(&a, &a, 3.0, 1.5, None, &tol()), Err(Error::BadParam(_))));
    }

    #[test]
    fn classical_bohr_equality_iff() {
        let out = check_classical_bohr(c(2.0, 0.0), c(1.0, 0.0), 1.5, 3.0, &tol()).unwrap();
        assert!(out.holds);
        assert_eq!(out.equality, Some(true));
        assert!(out.margin.abs() < 1e-14);
        let out = check_classical_bohr(c(1.0, 0.0), c(1.0, 0.0), 1.5, 3.0, &tol()).unwrap();
        assert_eq!(out.equality, Some(false));
        assert!(out.margin > 0.0);
    }

    #[test]
    fn hirzallah_norm_with_scalar_weight() {
        let (a, b) = sample_pair();
        let w = NormWeight { x: M::identity(2).scale_real(0.7), gamma: 0.7 };
        let out = check_hirzallah(&a, &b, 1.25, 5.0, Some(&w), &tol()).unwrap();
        assert!(out.holds, "{out:?}");
        let bad = NormWeight { x: M::identity(2).scale_real(0.5), gamma: 0.7 };
        assert!(matches!(check_hirzallah(&a, &b, 1.25, 5.0, Some(&bad), &tol()), Err(Error::BadParam(_))));
    }

    #[test]
    fn ky_fan_partial_sums() {
        let kf = ky_fan_norms(&M::diag_real(&[1.0, -3.0, 2.0]), &tol()).unwrap();
        assert_eq!(kf, vec![3.0, 5.0, 6.0]);
    }

    #[test]
    fn thm22_template_matrix() {
        let tpl = Template::Thm22 { t: 0.5, direction: Direction::Standard, sign: SignPattern::MinusPlus };
        let p = compile_template(&tpl).unwrap();
        let expected = SymmetricMatrix::from_rows(vec![vec![0.25, 0.5], vec![0.5, 1.0]]).unwrap();
        assert!(coefficient_matrix(&p).max_abs_diff(&expected) < 1e-15);
        assert!(certify(&p, &tol()).unwrap().is_certified());
        let zero_t = Template::Thm22 { t: 0.0, direction: Direction::Standard, sign: SignPattern::MinusPlus };
        assert!(matches!(compile_template(&zero_t), Err(Error::BadParam(_))));
    }

    #[test]
    fn jensen_squares_template_matrix() {
        let p = compile_template(&Template::JensenSquares { r: vec![2.0, 2.0] }).unwrap();
        let expected = SymmetricMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert_eq!(coefficient_matrix(&p), expected);
        assert!(certify(&p, &tol()).unwrap().is_certified());
        assert!(compile_template(&Template::JensenSquares { r: vec![2.0, 3.0] }).is_err());
        assert!(compile_template(&Template::JensenSquares { r: vec![0.5, -1.0] }).is_err());
    }

    #[test]
    fn chansangiam_template_matrix() {
        let tpl = Template::Chansangiam { alpha: vec![vec![1.0], vec![1.0]], p: vec![1.0, 1.0] };
        let p = compile_template(&tpl).unwrap();
        let expected = SymmetricMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(coefficient_matrix(&p), expected);
        let r = certify(&p, &tol()).unwrap();
        assert!(!r.is_certified());
        assert!((r.lambda_min + 1.0).abs() < 1e-14);
    }

    #[test]
    fn zhang_convex_requires_simplex() {
        assert!(compile_template(&Template::ZhangConvex { t: vec![0.2, 0.3, 0.5] }).is_ok());
        assert!(compile_template(&Template::ZhangConvex { t: vec![0.2, 0.3] }).is_err());
        assert!(compile_template(&Template::ZhangConvex { t: vec![1.2, -0.2] }).is_err());
    }

    #[test]
    fn cor2x2_conditions_match_certificate() {
        let cases = [
            ([1.0, 0.5], [0.2, -1.0], [2.0, 2.5]),
            ([1.0, 1.0], [1.0, 1.0], [2.0, 2.0]),
            ([1.0, 1.0], [1.0, -1.0], [1.9, 3.0]),
            ([0.3, 0.4], [0.0, 0.0], [0.09, 0.16]),
        ];
        for (a, b, p) in cases {
            let cert = certify(&compile_template(&Template::Cor2x2 { a, b, p }).unwrap(), &tol()).unwrap();
            assert_eq!(cert.is_certified(), cor2x2_conditions(a, b, p), "a={a:?} b={b:?} p={p:?}");
        }
    }

    #[test]
    fn template_operator_check() {
        let (a, b) = sample_pair();
        let ok = Template::Thm22 { t: 0.5, direction: Direction::Standard, sign: SignPattern::PlusMinus };
        assert!(check_template_operators(&ok, &[a.clone(), b.clone()], &tol()).unwrap().holds);
        let bad = Template::Thm22 { t: 2.0, direction: Direction::Standard, sign: SignPattern::PlusMinus };
        assert!(!check_template_operators(&bad, &[a.clone(), b.clone()], &tol()).unwrap().holds);
        let rev = Template::Thm22 { t: 2.0, direction: Direction::Reverse, sign: SignPattern::PlusMinus };
        assert!(check_template_operators(&rev, &[a, b], &tol()).unwrap().holds);
    }

    #[test]
    fn vasic_keckic_examples() {
        let one = c(1.0, 0.0);
        let out = check_vasic_keckic_scalar(&[one, one], &[1.0, 1.0], 2.0, &tol()).unwrap();
        assert!(out.holds && out.margin.abs() < 1e-14);
        let out = check_vasic_keckic_scalar(&[one, one], &[1.0, 2.0], 2.0, &tol()).unwrap();
        assert!((out.margin - 0.5).abs() < 1e-14);
        let out = check_vasic_keckic_scalar(&[one, -one], &[1.0, 1.0], 3.0, &tol()).unwrap();
        assert!(out.holds && out.margin > 0.0);
        assert!(check_vasic_keckic_scalar(&[one], &[1.0], 1.0, &tol()).is_err());
        assert!(check_vasic_keckic_scalar(&[one], &[0.0], 2.0, &tol()).is_err());
    }

    #[test]
    fn rassias_pecaric_examples() {
        let f = ScalarFunction::power(2.0);
        let out = check_rassias_pecaric(&[vec![1.0, 0.0], vec![1.0, 0.0]], &[2.0, -1.0], &f, &tol()).unwrap();
        assert!(out.holds && out.margin.abs() < 1e-14);
        let out = check_rassias_pecaric(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[2.0, -1.0], &f, &tol()).unwrap();
        assert!((out.margin - 4.0).abs() < 1e-14);
        let out =
            check_rassias_pecaric(&[vec![0.3, -2.0, 1.0]], &[1.0], &ScalarFunction::abs_power(3.0), &tol()).unwrap();
        assert!(out.margin.abs() < 1e-12);
        assert!(check_rassias_pecaric(&[vec![1.0], vec![1.0]], &[2.0, 1.0], &f, &tol()).is_err());
        assert!(check_rassias_pecaric(&[vec![1.0], vec![1.0]], &[1.0, -2.0], &f, &tol()).is_err());
        assert!(check_rassias_pecaric(&[vec![1.0]], &[1.0], &ScalarFunction::power(0.5), &tol()).is_err());
    }

    #[test]
    fn monotonic_f_examples() {
        let (a, b) = sample_pair();
        let tuple = vec![a.clone(), b.clone(), &a * &b];
        let out = check_monotonic_f(&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0], &[tuple], &tol()).unwrap();
        assert!(out.holds && !out.hypothesis_failed);

        let ones = vec![scalar(1.0), scalar(1.0), scalar(1.0)];
        let fa = f_of(&[1.0, 0.0, 0.0], &ones);
        let fb = f_of(&[2.0, 0.0, 0.0], &ones);
        assert_eq!((fa[(0, 0)].re, fb[(0, 0)].re), (1.0, 4.0));

        let (x, y) = ([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]);
        assert!(monotone_3d_conditions(&x, &y, &tol()));
        let diff = gram(&pvec(&y).unwrap()).sub(&gram(&pvec(&x).unwrap()));
        assert!(second_order_minors(&diff).iter().all(|m| m.abs() < 1e-12));

        let out = check_monotonic_f(&[1.0, 0.0], &[0.0, 1.0], &[vec![a, b]], &tol()).unwrap();
        assert!(out.hypothesis_failed && !out.holds);
    }
}
