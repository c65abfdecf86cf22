//! Coefficient matrices, Löwner-order tests and the quadratic certificate
//! engine.
//!
//! A [`QuadraticCertificateProblem`] asks whether
//!
//! ```text
//! sum_i d_i |A_i|^2  -  sum_k s_k |sum_i u_ki A_i|^2  >= 0
//! ```
//!
//! holds for every tuple of operators `(A_i)`. The answer is decided by the
//! real symmetric matrix `M = D(d) - sum_k s_k Λ(u_k)`: if `M` is positive
//! semidefinite the operator inequality holds for all tuples (apply the
//! positive map `X ↦ (A_1* .. A_n*) X^T (A_1 .. A_n)` to `M`), and if not,
//! the 1x1 tuple `A_i = v_i` built from an eigenvector of the most negative
//! eigenvalue is an explicit counterexample.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{herm_eig, Matrix, Tolerance};
use crate::scalar::Real;

/// Largest size accepted by [`principal_minors_nonneg`] (2^n minors).
pub const MAX_MINOR_DIM: usize = 20;

/// Non-empty vector of finite real coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>", bound = "T: Real")]
pub struct ParamVector<T: Real>(Vec<T>);

impl<T: Real> ParamVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadParam("parameter vector must be non-empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParam("parameter vector has non-finite entries".into()));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn norm(&self) -> T {
        self.0.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b).sqrt()
    }
}

impl<T: Real> TryFrom<Vec<T>> for ParamVector<T> {
    type Error = Error;
    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<ParamVector<T>> for Vec<T> {
    fn from(p: ParamVector<T>) -> Self {
        p.0
    }
}

impl<T: Real> std::ops::Index<usize> for ParamVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Dense real symmetric matrix, serialized as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<T>>", into = "Vec<Vec<T>>", bound = "T: Real")]
pub struct SymmetricMatrix<T: Real> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    /// Rows must form a square array; symmetry is not enforced here (see
    /// [`psd_check`]).
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("coefficient matrix must be square and non-empty".into()));
        }
        Ok(Self { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.n, |i, j| Complex::new(self.get(i, j), T::zero()))
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| x * alpha).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max)
    }

    /// `v^T M v`.
    pub fn quadratic_form(&self, v: &[T]) -> T {
        assert_eq!(v.len(), self.n);
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                acc += v[i] * self.get(i, j) * v[j];
            }
        }
        acc
    }

    fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b).sqrt()
    }
}

impl<T: Real> TryFrom<Vec<Vec<T>>> for SymmetricMatrix<T> {
    type Error = Error;
    fn try_from(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl<T: Real> From<SymmetricMatrix<T>> for Vec<Vec<T>> {
    fn from(m: SymmetricMatrix<T>) -> Self {
        m.rows()
    }
}

/// `Λ(x) = (x_i x_j)`.
pub fn gram<T: Real>(x: &ParamVector<T>) -> SymmetricMatrix<T> {
    SymmetricMatrix::from_fn(x.len(), |i, j| x[i] * x[j])
}

/// `D(x) = diag(x_1, .., x_n)`.
pub fn diag_of<T: Real>(x: &ParamVector<T>) -> SymmetricMatrix<T> {
    SymmetricMatrix::from_fn(x.len(), |i, j| if i == j { x[i] } else { T::zero() })
}

/// Sign of a Gram term; `+1` subtracts `Λ(u)` from the coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = Error;
    fn try_from(s: i8) -> Result<Self> {
        match s {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::BadParam(format!("term sign must be +1 or -1, got {other}"))),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GramTerm<T: Real> {
    pub sign: Sign,
    pub coeffs: ParamVector<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
struct RawProblem<T: Real> {
    n: usize,
    terms: Vec<GramTerm<T>>,
    diag: ParamVector<T>,
}

/// Encodes `sum_i diag_i |A_i|^2 - sum_k sign_k |sum_i coeffs_ki A_i|^2 >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem<T>", into = "RawProblem<T>", bound = "T: Real")]
pub struct QuadraticCertificateProblem<T: Real> {
    n: usize,
    terms: Vec<GramTerm<T>>,
    diag: ParamVector<T>,
}

impl<T: Real> TryFrom<RawProblem<T>> for QuadraticCertificateProblem<T> {
    type Error = Error;
    fn try_from(raw: RawProblem<T>) -> Result<Self> {
        if raw.diag.len() != raw.n {
            return Err(Error::ShapeMismatch(format!("diag has length {} but n = {}", raw.diag.len(), raw.n)));
        }
        Self::new(raw.diag, raw.terms)
    }
}

impl<T: Real> From<QuadraticCertificateProblem<T>> for RawProblem<T> {
    fn from(p: QuadraticCertificateProblem<T>) -> Self {
        RawProblem { n: p.n, terms: p.terms, diag: p.diag }
    }
}

impl<T: Real> QuadraticCertificateProblem<T> {
    pub fn new(diag: ParamVector<T>, terms: Vec<GramTerm<T>>) -> Result<Self> {
        let n = diag.len();
        if let Some(k) = terms.iter().position(|t| t.coeffs.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "term {k} has {} coefficients, expected {n}",
                terms[k].coeffs.len()
            )));
        }
        Ok(Self { n, terms, diag })
    }

    /// Convenience constructor from plain slices.
    pub fn from_parts(diag: &[T], terms: &[(Sign, &[T])]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(sign, c)| Ok(GramTerm { sign: *sign, coeffs: ParamVector::new(c.to_vec())? }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ParamVector::new(diag.to_vec())?, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[GramTerm<T>] {
        &self.terms
    }

    pub fn diag(&self) -> &ParamVector<T> {
        &self.diag
    }

    /// The problem with the inequality reversed (`-M`).
    pub fn reversed(&self) -> Self {
        let diag = ParamVector(self.diag.0.iter().map(|&d| -d).collect());
        let terms = self
            .terms
            .iter()
            .map(|t| GramTerm {
                sign: match t.sign {
                    Sign::Plus => Sign::Minus,
                    Sign::Minus => Sign::Plus,
                },
                coeffs: t.coeffs.clone(),
            })
            .collect();
        Self { n: self.n, terms, diag }
    }
}

/// `M = D(diag) - sum_k sign_k Λ(coeffs_k)`.
pub fn coefficient_matrix<T: Real>(p: &QuadraticCertificateProblem<T>) -> SymmetricMatrix<T> {
    p.terms.iter().fold(diag_of(&p.diag), |m, term| m.sub(&gram(&term.coeffs).scaled(term.sign.value())))
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsdVerdict<T: Real> {
    Psd {
        lambda_min: T,
    },
    /// `witness` is a real unit eigenvector for `lambda_min`.
    NotPsd {
        lambda_min: T,
        witness: Vec<T>,
    },
}

impl<T: Real> PsdVerdict<T> {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd { .. })
    }

    pub fn lambda_min(&self) -> T {
        match self {
            PsdVerdict::Psd { lambda_min } | PsdVerdict::NotPsd { lambda_min, .. } => *lambda_min,
        }
    }
}

fn check_symmetric<T: Real>(m: &SymmetricMatrix<T>, tol: &Tolerance<T>) -> Result<()> {
    let asym = m.asymmetry();
    let limit = tol.threshold(m.frobenius_norm());
    if asym > limit {
        return Err(Error::NotSymmetric { asymmetry: asym.as_f64(), threshold: limit.as_f64() });
    }
    Ok(())
}

/// PSD test `lambda_min(M) >= -(atol + rtol ||M||_2)`.
pub fn psd_check<T: Real>(m: &SymmetricMatrix<T>, tol: &Tolerance<T>) -> Result<PsdVerdict<T>> {
    check_symmetric(m, tol)?;
    let eig = herm_eig(&m.to_matrix(), tol)?;
    let lambda_min = eig.min();
    if lambda_min >= -eig.tau(tol) {
        return Ok(PsdVerdict::Psd { lambda_min });
    }
    // first column (in sorted order) carrying the minimal eigenvalue
    let j = eig.values.iter().position(|&l| l == lambda_min).expect("min is present");
    Ok(PsdVerdict::NotPsd { lambda_min, witness: real_unit_vector(&eig.vector(j)) })
}

/// Removes the global phase (largest entry made real positive, first index
/// on ties) and returns the real part, renormalized.
fn real_unit_vector<T: Real>(v: &[Complex<T>]) -> Vec<T> {
    let mut pivot = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[pivot].norm() * (T::one() + T::lit(1e-12)) {
            pivot = i;
        }
    }
    let phase = v[pivot].conj() / v[pivot].norm();
    let real: Vec<T> = v.iter().map(|z| (z * phase).re).collect();
    let norm = real.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b).sqrt();
    real.into_iter().map(|x| x / norm).collect()
}

/// Sylvester-type test: every principal minor `>= -tau_k`, with
/// `tau_k = (atol + rtol ||M||_2) * k * ||M||_2^k` for `k x k` minors.
pub fn principal_minors_nonneg<T: Real>(m: &SymmetricMatrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    let n = m.dim();
    if n > MAX_MINOR_DIM {
        return Err(Error::TooLarge(format!("{n} x {n} matrix has 2^{n} principal minors (limit {MAX_MINOR_DIM})")));
    }
    check_symmetric(m, tol)?;
    let norm = herm_eig(&m.to_matrix(), tol)?.spectral_norm();
    let tau = tol.threshold(norm);
    let mut idx = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        idx.clear();
        idx.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        let k = idx.len();
        let minor = determinant(
            &idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| m.get(i, j)).collect::<Vec<_>>(),
            k,
        );
        let limit = tau * T::from_usize_lossy(k) * norm.powi(k as i32);
        if minor < -limit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Real>(entries: &[T], k: usize) -> T {
    let mut a = entries.to_vec();
    let mut det = T::one();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x * k + col].abs().partial_cmp(&a[y * k + col].abs()).expect("finite"))
            .expect("non-empty range");
        if a[pivot * k + col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
            }
            det = -det;
        }
        let p = a[col * k + col];
        det *= p;
        for row in col + 1..k {
            let factor = a[row * k + col] / p;
            if factor != T::zero() {
                for j in col..k {
                    let v = a[col * k + j];
                    a[row * k + j] -= factor * v;
                }
            }
        }
    }
    det
}

/// `A <= B` in the Löwner order: `lambda_min(B - A) >= -(atol + rtol ||B - A||_2)`.
pub fn loewner_leq<T: Real>(a: &Matrix<T>, b: &Matrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    for m in [a, b] {
        if !m.is_square() {
            return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
        }
        let asym = m.asymmetry();
        let limit = tol.threshold(m.frobenius_norm());
        if asym > limit {
            return Err(Error::NotHermitian { asymmetry: asym.as_f64(), threshold: limit.as_f64() });
        }
    }
    let diff = b.try_sub(a)?;
    let eig = herm_eig(&diff, tol)?;
    Ok(eig.min() >= -eig.tau(tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CertificateResult<T: Real> {
    pub status: CertificateStatus,
    pub coeff_matrix: SymmetricMatrix<T>,
    pub lambda_min: T,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<ParamVector<T>>,
}

impl<T: Real> CertificateResult<T> {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }
}

/// Decides the problem through the PSD status of its coefficient matrix.
pub fn certify<T: Real>(p: &QuadraticCertificateProblem<T>, tol: &Tolerance<T>) -> Result<CertificateResult<T>> {
    let coeff_matrix = coefficient_matrix(p);
    Ok(match psd_check(&coeff_matrix, tol)? {
        PsdVerdict::Psd { lambda_min } => {
            CertificateResult { status: CertificateStatus::Certified, coeff_matrix, lambda_min, witness: None }
        }
        PsdVerdict::NotPsd { lambda_min, witness } => CertificateResult {
            status: CertificateStatus::Refuted,
            coeff_matrix,
            lambda_min,
            witness: Some(ParamVector(witness)),
        },
    })
}

/// Value of the quadratic expression on the 1x1 tuple `A_i = v_i`:
/// `sum_i d_i v_i^2 - sum_k s_k (sum_i u_ki v_i)^2`, which equals `v^T M v`.
pub fn scalar_witness_value<T: Real>(p: &QuadraticCertificateProblem<T>, v: &[T]) -> Result<T> {
    if v.len() != p.n {
        return Err(Error::ShapeMismatch(format!("witness has length {}, expected {}", v.len(), p.n)));
    }
    let diag_part = p.diag.0.iter().zip(v).map(|(&d, &x)| d * x * x).fold(T::zero(), |a, b| a + b);
    let gram_part = p
        .terms
        .iter()
        .map(|t| {
            let s = t.coeffs.0.iter().zip(v).map(|(&u, &x)| u * x).fold(T::zero(), |a, b| a + b);
            t.sign.value::<T>() * s * s
        })
        .fold(T::zero(), |a, b| a + b);
    Ok(diag_part - gram_part)
}

/// The operator expression `sum_i d_i A_i* A_i - sum_k s_k |sum_i u_ki A_i|^2`.
pub fn operator_expression<T: Real>(p: &QuadraticCertificateProblem<T>, ops: &[Matrix<T>]) -> Result<Matrix<T>> {
    let shape = check_tuple(p, ops)?;
    let mut out = Matrix::zeros(shape.1, shape.1);
    for (a, &d) in ops.iter().zip(&p.diag.0) {
        if d != T::zero() {
            out = &out + &a.gram().scale_real(d);
        }
    }
    for term in &p.terms {
        let combo = linear_combination(&term.coeffs.0, ops);
        out = &out - &combo.gram().scale_real(term.sign.value());
    }
    Ok(out)
}

/// Magnitude scale of [`operator_expression`]: the sum of the Frobenius
/// norms of its individual terms (at least 1).
pub fn expression_scale<T: Real>(p: &QuadraticCertificateProblem<T>, ops: &[Matrix<T>]) -> Result<T> {
    check_tuple(p, ops)?;
    let mut scale = T::zero();
    for (a, &d) in ops.iter().zip(&p.diag.0) {
        scale += d.abs() * a.frobenius_norm().powi(2);
    }
    for term in &p.terms {
        scale += linear_combination(&term.coeffs.0, ops).frobenius_norm().powi(2);
    }
    Ok(scale.max(T::one()))
}

/// `sum_i c_i A_i`.
pub fn linear_combination<T: Real>(coeffs: &[T], ops: &[Matrix<T>]) -> Matrix<T> {
    let (r, c) = ops[0].shape();
    coeffs.iter().zip(ops).fold(Matrix::zeros(r, c), |acc, (&ci, a)| &acc + &a.scale_real(ci))
}

fn check_tuple<T: Real>(p: &QuadraticCertificateProblem<T>, ops: &[Matrix<T>]) -> Result<(usize, usize)> {
    if ops.len() != p.n {
        return Err(Error::ShapeMismatch(format!("tuple has {} operators, expected {}", ops.len(), p.n)));
    }
    let shape = ops[0].shape();
    if ops.iter().any(|a| a.shape() != shape) {
        return Err(Error::ShapeMismatch("operators in a tuple must share one shape".into()));
    }
    Ok(shape)
}
