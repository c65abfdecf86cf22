use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
///
/// Invariants: at least one row and one column, `data.len() == rows * cols`,
/// every entry finite. Constructors that accept external data validate these;
/// arithmetic on valid matrices can only break finiteness through overflow.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix<T>", into = "RawMatrix<T>", bound = "T: Real")]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

/// Wire form: `{"rows": r, "cols": c, "entries": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
struct RawMatrix<T: Real> {
    rows: usize,
    cols: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> TryFrom<RawMatrix<T>> for Matrix<T> {
    type Error = Error;
    fn try_from(raw: RawMatrix<T>) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.entries)
    }
}

impl<T: Real> From<Matrix<T>> for RawMatrix<T> {
    fn from(m: Matrix<T>) -> Self {
        RawMatrix { rows: m.rows, cols: m.cols, entries: m.data }
    }
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidMatrix(format!("non-finite entry at ({}, {})", k / cols, k % cols)));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be non-empty");
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be non-empty");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from row slices. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[T]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        assert!(rows.iter().all(|row| row.as_ref().len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| Complex::new(rows[i].as_ref()[j], T::zero()))
    }

    pub fn from_complex_rows<R: AsRef<[Complex<T>]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        assert!(rows.iter().all(|row| row.as_ref().len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i].as_ref()[j])
    }

    pub fn diag_real(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex::new(values[i], T::zero()) } else { Complex::zero() })
    }

    pub fn diag(values: &[Complex<T>]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex::zero() })
    }

    /// 1x1 matrix.
    pub fn scalar(z: Complex<T>) -> Self {
        Self { rows: 1, cols: 1, data: vec![z] }
    }

    pub fn column(values: &[Complex<T>]) -> Self {
        Self::from_fn(values.len(), 1, |i, _| values[i])
    }

    /// Block-diagonal matrix with the given (not necessarily square) blocks.
    pub fn block_diag(blocks: &[Matrix<T>]) -> Self {
        let rows = blocks.iter().map(Matrix::rows).sum();
        let cols = blocks.iter().map(Matrix::cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, alpha: Complex<T>) -> Self {
        self.map(|z| z * alpha)
    }

    pub fn scale_real(&self, alpha: T) -> Self {
        self.map(|z| z * alpha)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `C* C`, the squared absolute value `|C|^2`.
    pub fn gram(&self) -> Self {
        &self.adjoint() * self
    }

    /// `(M + M*) / 2`. Panics if not square.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian_part of non-square matrix");
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// `max |m_ij - conj(m_ji)|`. Panics if not square.
    pub fn asymmetry(&self) -> T {
        assert!(self.is_square(), "asymmetry of non-square matrix");
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn max_norm(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `max |a_ij - b_ij|`; shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    /// Real parts of a matrix whose imaginary parts are all zero, row-major.
    pub fn real_entries(&self) -> Option<Vec<T>> {
        if self.data.iter().all(|z| z.im == T::zero()) {
            Some(self.data.iter().map(|z| z.re).collect())
        } else {
            None
        }
    }

    /// Principal submatrix on the given index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch; the `try_*` methods are the
// checked entry points for user-supplied shapes.
impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        self.try_add(rhs).expect("matrix add")
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix sub")
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix mul")
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
