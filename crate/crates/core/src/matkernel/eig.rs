use num_complex::Complex;
use num_traits::Zero;

use super::{Matrix, Tolerance};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hard cap on cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 50;

/// Eigendecomposition `M = U diag(values) U*` of a Hermitian matrix.
///
/// `values` is sorted descending; ties keep the order in which the Jacobi
/// iteration left them on the diagonal. Column `j` of `vectors` is the unit
/// eigenvector for `values[j]`.
#[derive(Debug, Clone)]
pub struct HermitianEig<T: Real> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> T {
        self.values[0]
    }

    /// `max |lambda|`, the spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> T {
        self.max().abs().max(self.min().abs())
    }

    pub fn vector(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim()).map(|i| self.vectors[(i, j)]).collect()
    }

    /// `U diag(f(lambda)) U*`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let mapped: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        self.with_spectrum(&mapped)
    }

    pub fn with_spectrum(&self, spectrum: &[T]) -> Matrix<T> {
        let n = self.dim();
        assert_eq!(spectrum.len(), n);
        let u = &self.vectors;
        Matrix::from_fn(n, n, |i, j| {
            let mut acc = Complex::zero();
            for (k, &s) in spectrum.iter().enumerate() {
                if s != T::zero() {
                    acc += u[(i, k)] * u[(j, k)].conj() * s;
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.with_spectrum(&self.values)
    }

    /// Reconstruction tolerance `atol + rtol * ||M||_2`.
    pub fn tau(&self, tol: &Tolerance<T>) -> T {
        tol.threshold(self.spectral_norm())
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is accepted when `||M - M*||_max <= atol + rtol * ||M||_F` and
/// symmetrized before iterating. Iteration stops once the off-diagonal
/// Frobenius norm is at most `JACOBI_REL_TOL * ||M||_F`.
pub fn herm_eig<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<HermitianEig<T>> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    let fro = m.frobenius_norm();
    let asym = m.asymmetry();
    let limit = tol.threshold(fro);
    if asym > limit {
        return Err(Error::NotHermitian { asymmetry: asym.as_f64(), threshold: limit.as_f64() });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = T::zero();
    }
    let mut v = Matrix::identity(n);
    let target = T::lit(T::JACOBI_REL_TOL) * fro;

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        sweep(&mut a, &mut v);
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep index order
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| diag[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn sweep<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>) {
    let n = a.rows();
    let two = T::lit(2.0);
    for p in 0..n {
        for q in p + 1..n {
            let apq = a[(p, q)];
            let mag = apq.norm();
            if mag == T::zero() {
                continue;
            }
            // Rotate the phase of a_pq away, then apply a real Jacobi rotation.
            let phase = apq / mag;
            let app = a[(p, p)].re;
            let aqq = a[(q, q)].re;
            let theta = (aqq - app) / (two * mag);
            let t = if (theta * theta).is_infinite() {
                T::one() / (two * theta)
            } else {
                let s = if theta >= T::zero() { T::one() } else { -T::one() };
                s / (theta.abs() + (theta * theta + T::one()).sqrt())
            };
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            let cph = phase.conj();

            // A <- A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q)
            for k in 0..n {
                let akp = a[(k, p)];
                let akq = a[(k, q)];
                a[(k, p)] = akp * c - akq * cph * s;
                a[(k, q)] = akp * s + akq * cph * c;
            }
            // A <- G* A
            for k in 0..n {
                let apk = a[(p, k)];
                let aqk = a[(q, k)];
                a[(p, k)] = apk * c - aqk * phase * s;
                a[(q, k)] = apk * s + aqk * phase * c;
            }
            for k in 0..n {
                let vkp = v[(k, p)];
                let vkq = v[(k, q)];
                v[(k, p)] = vkp * c - vkq * cph * s;
                v[(k, q)] = vkp * s + vkq * cph * c;
            }
            a[(p, q)] = Complex::zero();
            a[(q, p)] = Complex::zero();
            a[(p, p)].im = T::zero();
            a[(q, q)].im = T::zero();
        }
    }
}
