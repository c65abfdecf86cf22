//! Seeded random matrices and parameters.
//!
//! Every stream is a ChaCha8 generator seeded from a `u64`; per-trial seeds
//! are derived with [`trial_seed`], so any trial can be replayed alone.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::Matrix;
use crate::scalar::Real;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix64(master ^ index * GOLDEN_GAMMA)`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ index.wrapping_mul(GOLDEN_GAMMA))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixKind {
    /// Entries with real and imaginary parts uniform in `[-scale, scale]`.
    General,
    Hermitian,
    /// `G*G` rescaled to spectral radius at most `scale`.
    Psd,
    /// `U diag(d) U*` with `d` uniform in `[lo, hi]`.
    PositiveWithBounds {
        lo: f64,
        hi: f64,
    },
    /// Haar-like unitary (orthonormalized Gaussian matrix).
    Unitary,
}

/// Deterministic in `(dim, seed, scale, kind)`.
pub fn random_matrix<T: Real>(dim: usize, seed: u64, scale: T, kind: MatrixKind) -> Result<Matrix<T>> {
    if dim == 0 {
        return Err(Error::BadParam("dimension must be positive".into()));
    }
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::BadParam(format!("scale must be positive (scale={scale})")));
    }
    if let MatrixKind::PositiveWithBounds { lo, hi } = kind {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::BadParam(format!("need 0 < m <= M (m={lo}, M={hi})")));
        }
    }
    Ok(sample_matrix(&mut rng_from_seed(seed), dim, scale, kind))
}

/// Draws one square matrix of the given kind from `rng`.
pub fn sample_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: T, kind: MatrixKind) -> Matrix<T> {
    match kind {
        MatrixKind::General => sample_general(rng, dim, dim, scale),
        MatrixKind::Hermitian => sample_general(rng, dim, dim, scale).hermitian_part(),
        MatrixKind::Psd => sample_psd(rng, dim, scale),
        MatrixKind::PositiveWithBounds { lo, hi } => {
            let d: Vec<T> = (0..dim).map(|_| T::lit(rng.random_range(lo..=hi))).collect();
            with_spectrum(rng, &d)
        }
        MatrixKind::Unitary => sample_isometry(rng, dim, dim),
    }
}

pub fn sample_general<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: T) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.random_range(-1.0..=1.0);
        let im: f64 = rng.random_range(-1.0..=1.0);
        Complex::new(T::lit(re) * scale, T::lit(im) * scale)
    })
}

/// `G*G` with `||G*G||_F = scale` (so every eigenvalue lies in `[0, scale]`).
pub fn sample_psd<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: T) -> Matrix<T> {
    let g = sample_general(rng, dim, dim, T::one()).gram();
    let norm = g.frobenius_norm();
    if norm > T::zero() {
        g.scale_real(scale / norm)
    } else {
        g
    }
}

/// `U diag(spectrum) U*` for a random unitary `U`.
pub fn with_spectrum<T: Real, R: Rng + ?Sized>(rng: &mut R, spectrum: &[T]) -> Matrix<T> {
    let u = sample_isometry(rng, spectrum.len(), spectrum.len());
    let d = Matrix::diag_real(spectrum);
    &(&u * &d) * &u.adjoint()
}

/// `rows x cols` matrix with orthonormal columns (`rows >= cols`), from
/// Gram-Schmidt on a complex Gaussian matrix.
pub fn sample_isometry<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        let g = Matrix::from_fn(rows, cols, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re), T::lit(im))
        });
        if let Some(q) = orthonormalize(&g) {
            return q;
        }
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass; `None` if the
/// columns are numerically dependent.
fn orthonormalize<T: Real>(g: &Matrix<T>) -> Option<Matrix<T>> {
    let (rows, cols) = g.shape();
    let mut q: Vec<Vec<Complex<T>>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v: Vec<Complex<T>> = (0..rows).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for u in &q {
                let dot = u.iter().zip(&v).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if !(norm > T::lit(1e-6)) {
            return None;
        }
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    Some(Matrix::from_fn(rows, cols, |i, j| q[j][i]))
}

/// Uniform on the open probability simplex (normalized exponentials).
pub fn sample_simplex<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| T::lit(x / sum)).collect()
}

/// `exp(U)` with `U` uniform in `[ln lo, ln hi]`.
pub fn log_uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.random_range(lo.ln()..=hi.ln()).exp())
}

pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.random_range(lo..=hi))
}

pub fn sample_complex<T: Real, R: Rng + ?Sized>(rng: &mut R, scale: T) -> Complex<T> {
    Complex::new(uniform::<T, R>(rng, -1.0, 1.0) * scale, uniform::<T, R>(rng, -1.0, 1.0) * scale)
}
