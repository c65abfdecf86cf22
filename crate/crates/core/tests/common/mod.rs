#![allow(dead_code)]

use bohr_core::random::{rng_from_seed, sample_isometry, sample_psd};
use bohr_core::{CMatrix, Complex, Tol};
use proptest::prelude::*;

pub fn tol() -> Tol {
    Tol::default()
}

/// `rows x cols` complex matrix with entries in the box `[-s, s]^2`.
pub fn rect(rows: usize, cols: usize, s: f64) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-s..s, -s..s), rows * cols).prop_map(move |v| {
        CMatrix::new(rows, cols, v.into_iter().map(|(re, im)| Complex::new(re, im)).collect()).unwrap()
    })
}

pub fn square(dim: usize) -> impl Strategy<Value = CMatrix> {
    rect(dim, dim, 2.0)
}

pub fn square_up_to(max: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max).prop_flat_map(square)
}

pub fn hermitian_up_to(max: usize) -> impl Strategy<Value = CMatrix> {
    square_up_to(max).prop_map(|m| m.hermitian_part())
}

pub fn psd(dim: usize) -> impl Strategy<Value = CMatrix> {
    (any::<u64>(), 0.1f64..4.0).prop_map(move |(seed, s)| sample_psd(&mut rng_from_seed(seed), dim, s))
}

pub fn unitary(dim: usize) -> impl Strategy<Value = CMatrix> {
    any::<u64>().prop_map(move |seed| sample_isometry(&mut rng_from_seed(seed), dim, dim))
}

pub fn real_vec(n: usize, s: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-s..s, n)
}
