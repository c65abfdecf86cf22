mod common;

use bohr_core::matkernel::{abs_op, func_calculus, herm_eig, singular_values};
use bohr_core::{CMatrix, ScalarFunction};
use common::*;
use proptest::prelude::*;

/// `c0 I + M (c1 I + M (c2 I + ...))`.
fn horner(m: &CMatrix, coeffs: &[f64]) -> CMatrix {
    let n = m.rows();
    let eye = CMatrix::identity(n);
    coeffs.iter().rev().fold(CMatrix::zeros(n, n), |acc, &c| &(m * &acc) + &eye.scale_real(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigendecomposition_reconstructs(m in hermitian_up_to(8)) {
        let eig = herm_eig(&m, &tol()).unwrap();
        let tau = eig.tau(&tol());
        let u = &eig.vectors;
        let n = m.rows();
        prop_assert!((&u.adjoint() * u).max_abs_diff(&CMatrix::identity(n)) <= tau);
        prop_assert!(eig.reconstruct().max_abs_diff(&m) <= tau);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]) || eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn abs_squared_is_gram(c in square_up_to(8)) {
        let a = abs_op(&c, &tol()).unwrap();
        let g = c.gram();
        let tau = herm_eig(&g, &tol()).unwrap().tau(&tol());
        prop_assert!((&a * &a).max_abs_diff(&g) <= tau);
    }

    #[test]
    fn hermitian_singular_values_are_abs_eigenvalues(m in hermitian_up_to(8)) {
        let eig = herm_eig(&m, &tol()).unwrap();
        let tau = eig.tau(&tol());
        let mut abs: Vec<f64> = eig.values.iter().map(|l| l.abs()).collect();
        abs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let sv = singular_values(&m, &tol()).unwrap();
        prop_assert_eq!(sv.len(), abs.len());
        for (s, a) in sv.iter().zip(&abs) {
            prop_assert!((s - a).abs() <= tau, "{} vs {}", s, a);
        }
    }

    #[test]
    fn polynomial_calculus_matches_horner(
        m in hermitian_up_to(6),
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..=5),
    ) {
        let got = func_calculus(&m, &ScalarFunction::polynomial(coeffs.clone()), &tol()).unwrap();
        let want = horner(&m, &coeffs);
        let tau = herm_eig(&want, &tol()).unwrap().tau(&tol());
        prop_assert!(got.max_abs_diff(&want) <= tau, "diff {:e}, tau {:e}", got.max_abs_diff(&want), tau);
    }

    #[test]
    fn calculus_is_unitarily_equivariant(
        (m, u) in (1usize..=6).prop_flat_map(|d| (square(d).prop_map(|m| m.hermitian_part()), unitary(d))),
        r in 1.0f64..3.0,
    ) {
        let f = ScalarFunction::abs_power(r);
        let rotated = &(&u.adjoint() * &m) * &u;
        let lhs = func_calculus(&rotated, &f, &tol()).unwrap();
        let rhs = &(&u.adjoint() * &func_calculus(&m, &f, &tol()).unwrap()) * &u;
        let tau = herm_eig(&rhs, &tol()).unwrap().tau(&tol());
        prop_assert!(lhs.max_abs_diff(&rhs) <= tau);
    }
}
