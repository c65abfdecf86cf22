mod common;

use bohr_core::instance::InequalityId;
use bohr_core::order::{certify, CertificateStatus, GramTerm, ParamVector, QuadraticCertificateProblem, Sign};
use bohr_core::search::{falsify, fuzz, FuzzConfig};
use common::*;
use proptest::prelude::*;

fn problem() -> impl Strategy<Value = QuadraticCertificateProblem<f64>> {
    (1usize..=5)
        .prop_flat_map(|n| (real_vec(n, 2.0), prop::collection::vec((any::<bool>(), real_vec(n, 2.0)), 1..=3)))
        .prop_map(|(d, ts)| {
            let terms = ts
                .into_iter()
                .map(|(plus, c)| GramTerm {
                    sign: if plus { Sign::Plus } else { Sign::Minus },
                    coeffs: ParamVector::new(c).unwrap(),
                })
                .collect();
            QuadraticCertificateProblem::new(ParamVector::new(d).unwrap(), terms).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn falsify_is_complete_and_never_worse_than_the_witness(p in problem(), seed in any::<u64>(), dim in 1usize..=3) {
        let t = tol();
        let cert = certify(&p, &t).unwrap();
        let found = falsify(&p, dim, 60, seed, &t).unwrap();
        match cert.status {
            CertificateStatus::Refuted => {
                let v = found.expect("refuted problems always yield a violation");
                prop_assert!(v.margin <= cert.lambda_min + 1e-9 * cert.lambda_min.abs().max(1.0));
            }
            CertificateStatus::Certified => prop_assert!(found.is_none()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recipes_are_sound_and_reports_reproducible(idx in 0..InequalityId::ALL.len(), seed in any::<u64>(), dim in 1usize..=4) {
        let id = InequalityId::ALL[idx];
        let cfg = FuzzConfig::new(dim, 8, seed);
        let a = fuzz(id, &cfg, &tol()).unwrap();
        let b = fuzz(id, &cfg, &tol()).unwrap();
        prop_assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
        prop_assert_eq!(a.hypothesis_failures, 0, "{}", id);
        prop_assert_eq!(a.violation_count, 0, "{}: worst margin {:e}", id, a.worst_margin);
    }
}
