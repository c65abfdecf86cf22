//! Tagged instances: one inequality id plus its parameters and operators.
//!
//! The JSON form is an object whose `"id"` names the inequality, e.g.
//! `{"id": "thm22", "t": 0.5, "direction": "standard", "sign": "minus_plus"}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    check_classical_bohr, check_hirzallah, check_monotonic_f, check_rassias_pecaric, check_template_operators,
    check_vasic_keckic_scalar, compile_template, residual_identity, validate_conjugate, validate_hirzallah,
    vasic_keckic_sides, CheckOutcome, Direction, Identity, NormWeight, SignPattern, Template,
};
use crate::error::{Error, Result};
use crate::jensen::{
    check_jensen_bohr, check_operator_jensen, check_spectra_jensen, JensenInstance, JensenMode, PositiveLinearMap,
    SpectraInstance,
};
use crate::majorization::{check_eigen_bohr, check_major_jensen, EigenBohrInstance, MajorJensenInstance};
use crate::matkernel::{herm_eig, Matrix, ScalarFunction, Tolerance};
use crate::order::{certify, expression_scale, operator_expression, QuadraticCertificateProblem};
use crate::scalar::Real;

macro_rules! inequality_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Names every evaluator; parameters live in [`Instance`].
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum InequalityId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl InequalityId {
            pub const ALL: &'static [InequalityId] = &[$(InequalityId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(InequalityId::$variant => $name,)*
                }
            }
        }
    };
}

inequality_ids! {
    ClassicalBohr => "classical_bohr",
    Hirzallah11 => "hirzallah11",
    HirzallahNorm => "hirzallah_norm",
    ZhangIdentity => "zhang_identity",
    ZhangConvex => "zhang_convex",
    Parallelogram => "parallelogram",
    Thm22 => "thm22",
    Cor2x2 => "cor2x2",
    Chansangiam => "chansangiam",
    VasicKeckicScalar => "vasic_keckic_scalar",
    RassiasPecaric => "rassias_pecaric",
    JensenSquares => "jensen_squares",
    MonotonicF => "monotonic_f",
    JensenBohr => "jensen_bohr",
    OperatorJensen => "operator_jensen",
    SpectraJensen => "spectra_jensen",
    MajorJensen => "major_jensen",
    EigenBohr => "eigen_bohr",
    Quadratic => "quadratic",
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|id| id.as_str() == s).ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }
}

type Operators<T> = Option<Vec<Matrix<T>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", bound = "T: Real")]
pub enum Instance<T: Real> {
    ClassicalBohr {
        a: Complex<T>,
        b: Complex<T>,
        p: T,
        q: T,
    },
    Hirzallah11 {
        a: Matrix<T>,
        b: Matrix<T>,
        p: T,
        q: T,
    },
    HirzallahNorm {
        a: Matrix<T>,
        b: Matrix<T>,
        p: T,
        q: T,
        x: Matrix<T>,
        gamma: T,
    },
    ZhangIdentity {
        a: Matrix<T>,
        b: Matrix<T>,
        p: T,
        q: T,
    },
    ZhangConvex {
        t: Vec<T>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operators: Operators<T>,
    },
    Parallelogram {
        a: Matrix<T>,
        b: Matrix<T>,
        t: T,
    },
    Thm22 {
        t: T,
        direction: Direction,
        sign: SignPattern,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operators: Operators<T>,
    },
    Cor2x2 {
        a: [T; 2],
        b: [T; 2],
        p: [T; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operators: Operators<T>,
    },
    Chansangiam {
        /// `alpha[i][k]`: row per operator, column per Gram term.
        alpha: Vec<Vec<T>>,
        p: Vec<T>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operators: Operators<T>,
    },
    VasicKeckicScalar {
        z: Vec<Complex<T>>,
        a: Vec<T>,
        r: T,
    },
    RassiasPecaric {
        x: Vec<Vec<T>>,
        p: Vec<T>,
        f: ScalarFunction<T>,
    },
    JensenSquares {
        r: Vec<T>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operators: Operators<T>,
    },
    MonotonicF {
        a: Vec<T>,
        b: Vec<T>,
        tuples: Vec<Vec<Matrix<T>>>,
    },
    JensenBohr(JensenInstance<T>),
    OperatorJensen {
        maps: Vec<PositiveLinearMap<T>>,
        operators: Vec<Matrix<T>>,
        f: ScalarFunction<T>,
        mode: JensenMode,
    },
    SpectraJensen(JensenInstance<T>),
    MajorJensen(MajorJensenInstance<T>),
    EigenBohr(EigenBohrInstance<T>),
    Quadratic {
        problem: QuadraticCertificateProblem<T>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operators: Operators<T>,
    },
}

fn square_pair<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("A is {}x{} but B is {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    Ok(())
}

fn tuple_shape<T: Real>(ops: &[Matrix<T>], n: usize) -> Result<()> {
    if ops.len() != n {
        return Err(Error::ShapeMismatch(format!("expected {n} operators, got {}", ops.len())));
    }
    if ops.iter().any(|m| m.shape() != ops[0].shape()) {
        return Err(Error::ShapeMismatch("operators in a tuple must share one shape".into()));
    }
    Ok(())
}

impl<T: Real> Instance<T> {
    pub fn id(&self) -> InequalityId {
        match self {
            Self::ClassicalBohr { .. } => InequalityId::ClassicalBohr,
            Self::Hirzallah11 { .. } => InequalityId::Hirzallah11,
            Self::HirzallahNorm { .. } => InequalityId::HirzallahNorm,
            Self::ZhangIdentity { .. } => InequalityId::ZhangIdentity,
            Self::ZhangConvex { .. } => InequalityId::ZhangConvex,
            Self::Parallelogram { .. } => InequalityId::Parallelogram,
            Self::Thm22 { .. } => InequalityId::Thm22,
            Self::Cor2x2 { .. } => InequalityId::Cor2x2,
            Self::Chansangiam { .. } => InequalityId::Chansangiam,
            Self::VasicKeckicScalar { .. } => InequalityId::VasicKeckicScalar,
            Self::RassiasPecaric { .. } => InequalityId::RassiasPecaric,
            Self::JensenSquares { .. } => InequalityId::JensenSquares,
            Self::MonotonicF { .. } => InequalityId::MonotonicF,
            Self::JensenBohr(_) => InequalityId::JensenBohr,
            Self::OperatorJensen { .. } => InequalityId::OperatorJensen,
            Self::SpectraJensen(_) => InequalityId::SpectraJensen,
            Self::MajorJensen(_) => InequalityId::MajorJensen,
            Self::EigenBohr(_) => InequalityId::EigenBohr,
            Self::Quadratic { .. } => InequalityId::Quadratic,
        }
    }

    /// The certificate template, for ids that compile to one.
    pub fn template(&self) -> Option<Template<T>> {
        match self {
            Self::Thm22 { t, direction, sign, .. } => {
                Some(Template::Thm22 { t: *t, direction: *direction, sign: *sign })
            }
            Self::Cor2x2 { a, b, p, .. } => Some(Template::Cor2x2 { a: *a, b: *b, p: *p }),
            Self::Chansangiam { alpha, p, .. } => Some(Template::Chansangiam { alpha: alpha.clone(), p: p.clone() }),
            Self::ZhangConvex { t, .. } => Some(Template::ZhangConvex { t: t.clone() }),
            Self::JensenSquares { r, .. } => Some(Template::JensenSquares { r: r.clone() }),
            _ => None,
        }
    }

    /// The certificate problem for templates and raw problems.
    pub fn problem(&self) -> Option<Result<QuadraticCertificateProblem<T>>> {
        match self {
            Self::Quadratic { problem, .. } => Some(Ok(problem.clone())),
            _ => self.template().map(|t| compile_template(&t)),
        }
    }

    /// Operator tuple of a template or problem instance, if supplied.
    pub fn tuple(&self) -> Option<&[Matrix<T>]> {
        match self {
            Self::Thm22 { operators, .. }
            | Self::Cor2x2 { operators, .. }
            | Self::Chansangiam { operators, .. }
            | Self::ZhangConvex { operators, .. }
            | Self::JensenSquares { operators, .. }
            | Self::Quadratic { operators, .. } => operators.as_deref(),
            _ => None,
        }
    }

    /// Parameter-domain and shape checks that need no spectral work beyond
    /// what the parameters themselves require.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ClassicalBohr { p, q, .. } => validate_conjugate(*p, *q),
            Self::Hirzallah11 { a, b, p, q } => {
                validate_hirzallah(*p, *q)?;
                square_pair(a, b)
            }
            Self::HirzallahNorm { a, b, p, q, x, gamma } => {
                validate_hirzallah(*p, *q)?;
                square_pair(a, b)?;
                if x.shape() != (a.cols(), a.cols()) {
                    return Err(Error::ShapeMismatch(format!("X must be {0}x{0}", a.cols())));
                }
                if !(*gamma > T::zero()) {
                    return Err(Error::BadParam(format!("gamma must be positive (gamma={gamma})")));
                }
                Ok(())
            }
            Self::ZhangIdentity { a, b, p, q } => {
                Identity::Zhang { p: *p, q: *q }.validate()?;
                square_pair(a, b)
            }
            Self::Parallelogram { a, b, t } => {
                Identity::Parallelogram { t: *t }.validate()?;
                square_pair(a, b)
            }
            Self::VasicKeckicScalar { z, a, r } => vasic_keckic_sides(z, a, *r).map(|_| ()),
            Self::RassiasPecaric { x, p, f } => check_rassias_pecaric(x, p, f, &Tolerance::default()).map(|_| ()),
            Self::MonotonicF { a, b, tuples } => {
                if a.is_empty() || a.len() != b.len() {
                    return Err(Error::ShapeMismatch(format!("|a| = {} but |b| = {}", a.len(), b.len())));
                }
                tuples.iter().try_for_each(|t| tuple_shape(t, a.len()))
            }
            Self::JensenBohr(inst) | Self::SpectraJensen(inst) => inst.dims().map(|_| ()),
            Self::OperatorJensen { maps, operators, .. } => JensenInstance {
                maps: maps.clone(),
                a: vec![T::one(); maps.len()],
                r: T::lit(2.0),
                operators: operators.clone(),
                k_constant: None,
            }
            .dims()
            .map(|_| ()),
            Self::MajorJensen(inst) => {
                if inst.operators.len() != inst.x.len() || inst.x.len() != inst.weights.len() {
                    return Err(Error::ShapeMismatch("operators, x and weights must have equal lengths".into()));
                }
                Ok(())
            }
            Self::EigenBohr(inst) => {
                if inst.operators.len() != inst.x.len() || inst.x.len() != inst.weights.len() {
                    return Err(Error::ShapeMismatch("operators, x and weights must have equal lengths".into()));
                }
                Ok(())
            }
            Self::ZhangConvex { .. }
            | Self::Thm22 { .. }
            | Self::Cor2x2 { .. }
            | Self::Chansangiam { .. }
            | Self::JensenSquares { .. }
            | Self::Quadratic { .. } => {
                let p = self.problem().expect("template or problem")?;
                match self.tuple() {
                    Some(ops) => tuple_shape(ops, p.n()),
                    None => Ok(()),
                }
            }
        }
    }

    /// Evaluates the instance. Templates and problems without operators are
    /// decided by their certificate (`margin = lambda_min(M)`).
    pub fn check(&self, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
        self.validate()?;
        match self {
            Self::ClassicalBohr { a, b, p, q } => check_classical_bohr(*a, *b, *p, *q, tol),
            Self::Hirzallah11 { a, b, p, q } => check_hirzallah(a, b, *p, *q, None, tol),
            Self::HirzallahNorm { a, b, p, q, x, gamma } => {
                check_hirzallah(a, b, *p, *q, Some(&NormWeight { x: x.clone(), gamma: *gamma }), tol)
            }
            Self::ZhangIdentity { a, b, p, q } => residual_identity(&Identity::Zhang { p: *p, q: *q }, a, b, tol),
            Self::Parallelogram { a, b, t } => residual_identity(&Identity::Parallelogram { t: *t }, a, b, tol),
            Self::VasicKeckicScalar { z, a, r } => check_vasic_keckic_scalar(z, a, *r, tol),
            Self::RassiasPecaric { x, p, f } => check_rassias_pecaric(x, p, f, tol),
            Self::MonotonicF { a, b, tuples } => check_monotonic_f(a, b, tuples, tol),
            Self::JensenBohr(inst) => check_jensen_bohr(inst, tol),
            Self::OperatorJensen { maps, operators, f, mode } => check_operator_jensen(maps, operators, f, *mode, tol),
            Self::SpectraJensen(inst) => check_spectra_jensen(&SpectraInstance::new(inst.clone(), tol)?, tol),
            Self::MajorJensen(inst) => check_major_jensen(inst, tol),
            Self::EigenBohr(inst) => check_eigen_bohr(inst, tol),
            Self::Quadratic { problem, operators } => match operators {
                Some(ops) => {
                    let margin = herm_eig(&operator_expression(problem, ops)?, tol)?.min();
                    Ok(CheckOutcome::from_margin(margin, expression_scale(problem, ops)?, tol))
                }
                None => certificate_outcome(problem, tol),
            },
            _ => {
                let template = self.template().expect("remaining ids are templates");
                match self.tuple() {
                    Some(ops) => check_template_operators(&template, ops, tol),
                    None => certificate_outcome(&compile_template(&template)?, tol),
                }
            }
        }
    }
}

fn certificate_outcome<T: Real>(p: &QuadraticCertificateProblem<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    let cert = certify(p, tol)?;
    let norm = herm_eig(&cert.coeff_matrix.to_matrix(), tol)?.spectral_norm();
    Ok(CheckOutcome::from_margin(cert.lambda_min, norm, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn ids_round_trip() {
        for &id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert!(matches!("nope".parse::<InequalityId>(), Err(Error::UnknownCheck(_))));
    }

    #[test]
    fn thm22_schema_example() {
        let inst: Instance<f64> =
            serde_json::from_str(r#"{"id":"thm22","t":0.5,"direction":"standard","sign":"minus_plus"}"#).unwrap();
        assert_eq!(inst.id(), InequalityId::Thm22);
        inst.validate().unwrap();
        let out = inst.check(&tol()).unwrap();
        assert!(out.holds);
    }

    #[test]
    fn conjugacy_rejected() {
        let inst: Instance<f64> = serde_json::from_str(
            r#"{"id":"zhang_identity","p":3,"q":3,
                "a":{"rows":1,"cols":1,"entries":[[1,0]]},
                "b":{"rows":1,"cols":1,"entries":[[1,0]]}}"#,
        )
        .unwrap();
        let err = inst.validate().unwrap_err();
        assert!(err.to_string().contains("1/p+1/q != 1"), "{err}");
    }

    #[test]
    fn missing_parameter_is_a_parse_error() {
        assert!(serde_json::from_str::<Instance<f64>>(r#"{"id":"thm22","t":0.5}"#).is_err());
        assert!(serde_json::from_str::<Instance<f64>>(r#"{"id":"bogus"}"#).is_err());
    }

    #[test]
    fn every_variant_round_trips() {
        let one = Matrix::<f64>::identity(1);
        let samples: Vec<Instance<f64>> = vec![
            Instance::ClassicalBohr { a: Complex::new(1.0, 2.0), b: Complex::new(0.5, 0.0), p: 2.0, q: 2.0 },
            Instance::Cor2x2 {
                a: [1.0, 0.5],
                b: [0.2, 1.0],
                p: [2.0, 2.0],
                operators: Some(vec![one.clone(), one.clone()]),
            },
            Instance::JensenBohr(JensenInstance {
                maps: vec![PositiveLinearMap::Scale { w: 1.0 }],
                a: vec![1.0],
                r: 2.0,
                operators: vec![one.clone()],
                k_constant: Some(1.5),
            }),
            Instance::RassiasPecaric { x: vec![vec![1.0, 2.0]], p: vec![1.0], f: ScalarFunction::abs_power(2.0) },
            Instance::Quadratic {
                problem: QuadraticCertificateProblem::from_parts(&[1.0], &[]).unwrap(),
                operators: None,
            },
        ];
        for inst in samples {
            let text = serde_json::to_string(&inst).unwrap();
            let back: Instance<f64> = serde_json::from_str(&text).unwrap();
            assert_eq!(back, inst, "{text}");
        }
    }
}
