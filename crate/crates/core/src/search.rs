//! Seeded fuzzing of every evaluator and violation search for certificate
//! problems.
//!
//! Trial `i` of a run with master seed `s` draws from a ChaCha8 stream
//! seeded with [`trial_seed`]`(s, i)`, so reports do not depend on
//! scheduling and any trial can be replayed on its own.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{CheckOutcome, Direction, SignPattern, MIN_ABS_T};
use crate::error::{Error, Result};
use crate::instance::{InequalityId, Instance};
use crate::jensen::{
    conjugate_weights, generate_jensen_instance, generate_spectra_instance, generate_unital_family, JensenInstance,
    JensenMode, PositiveLinearMap,
};
use crate::majorization::{EigenBohrInstance, MajorJensenInstance};
use crate::matkernel::{herm_eig, Matrix, ScalarFunction, Tolerance};
use crate::order::{
    certify, coefficient_matrix, operator_expression, GramTerm, ParamVector, QuadraticCertificateProblem, Sign,
};
use crate::random::{log_uniform, sample_complex, sample_general, sample_matrix, sample_psd, sample_simplex};
pub use crate::random::{random_matrix, rng_from_seed, splitmix64, trial_seed, MatrixKind};

/// Stored violations per report; `violation_count` counts all of them.
pub const MAX_REPORTED_VIOLATIONS: usize = 16;
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Entry magnitude bound for general random matrices.
    pub scale: f64,
}

impl FuzzConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self { dim, trials, seed, scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::BadParam(format!("dim must be in 1..={MAX_DIM} (dim={})", self.dim)));
        }
        if self.trials == 0 {
            return Err(Error::BadParam("trials must be >= 1".into()));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::BadParam(format!("scale must be positive (scale={})", self.scale)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: Instance<f64>,
    pub margin: f64,
    pub trial_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub check: String,
    pub trials: usize,
    pub worst_margin: f64,
    pub violation_count: usize,
    /// The first [`MAX_REPORTED_VIOLATIONS`] violations in trial order.
    pub violations: Vec<Violation>,
    /// Generated instances whose hypotheses did not verify.
    pub hypothesis_failures: usize,
    /// Rejection-sampling attempts, for generators that reject.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation_attempts: Option<usize>,
}

/// Outcome of evaluating one generated instance.
enum Trial {
    Evaluated(CheckOutcome<f64>),
    HypothesisFailed,
}

fn classify(result: Result<CheckOutcome<f64>>) -> Result<Trial> {
    match result {
        Ok(out) if out.hypothesis_failed => Ok(Trial::HypothesisFailed),
        Ok(out) => Ok(Trial::Evaluated(out)),
        Err(Error::ConditionViolated(_) | Error::DomainError(_) | Error::BadParam(_) | Error::NotUnital(_)) => {
            Ok(Trial::HypothesisFailed)
        }
        Err(e) => Err(e),
    }
}

/// Generic driver: `generate` draws an instance from the trial's stream,
/// `evaluate` checks it.
pub fn fuzz_with(
    label: &str,
    cfg: &FuzzConfig,
    mut generate: impl FnMut(&mut ChaCha8Rng, &FuzzConfig) -> Result<Instance<f64>>,
    evaluate: impl Fn(&Instance<f64>) -> Result<CheckOutcome<f64>>,
) -> Result<FuzzReport> {
    cfg.validate()?;
    let mut report = FuzzReport {
        check: label.to_string(),
        trials: cfg.trials,
        worst_margin: f64::INFINITY,
        violation_count: 0,
        violations: Vec::new(),
        hypothesis_failures: 0,
        generation_attempts: None,
    };
    for index in 0..cfg.trials {
        let mut rng = rng_from_seed(trial_seed(cfg.seed, index as u64));
        let instance = match generate(&mut rng, cfg) {
            Ok(inst) => inst,
            Err(Error::GenerationFailed { .. }) => {
                report.hypothesis_failures += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match classify(evaluate(&instance))? {
            Trial::HypothesisFailed => report.hypothesis_failures += 1,
            Trial::Evaluated(out) => {
                report.worst_margin = report.worst_margin.min(out.margin);
                if !out.holds {
                    report.violation_count += 1;
                    if report.violations.len() < MAX_REPORTED_VIOLATIONS {
                        report.violations.push(Violation { instance, margin: out.margin, trial_index: index });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Fuzzes `id` with instances drawn to satisfy its hypotheses.
pub fn fuzz(id: InequalityId, cfg: &FuzzConfig, tol: &Tolerance<f64>) -> Result<FuzzReport> {
    let mut attempts = 0usize;
    let mut report = fuzz_with(
        id.as_str(),
        cfg,
        |rng, cfg| {
            if id == InequalityId::SpectraJensen {
                let (inst, tries) = spectra_recipe(rng, cfg.dim)?;
                attempts += tries;
                return Ok(inst);
            }
            generate_valid(id, rng, cfg.dim, cfg.scale)
        },
        |inst| inst.check(tol),
    )?;
    if id == InequalityId::SpectraJensen {
        report.generation_attempts = Some(attempts);
    }
    Ok(report)
}

/// Fuzzes a pinned instance: parameters stay fixed, operators are redrawn
/// every trial.
pub fn fuzz_instance(instance: &Instance<f64>, cfg: &FuzzConfig, tol: &Tolerance<f64>) -> Result<FuzzReport> {
    instance.validate()?;
    fuzz_with(
        instance.id().as_str(),
        cfg,
        |rng, cfg| randomize_operators(instance, rng, cfg.dim, cfg.scale),
        |inst| inst.check(tol),
    )
}

fn unif(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

fn conjugate_of(p: f64) -> f64 {
    p / (p - 1.0)
}

fn general(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Matrix<f64> {
    sample_general(rng, dim, dim, scale)
}

fn tuple(rng: &mut ChaCha8Rng, n: usize, dim: usize, scale: f64) -> Vec<Matrix<f64>> {
    (0..n).map(|_| general(rng, dim, scale)).collect()
}

fn smallest_eig(m: &Matrix<f64>) -> Result<f64> {
    Ok(herm_eig(m, &Tolerance::default())?.min())
}

/// Draws an instance of `id` satisfying its hypotheses.
pub fn generate_valid(id: InequalityId, rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Result<Instance<f64>> {
    Ok(match id {
        InequalityId::ClassicalBohr => {
            let p = unif(rng, 1.01, 10.0);
            Instance::ClassicalBohr {
                a: sample_complex(rng, scale),
                b: sample_complex(rng, scale),
                p,
                q: conjugate_of(p),
            }
        }
        InequalityId::Hirzallah11 => {
            let p = unif(rng, 1.001, 2.0);
            Instance::Hirzallah11 { a: general(rng, dim, scale), b: general(rng, dim, scale), p, q: conjugate_of(p) }
        }
        InequalityId::HirzallahNorm => {
            let p = unif(rng, 1.001, 2.0);
            let gamma = unif(rng, 0.1, 2.0);
            let psd_scale = unif(rng, 0.1, 3.0);
            let x = &Matrix::identity(dim).scale_real(gamma) + &sample_psd(rng, dim, psd_scale);
            let (a, b) = (general(rng, dim, scale), general(rng, dim, scale));
            Instance::HirzallahNorm { a, b, p, q: conjugate_of(p), x, gamma }
        }
        InequalityId::ZhangIdentity => {
            let p = unif(rng, 1.01, 10.0);
            Instance::ZhangIdentity { a: general(rng, dim, scale), b: general(rng, dim, scale), p, q: conjugate_of(p) }
        }
        InequalityId::Parallelogram => {
            let t = nonzero_t(rng);
            Instance::Parallelogram { a: general(rng, dim, scale), b: general(rng, dim, scale), t }
        }
        InequalityId::ZhangConvex => {
            let n = rng.random_range(1..=6);
            Instance::ZhangConvex { t: sample_simplex(rng, n), operators: Some(tuple(rng, n, dim, scale)) }
        }
        InequalityId::Thm22 => {
            let sign = if rng.random_bool(0.5) { SignPattern::MinusPlus } else { SignPattern::PlusMinus };
            let (t, direction) = match rng.random_range(0..3) {
                0 => (unif(rng, 0.02, 1.0), Direction::Standard),
                1 => (unif(rng, 1.0, 10.0), Direction::Reverse),
                _ => (-unif(rng, 0.02, 10.0), Direction::Reverse),
            };
            Instance::Thm22 { t, direction, sign, operators: Some(tuple(rng, 2, dim, scale)) }
        }
        InequalityId::Cor2x2 => {
            let a = [unif(rng, -2.0, 2.0), unif(rng, -2.0, 2.0)];
            let b = [unif(rng, -2.0, 2.0), unif(rng, -2.0, 2.0)];
            let off: f64 = a[0] * a[1] + b[0] * b[1];
            let d1 = unif(rng, 0.05, 2.0);
            let d2 = off * off / d1 + unif(rng, 0.0, 1.0);
            let p = [a[0] * a[0] + b[0] * b[0] + d1, a[1] * a[1] + b[1] * b[1] + d2];
            Instance::Cor2x2 { a, b, p, operators: Some(tuple(rng, 2, dim, scale)) }
        }
        InequalityId::Chansangiam => {
            let n = rng.random_range(1..=4);
            let m = rng.random_range(1..=4);
            let alpha: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| unif(rng, -2.0, 2.0)).collect()).collect();
            let gram = Matrix::from_fn(n, n, |i, j| {
                num_complex::Complex::new((0..m).map(|k| alpha[i][k] * alpha[j][k]).sum(), 0.0)
            });
            let floor = smallest_eig(&gram)?;
            let p = (0..n).map(|_| floor - unif(rng, 0.0, 1.0)).collect();
            Instance::Chansangiam { alpha, p, operators: Some(tuple(rng, n, dim, scale)) }
        }
        InequalityId::JensenSquares => {
            let n = rng.random_range(1..=6);
            let r = sample_simplex::<f64, _>(rng, n).into_iter().map(|c| 1.0 / c).collect();
            Instance::JensenSquares { r, operators: Some(tuple(rng, n, dim, scale)) }
        }
        InequalityId::VasicKeckicScalar => {
            let n = rng.random_range(1..=6);
            let z = (0..n).map(|_| sample_complex(rng, scale)).collect();
            let a = (0..n).map(|_| log_uniform(rng, 0.1, 10.0)).collect();
            Instance::VasicKeckicScalar { z, a, r: unif(rng, 1.05, 5.0) }
        }
        InequalityId::RassiasPecaric => {
            let m = rng.random_range(1..=4);
            let x = (0..m).map(|_| (0..dim).map(|_| unif(rng, -scale, scale)).collect()).collect();
            let mut p: Vec<f64> = vec![0.0; m];
            for w in p.iter_mut().skip(1) {
                *w = -unif(rng, 0.0, 1.0);
            }
            p[0] = -p.iter().sum::<f64>() + unif(rng, 0.1, 2.0);
            let f = match rng.random_range(0..3) {
                0 => ScalarFunction::abs_power(unif(rng, 1.0, 4.0)),
                1 => ScalarFunction::power(unif(rng, 1.0, 4.0)),
                _ => ScalarFunction::polynomial((0..rng.random_range(1..=4)).map(|_| unif(rng, 0.0, 2.0)).collect()),
            };
            Instance::RassiasPecaric { x, p, f }
        }
        InequalityId::MonotonicF => {
            let n = rng.random_range(2..=3);
            let b: Vec<f64> = (0..n).map(|_| unif(rng, -2.0, 2.0)).collect();
            let c = unif(rng, -1.0, 1.0);
            let a = b.iter().map(|x| c * x).collect();
            let tuples = (0..3).map(|_| tuple(rng, n, dim, scale)).collect();
            Instance::MonotonicF { a, b, tuples }
        }
        InequalityId::JensenBohr => {
            let n = rng.random_range(1..=4);
            let r = unif(rng, 1.05, 2.0);
            Instance::JensenBohr(generate_jensen_instance(rng, dim, n, r, None)?)
        }
        InequalityId::OperatorJensen => {
            let n = rng.random_range(1..=4);
            let maps = generate_unital_family(rng, dim, n);
            let operators = (0..n)
                .map(|_| {
                    let s = unif(rng, 0.5, 3.0);
                    sample_psd(rng, dim, s)
                })
                .collect();
            let f = ScalarFunction::power(unif(rng, 1.0, 2.0));
            Instance::OperatorJensen { maps, operators, f, mode: JensenMode::OperatorConvex }
        }
        InequalityId::SpectraJensen => spectra_recipe(rng, dim)?.0,
        InequalityId::MajorJensen => {
            let ell = rng.random_range(1..=3);
            let f = ScalarFunction::abs_power(unif(rng, 1.0, 3.0));
            Instance::MajorJensen(generate_major_jensen(rng, dim, ell, f)?)
        }
        InequalityId::EigenBohr => {
            let ell = rng.random_range(1..=3);
            let r = unif(rng, 1.05, 4.0);
            Instance::EigenBohr(generate_eigen_bohr(rng, dim, ell, r)?)
        }
        InequalityId::Quadratic => {
            let n = rng.random_range(1..=6);
            let problem = random_problem(rng, n, true)?;
            Instance::Quadratic { problem, operators: Some(tuple(rng, n, dim, scale)) }
        }
    })
}

/// `t` uniform in `[-3, 3]` away from `(-1e-3, 1e-3)`.
pub fn nonzero_t(rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = unif(rng, 1e-3, 3.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

fn spectra_recipe(rng: &mut ChaCha8Rng, dim: usize) -> Result<(Instance<f64>, usize)> {
    let n = rng.random_range(1..=3);
    let r = if rng.random_bool(0.5) { unif(rng, 1.2, 4.0) } else { -unif(rng, 0.2, 3.0) };
    let g = generate_spectra_instance(dim.min(4), n, r, rng.random(), &Tolerance::default())?;
    Ok((Instance::SpectraJensen(g.instance.base), g.attempts))
}

/// Hermitian `A_i`, congruence factors scaled so that
/// `0 < sum alpha_i X_i* X_i <= I`.
pub fn generate_major_jensen(
    rng: &mut ChaCha8Rng,
    dim: usize,
    ell: usize,
    f: ScalarFunction<f64>,
) -> Result<MajorJensenInstance<f64>> {
    let operators = (0..ell).map(|_| sample_matrix(rng, dim, 1.0, MatrixKind::Hermitian)).collect();
    let weights: Vec<f64> = (0..ell).map(|_| log_uniform(rng, 0.5, 2.0)).collect();
    let x = scaled_factors(rng, dim, &weights, 1.0)?;
    Ok(MajorJensenInstance { operators, x, weights, f })
}

/// Hermitian `A_i`, weights `p_i` and factors with
/// `0 < sum p_i^{1/(1-r)} X_i* X_i <= sum p_i^{1/(1-r)} I`.
pub fn generate_eigen_bohr(rng: &mut ChaCha8Rng, dim: usize, ell: usize, r: f64) -> Result<EigenBohrInstance<f64>> {
    let operators = (0..ell).map(|_| sample_matrix(rng, dim, 1.0, MatrixKind::Hermitian)).collect();
    let weights: Vec<f64> = (0..ell).map(|_| log_uniform(rng, 0.5, 2.0)).collect();
    let w = conjugate_weights(&weights, r);
    let x = scaled_factors(rng, dim, &w, w.iter().sum())?;
    Ok(EigenBohrInstance { operators, x, weights, r })
}

/// Random `X_i` rescaled so that `lambda_max(sum w_i X_i* X_i) = u * bound`
/// with `u` in `[0.5, 1]`, redrawn while the sum is nearly singular.
fn scaled_factors(rng: &mut ChaCha8Rng, dim: usize, w: &[f64], bound: f64) -> Result<Vec<Matrix<f64>>> {
    for _ in 0..100 {
        let xs: Vec<Matrix<f64>> = w.iter().map(|_| general(rng, dim, 1.0)).collect();
        let h = w.iter().zip(&xs).fold(Matrix::zeros(dim, dim), |acc, (&wi, x)| &acc + &x.gram().scale_real(wi));
        let eig = herm_eig(&h, &Tolerance::default())?;
        if eig.min() < 1e-3 * eig.max() {
            continue;
        }
        let c = (unif(rng, 0.5, 1.0) * bound / eig.max()).sqrt();
        return Ok(xs.iter().map(|x| x.scale_real(c)).collect());
    }
    Err(Error::GenerationFailed { attempts: 100 })
}

/// Random problem with `n` operators; `certified` adds enough diagonal
/// weight to make the coefficient matrix positive definite, otherwise the
/// diagonal is arbitrary.
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, certified: bool) -> Result<QuadraticCertificateProblem<f64>> {
    let k = rng.random_range(0..=3);
    let terms: Vec<GramTerm<f64>> = (0..k)
        .map(|_| {
            let sign = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let coeffs = (0..n).map(|_| unif(rng, -2.0, 2.0)).collect();
            Ok(GramTerm { sign, coeffs: ParamVector::new(coeffs)? })
        })
        .collect::<Result<_>>()?;
    let zero = QuadraticCertificateProblem::new(ParamVector::new(vec![0.0; n])?, terms.clone())?;
    let diag: Vec<f64> = if certified {
        let floor = smallest_eig(&coefficient_matrix(&zero).to_matrix())?;
        (0..n).map(|_| (-floor).max(0.0) + unif(rng, 0.01, 1.0)).collect()
    } else {
        (0..n).map(|_| unif(rng, -2.0, 2.0)).collect()
    };
    QuadraticCertificateProblem::new(ParamVector::new(diag)?, terms)
}

/// Replaces the operators of `instance` with fresh random ones of size
/// `dim` (parameters and maps are kept; map input sizes take precedence).
pub fn randomize_operators(
    instance: &Instance<f64>,
    rng: &mut ChaCha8Rng,
    dim: usize,
    scale: f64,
) -> Result<Instance<f64>> {
    let mut out = instance.clone();
    let psd = |rng: &mut ChaCha8Rng, d: usize| {
        let s = unif(rng, 0.5, 3.0);
        sample_psd(rng, d, s)
    };
    match &mut out {
        Instance::ClassicalBohr { a, b, .. } => {
            *a = sample_complex(rng, scale);
            *b = sample_complex(rng, scale);
        }
        Instance::Hirzallah11 { a, b, .. }
        | Instance::ZhangIdentity { a, b, .. }
        | Instance::Parallelogram { a, b, .. } => {
            *a = general(rng, dim, scale);
            *b = general(rng, dim, scale);
        }
        Instance::HirzallahNorm { a, b, x, gamma, .. } => {
            *a = general(rng, dim, scale);
            *b = general(rng, dim, scale);
            let s = unif(rng, 0.1, 3.0);
            *x = &Matrix::identity(dim).scale_real(*gamma) + &sample_psd(rng, dim, s);
        }
        Instance::Thm22 { operators, .. } | Instance::Cor2x2 { operators, .. } => {
            *operators = Some(tuple(rng, 2, dim, scale));
        }
        Instance::Chansangiam { p, operators, .. }
        | Instance::ZhangConvex { t: p, operators }
        | Instance::JensenSquares { r: p, operators } => {
            *operators = Some(tuple(rng, p.len(), dim, scale));
        }
        Instance::Quadratic { problem, operators } => {
            *operators = Some(tuple(rng, problem.n(), dim, scale));
        }
        Instance::VasicKeckicScalar { z, .. } => {
            for zi in z.iter_mut() {
                *zi = sample_complex(rng, scale);
            }
        }
        Instance::RassiasPecaric { x, .. } => {
            for v in x.iter_mut() {
                for c in v.iter_mut() {
                    *c = unif(rng, -scale, scale);
                }
            }
        }
        Instance::MonotonicF { a, tuples, .. } => {
            *tuples = (0..3).map(|_| tuple(rng, a.len(), dim, scale)).collect();
        }
        Instance::JensenBohr(inst) | Instance::SpectraJensen(inst) => {
            let d = maps_input_dim(&inst.maps).unwrap_or(dim);
            inst.operators = (0..inst.maps.len()).map(|_| psd(rng, d)).collect();
        }
        Instance::OperatorJensen { maps, operators, .. } => {
            let d = maps_input_dim(maps).unwrap_or(dim);
            *operators = (0..maps.len()).map(|_| psd(rng, d)).collect();
        }
        Instance::MajorJensen(MajorJensenInstance { operators, x, .. })
        | Instance::EigenBohr(EigenBohrInstance { operators, x, .. }) => {
            *operators = x.iter().map(|xi| sample_matrix(rng, xi.rows(), 1.0, MatrixKind::Hermitian)).collect();
        }
    }
    Ok(out)
}

fn maps_input_dim(maps: &[PositiveLinearMap<f64>]) -> Option<usize> {
    maps.iter().find_map(|m| m.input_dim())
}

/// Pairs a valid Jensen-Bohr instance (weight condition with constant `k`)
/// with the claim evaluated at constant `claimed_k`. With `claimed_k < k`
/// the hypothesis is dropped.
pub fn jensen_bohr_claim(
    inst: &JensenInstance<f64>,
    claimed_k: f64,
    tol: &Tolerance<f64>,
) -> Result<CheckOutcome<f64>> {
    let (lhs, rhs) = crate::jensen::jensen_bohr_sides(inst, claimed_k, tol)?;
    crate::catalog::operator_gap(&lhs, &rhs, tol)
}

/// `lambda_min` of the operator expression on a tuple.
fn expression_margin(p: &QuadraticCertificateProblem<f64>, ops: &[Matrix<f64>], tol: &Tolerance<f64>) -> Result<f64> {
    Ok(herm_eig(&operator_expression(p, ops)?, tol)?.min())
}

/// Scales a tuple to `sum ||A_i||_F^2 = 1`.
fn normalize(ops: Vec<Matrix<f64>>) -> Vec<Matrix<f64>> {
    let norm = ops.iter().map(|a| a.frobenius_norm().powi(2)).sum::<f64>().sqrt();
    if norm > 0.0 {
        ops.into_iter().map(|a| a.scale_real(1.0 / norm)).collect()
    } else {
        ops
    }
}

pub const HILL_INITIAL_STEP: f64 = 0.5;
pub const HILL_PATIENCE: usize = 20;
pub const HILL_MIN_STEP: f64 = 1e-6;

/// Searches for a normalized tuple violating the operator inequality of
/// `p`. For refuted problems the scalar witness always yields a violation
/// with margin `lambda_min(M)`; a hill climb over `dim x dim` tuples runs
/// in addition and the more negative result is returned.
pub fn falsify(
    p: &QuadraticCertificateProblem<f64>,
    dim: usize,
    iters: usize,
    seed: u64,
    tol: &Tolerance<f64>,
) -> Result<Option<Violation>> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::BadParam(format!("dim must be in 1..={MAX_DIM} (dim={dim})")));
    }
    let cert = certify(p, tol)?;
    let norm = herm_eig(&cert.coeff_matrix.to_matrix(), tol)?.spectral_norm();
    let threshold = tol.threshold(norm);

    let mut best: Option<(f64, Vec<Matrix<f64>>, usize)> = None;
    if let Some(v) = &cert.witness {
        let ops: Vec<Matrix<f64>> = v.as_slice().iter().map(|&x| Matrix::diag_real(&[x])).collect();
        let margin = expression_margin(p, &ops, tol)?;
        best = Some((margin, ops, 0));
    }

    let mut rng = rng_from_seed(seed);
    let mut current = normalize(tuple(&mut rng, p.n(), dim, 1.0));
    let mut current_margin = expression_margin(p, &current, tol)?;
    let mut step = HILL_INITIAL_STEP;
    let mut failures = 0;
    let mut climb_best = (current_margin, current.clone(), 0usize);
    for it in 1..=iters {
        let candidate: Vec<Matrix<f64>> =
            current.iter().map(|a| a + &general(&mut rng, dim, step / (dim as f64).sqrt())).collect();
        let candidate = normalize(candidate);
        let margin = expression_margin(p, &candidate, tol)?;
        if margin < current_margin {
            current = candidate;
            current_margin = margin;
            failures = 0;
            if margin < climb_best.0 {
                climb_best = (margin, current.clone(), it);
            }
        } else {
            failures += 1;
            if failures >= HILL_PATIENCE {
                step /= 2.0;
                failures = 0;
                if step < HILL_MIN_STEP {
                    break;
                }
            }
        }
    }
    if best.as_ref().is_none_or(|b| climb_best.0 < b.0) {
        best = Some(climb_best);
    }
    Ok(best.and_then(|(margin, ops, it)| {
        (margin < -threshold).then(|| Violation {
            instance: Instance::Quadratic { problem: p.clone(), operators: Some(ops) },
            margin,
            trial_index: it,
        })
    }))
}

pub fn thm22_problem(t: f64, direction: Direction, sign: SignPattern) -> Result<QuadraticCertificateProblem<f64>> {
    if t.abs() < MIN_ABS_T {
        return Err(Error::BadParam(format!("t must be non-zero (t={t})")));
    }
    crate::catalog::compile_template(&crate::catalog::Template::Thm22 { t, direction, sign })
}
