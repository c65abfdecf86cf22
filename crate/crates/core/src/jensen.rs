//! Positive linear maps and the discrete Jensen-Bohr inequalities.
//!
//! With weights `a_i > 0`, `w_i = a_i^{1/(1-r)}` and `S = sum w_i`, the
//! conclusion checked throughout is
//!
//! ```text
//! (sum phi_i(A_i))^r <= k^{r-1} S^{r-1} sum a_i phi_i(A_i^r)
//! ```
//!
//! under `sum w_i phi_i(I) <= k S I`.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{operator_gap, CheckOutcome};
use crate::error::{Error, Result};
use crate::matkernel::{func_calculus, herm_eig, spectral_bounds, Matrix, ScalarFunction, Tolerance};
use crate::random::{log_uniform, sample_general, sample_isometry, sample_psd, sample_simplex, uniform, with_spectrum};
use crate::scalar::Real;

/// A positive linear map between matrix algebras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real", try_from = "RawMap<T>")]
pub enum PositiveLinearMap<T: Real> {
    /// `A -> X* A X`.
    Congruence { x: Matrix<T> },
    /// `A -> <Ax, x>` (a 1x1 output).
    VectorState { x: Vec<Complex<T>> },
    /// `A -> wA`, any dimension.
    Scale { w: T },
    /// `A -> P A P` with `P` the coordinate projection onto `indices`.
    Pinch { dim: usize, indices: Vec<usize> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
enum RawMap<T: Real> {
    Congruence { x: Matrix<T> },
    VectorState { x: Vec<Complex<T>> },
    Scale { w: T },
    Pinch { dim: usize, indices: Vec<usize> },
}

impl<T: Real> TryFrom<RawMap<T>> for PositiveLinearMap<T> {
    type Error = Error;

    fn try_from(raw: RawMap<T>) -> Result<Self> {
        match raw {
            RawMap::Congruence { x } => Ok(Self::Congruence { x }),
            RawMap::VectorState { x } => Self::vector_state(x),
            RawMap::Scale { w } => Self::scale(w),
            RawMap::Pinch { dim, indices } => Self::pinch(dim, indices),
        }
    }
}

impl<T: Real> PositiveLinearMap<T> {
    pub fn congruence(x: Matrix<T>) -> Self {
        Self::Congruence { x }
    }

    pub fn vector_state(x: Vec<Complex<T>>) -> Result<Self> {
        if x.is_empty() || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParam("vector state needs a non-empty finite vector".into()));
        }
        Ok(Self::VectorState { x })
    }

    pub fn scale(w: T) -> Result<Self> {
        if !(w >= T::zero()) || !w.is_finite() {
            return Err(Error::BadParam(format!("scale weight must be finite and >= 0 (w={w})")));
        }
        Ok(Self::Scale { w })
    }

    pub fn pinch(dim: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if dim == 0 || indices.last().is_some_and(|&i| i >= dim) {
            return Err(Error::BadParam(format!("pinch indices must lie in 0..{dim}")));
        }
        Ok(Self::Pinch { dim, indices })
    }

    /// `None` when the map accepts any dimension.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            Self::Congruence { x } => Some(x.rows()),
            Self::VectorState { x } => Some(x.len()),
            Self::Scale { .. } => None,
            Self::Pinch { dim, .. } => Some(*dim),
        }
    }

    pub fn output_dim(&self, input_dim: usize) -> usize {
        match self {
            Self::Congruence { x } => x.cols(),
            Self::VectorState { .. } => 1,
            Self::Scale { .. } => input_dim,
            Self::Pinch { dim, .. } => *dim,
        }
    }

    pub fn apply(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        if !a.is_square() {
            return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
        }
        if let Some(d) = self.input_dim() {
            if d != a.rows() {
                return Err(Error::ShapeMismatch(format!("map expects {d}x{d} input, got {}x{}", a.rows(), a.cols())));
            }
        }
        Ok(match self {
            Self::Congruence { x } => &(&x.adjoint() * a) * x,
            Self::VectorState { x } => {
                let col = Matrix::column(x);
                &(&col.adjoint() * a) * &col
            }
            Self::Scale { w } => a.scale_real(*w),
            Self::Pinch { dim, indices } => {
                let mut keep = vec![false; *dim];
                for &i in indices {
                    keep[i] = true;
                }
                Matrix::from_fn(*dim, *dim, |i, j| {
                    if keep[i] && keep[j] {
                        a[(i, j)]
                    } else {
                        Complex::new(T::zero(), T::zero())
                    }
                })
            }
        })
    }

    /// `phi(I_n)`.
    pub fn apply_identity(&self, n: usize) -> Result<Matrix<T>> {
        self.apply(&Matrix::identity(n))
    }

    /// The map `k * phi`; pinches are projections and cannot be rescaled.
    pub fn scaled(&self, k: T) -> Result<Self> {
        if !(k >= T::zero()) {
            return Err(Error::BadParam(format!("scale factor must be >= 0 (k={k})")));
        }
        let root = k.sqrt();
        match self {
            Self::Congruence { x } => Ok(Self::Congruence { x: x.scale_real(root) }),
            Self::VectorState { x } => Ok(Self::VectorState { x: x.iter().map(|z| z * root).collect() }),
            Self::Scale { w } => Ok(Self::Scale { w: *w * k }),
            Self::Pinch { .. } => Err(Error::BadParam("a pinch cannot be rescaled".into())),
        }
    }
}

/// `phi(A)`.
pub fn apply_map<T: Real>(phi: &PositiveLinearMap<T>, a: &Matrix<T>) -> Result<Matrix<T>> {
    phi.apply(a)
}

/// Input and output dimension shared by a family acting on `operators`.
fn family_dims<T: Real>(maps: &[PositiveLinearMap<T>], operators: &[Matrix<T>]) -> Result<(usize, usize)> {
    if maps.is_empty() || maps.len() != operators.len() {
        return Err(Error::ShapeMismatch(format!("{} maps for {} operators", maps.len(), operators.len())));
    }
    let n = operators[0].rows();
    if let Some(a) = operators.iter().find(|a| a.shape() != (n, n)) {
        return Err(Error::ShapeMismatch(format!("operators must all be {n}x{n}, got {}x{}", a.rows(), a.cols())));
    }
    family_output_dim(maps, n).map(|m| (n, m))
}

fn family_output_dim<T: Real>(maps: &[PositiveLinearMap<T>], n: usize) -> Result<usize> {
    let m = maps[0].output_dim(n);
    for phi in maps {
        if phi.input_dim().is_some_and(|d| d != n) {
            return Err(Error::ShapeMismatch(format!("map input dimension {:?} differs from {n}", phi.input_dim())));
        }
        if phi.output_dim(n) != m {
            return Err(Error::ShapeMismatch("maps in a family must share one output dimension".into()));
        }
    }
    Ok(m)
}

/// `sum_i c_i phi_i(A_i)`.
fn weighted_map_sum<T: Real>(maps: &[PositiveLinearMap<T>], c: &[T], operators: &[Matrix<T>]) -> Result<Matrix<T>> {
    let (_, m) = family_dims(maps, operators)?;
    let mut out = Matrix::zeros(m, m);
    for ((phi, &ci), a) in maps.iter().zip(c).zip(operators) {
        out = &out + &phi.apply(a)?.scale_real(ci);
    }
    Ok(out)
}

fn map_sum<T: Real>(maps: &[PositiveLinearMap<T>], operators: &[Matrix<T>]) -> Result<Matrix<T>> {
    weighted_map_sum(maps, &vec![T::one(); maps.len()], operators)
}

fn validate_weights<T: Real>(a: &[T], r: T) -> Result<()> {
    if !r.is_finite() || r == T::one() {
        return Err(Error::BadParam(format!("exponent must be finite and != 1 (r={r})")));
    }
    if a.is_empty() || a.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
        return Err(Error::BadParam("weights a_i must be positive".into()));
    }
    Ok(())
}

/// `w_i = a_i^{1/(1-r)}`.
pub fn conjugate_weights<T: Real>(a: &[T], r: T) -> Vec<T> {
    let e = T::one() / (T::one() - r);
    a.iter().map(|&x| x.powf(e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WeightCondition<T: Real> {
    pub satisfied: bool,
    /// `lambda_min(k S I - sum w_i phi_i(I))`.
    pub margin: T,
}

/// `sum w_i phi_i(I_dim) <= k S I`, `k` defaulting to 1.
pub fn check_weight_condition<T: Real>(
    maps: &[PositiveLinearMap<T>],
    a: &[T],
    r: T,
    k: Option<T>,
    dim: usize,
    tol: &Tolerance<T>,
) -> Result<WeightCondition<T>> {
    validate_weights(a, r)?;
    if maps.len() != a.len() {
        return Err(Error::ShapeMismatch(format!("{} maps for {} weights", maps.len(), a.len())));
    }
    let k = validated_k(k)?;
    let w = conjugate_weights(a, r);
    let s = w.iter().fold(T::zero(), |acc, &x| acc + x);
    let ids = vec![Matrix::identity(dim); maps.len()];
    let h = weighted_map_sum(maps, &w, &ids)?;
    let bound = Matrix::identity(h.rows()).scale_real(k * s);
    let eig = herm_eig(&bound.try_sub(&h)?, tol)?;
    let scale = (k * s).max(herm_eig(&h, tol)?.spectral_norm());
    let margin = eig.min();
    Ok(WeightCondition { satisfied: margin >= -tol.threshold(scale), margin })
}

fn validated_k<T: Real>(k: Option<T>) -> Result<T> {
    match k {
        None => Ok(T::one()),
        Some(k) if k > T::zero() && k.is_finite() => Ok(k),
        Some(k) => Err(Error::BadParam(format!("k must be positive (k={k})"))),
    }
}

/// Maps, weights, exponent and operators of one discrete Jensen-Bohr
/// instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct JensenInstance<T: Real> {
    pub maps: Vec<PositiveLinearMap<T>>,
    pub a: Vec<T>,
    pub r: T,
    pub operators: Vec<Matrix<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_constant: Option<T>,
}

impl<T: Real> JensenInstance<T> {
    pub fn dims(&self) -> Result<(usize, usize)> {
        if self.a.len() != self.maps.len() {
            return Err(Error::ShapeMismatch(format!("{} weights for {} maps", self.a.len(), self.maps.len())));
        }
        family_dims(&self.maps, &self.operators)
    }

    pub fn weight_condition(&self, tol: &Tolerance<T>) -> Result<WeightCondition<T>> {
        let (n, _) = self.dims()?;
        check_weight_condition(&self.maps, &self.a, self.r, self.k_constant, n, tol)
    }

    /// Same instance with every map multiplied by `k`.
    pub fn with_scaled_maps(&self, k: T) -> Result<Self> {
        let maps = self.maps.iter().map(|m| m.scaled(k)).collect::<Result<_>>()?;
        Ok(Self { maps, ..self.clone() })
    }
}

/// Both sides of the Jensen-Bohr conclusion with constant `k`, without
/// checking any hypothesis.
pub fn jensen_bohr_sides<T: Real>(
    inst: &JensenInstance<T>,
    k: T,
    tol: &Tolerance<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    inst.dims()?;
    validate_weights(&inst.a, inst.r)?;
    let r = inst.r;
    let power = ScalarFunction::power(r);
    let lhs = func_calculus(&map_sum(&inst.maps, &inst.operators)?, &power, tol)?;
    let powered = inst.operators.iter().map(|a| func_calculus(a, &power, tol)).collect::<Result<Vec<_>>>()?;
    let s = conjugate_weights(&inst.a, r).iter().fold(T::zero(), |acc, &x| acc + x);
    let factor = (k * s).powf(r - T::one());
    let rhs = weighted_map_sum(&inst.maps, &inst.a, &powered)?.scale_real(factor);
    Ok((lhs, rhs))
}

fn require_psd<T: Real>(ops: &[Matrix<T>], strict: bool, tol: &Tolerance<T>) -> Result<Vec<(T, T)>> {
    ops.iter()
        .enumerate()
        .map(|(i, a)| {
            let eig = herm_eig(a, tol)?;
            let floor = if strict { tol.eps_pos() } else { -eig.tau(tol) };
            if eig.min() < floor {
                return Err(Error::DomainError(format!(
                    "operator {i} has lambda_min = {:e}, needs >= {:e}",
                    eig.min(),
                    floor
                )));
            }
            Ok((eig.min(), eig.max()))
        })
        .collect()
}

/// Discrete Jensen-Bohr inequality for the operator convex range
/// `1 < r <= 2`.
pub fn check_jensen_bohr<T: Real>(inst: &JensenInstance<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    if !(inst.r > T::one() && inst.r <= T::lit(2.0)) {
        return Err(Error::BadParam(format!(
            "check_jensen_bohr needs 1 < r <= 2 (r={}); use check_spectra_jensen outside that range",
            inst.r
        )));
    }
    inst.dims()?;
    require_psd(&inst.operators, false, tol)?;
    let cond = inst.weight_condition(tol)?;
    if !cond.satisfied {
        return Err(Error::ConditionViolated(format!(
            "weight condition fails: lambda_min(kSI - sum w_i phi_i(I)) = {:e}",
            cond.margin
        )));
    }
    let k = validated_k(inst.k_constant)?;
    let (lhs, rhs) = jensen_bohr_sides(inst, k, tol)?;
    operator_gap(&lhs, &rhs, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JensenMode {
    OperatorConvex,
    SpectraCondition,
}

/// `sum psi_i(I) = I` within tolerance.
pub fn check_unital<T: Real>(maps: &[PositiveLinearMap<T>], n: usize, tol: &Tolerance<T>) -> Result<()> {
    if maps.is_empty() {
        return Err(Error::NotUnital("empty family".into()));
    }
    let m = family_output_dim(maps, n)?;
    let ids = vec![Matrix::identity(n); maps.len()];
    let sum = map_sum(maps, &ids)?;
    let dev = herm_eig(&sum.try_sub(&Matrix::identity(m))?, tol)?.spectral_norm();
    if dev > tol.threshold(T::one()) {
        return Err(Error::NotUnital(format!("||sum psi_i(I) - I||_2 = {dev:e}")));
    }
    Ok(())
}

fn is_even_integer<T: Real>(r: T) -> bool {
    r.fract() == T::zero() && (r / T::lit(2.0)).fract() == T::zero()
}

/// Convexity of `f` on an interval containing every `[m_i, M_i]`.
fn convex_on<T: Real>(f: &ScalarFunction<T>, lo: T, tol: &Tolerance<T>) -> Result<()> {
    let ok = match f {
        ScalarFunction::AbsPower { r } => *r >= T::one(),
        ScalarFunction::Power { r } => {
            let r = *r;
            (r >= T::one() && (lo >= -tol.atol || is_even_integer(r))) || (r < T::zero() && lo >= tol.eps_pos())
        }
        ScalarFunction::Polynomial { coeffs } => match coeffs.len() {
            0..=2 => true,
            3 => coeffs[2] >= T::zero(),
            _ => false,
        },
    };
    if ok {
        Ok(())
    } else {
        Err(Error::BadParam(format!("{f:?} is not known to be convex on an interval containing the spectra")))
    }
}

/// Index of the first closed interval meeting the open interval
/// `(lo, hi)`; `None` when the open interval is (numerically) empty.
pub fn first_overlap<T: Real>(open: (T, T), intervals: &[(T, T)], tol: &Tolerance<T>) -> Option<usize> {
    let (lo, hi) = open;
    if hi - lo <= tol.threshold(lo.abs().max(hi.abs())) {
        return None;
    }
    intervals.iter().position(|&(m, big_m)| m < hi && big_m > lo)
}

/// Jensen's operator inequality `f(sum psi_i(A_i)) <= sum psi_i(f(A_i))`
/// for a unital family.
pub fn check_operator_jensen<T: Real>(
    maps: &[PositiveLinearMap<T>],
    operators: &[Matrix<T>],
    f: &ScalarFunction<T>,
    mode: JensenMode,
    tol: &Tolerance<T>,
) -> Result<CheckOutcome<T>> {
    let (n, _) = family_dims(maps, operators)?;
    check_unital(maps, n, tol)?;
    let combined = map_sum(maps, operators)?;
    match mode {
        JensenMode::OperatorConvex => {
            let admissible = match f {
                ScalarFunction::Power { r } => *r >= T::one() && *r <= T::lit(2.0),
                _ => false,
            };
            if !admissible {
                return Err(Error::BadParam(format!(
                    "{f:?} is not operator convex on [0, inf); use Power(r), 1 <= r <= 2"
                )));
            }
        }
        JensenMode::SpectraCondition => {
            let bounds = operators.iter().map(|a| spectral_bounds(a, tol)).collect::<Result<Vec<_>>>()?;
            let lo = bounds.iter().fold(T::infinity(), |m, b| m.min(b.0));
            convex_on(f, lo, tol)?;
            let a_bounds = spectral_bounds(&combined, tol)?;
            if let Some(i) = first_overlap(a_bounds, &bounds, tol) {
                return Err(Error::ConditionViolated(format!(
                    "[m_{i}, M_{i}] = [{:e}, {:e}] meets (m_A, M_A) = ({:e}, {:e})",
                    bounds[i].0, bounds[i].1, a_bounds.0, a_bounds.1
                )));
            }
        }
    }
    let lhs = func_calculus(&combined, f, tol)?;
    let mapped = operators.iter().map(|a| func_calculus(a, f, tol)).collect::<Result<Vec<_>>>()?;
    let rhs = map_sum(maps, &mapped)?;
    operator_gap(&lhs, &rhs, tol)
}

/// A Jensen-Bohr instance outside the operator convex range, with its
/// spectral bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraInstance<T: Real> {
    pub base: JensenInstance<T>,
    /// `(lambda_min, lambda_max)` of each `A_i`.
    pub bounds: Vec<(T, T)>,
    /// Spectral bounds of `A = sum phi_i(A_i)`.
    pub a_bounds: (T, T),
}

impl<T: Real> SpectraInstance<T> {
    pub fn new(base: JensenInstance<T>, tol: &Tolerance<T>) -> Result<Self> {
        base.dims()?;
        let bounds = base.operators.iter().map(|a| spectral_bounds(a, tol)).collect::<Result<Vec<_>>>()?;
        let a_bounds = spectral_bounds(&map_sum(&base.maps, &base.operators)?, tol)?;
        Ok(Self { base, bounds, a_bounds })
    }

    /// Intervals `[S s_i m_i, S s_i M_i]` with `s_i = a_i^{-1/(1-r)}`.
    pub fn scaled_intervals(&self) -> Vec<(T, T)> {
        let w = conjugate_weights(&self.base.a, self.base.r);
        let s = w.iter().fold(T::zero(), |acc, &x| acc + x);
        w.iter().zip(&self.bounds).map(|(&wi, &(m, big_m))| (s / wi * m, s / wi * big_m)).collect()
    }
}

/// Verifies every hypothesis of the spectra-condition inequality.
pub fn spectra_hypotheses<T: Real>(inst: &SpectraInstance<T>, tol: &Tolerance<T>) -> Result<()> {
    let base = &inst.base;
    let r = base.r;
    if !(r < T::zero() || r > T::one()) || !r.is_finite() {
        return Err(Error::BadParam(format!("spectra condition needs r < 0 or r > 1 (r={r})")));
    }
    if base.k_constant.is_some_and(|k| k != T::one()) {
        return Err(Error::BadParam("the spectra-condition inequality is only checked with k = 1".into()));
    }
    validate_weights(&base.a, r)?;
    for (i, &(m, _)) in inst.bounds.iter().enumerate() {
        if m < tol.eps_pos() {
            let msg = format!("operator {i} is not strictly positive (lambda_min = {m:e})");
            return Err(if r < T::zero() { Error::DomainError(msg) } else { Error::ConditionViolated(msg) });
        }
    }
    let cond = base.weight_condition(tol)?;
    if !cond.satisfied {
        return Err(Error::ConditionViolated(format!("weight condition fails (margin {:e})", cond.margin)));
    }
    if r < T::zero() {
        // no zero operator can absorb the slack: f(0) is undefined
        let (n, _) = base.dims()?;
        let w = conjugate_weights(&base.a, r);
        let s = w.iter().fold(T::zero(), |acc, &x| acc + x);
        let ids = vec![Matrix::identity(n); w.len()];
        let h = weighted_map_sum(&base.maps, &w, &ids)?;
        let dev = herm_eig(&h.try_sub(&Matrix::identity(h.rows()).scale_real(s))?, tol)?.spectral_norm();
        if dev > tol.threshold(s) {
            return Err(Error::ConditionViolated(format!(
                "r < 0 needs sum w_i phi_i(I) = S I exactly (deviation {dev:e})"
            )));
        }
    }
    let intervals = inst.scaled_intervals();
    if let Some(i) = first_overlap(inst.a_bounds, &intervals, tol) {
        return Err(Error::ConditionViolated(format!(
            "interval {i} [{:e}, {:e}] meets (m_A, M_A) = ({:e}, {:e})",
            intervals[i].0, intervals[i].1, inst.a_bounds.0, inst.a_bounds.1
        )));
    }
    Ok(())
}

/// Jensen-Bohr conclusion for `r < 0` or `r > 1` under the spectra
/// condition.
pub fn check_spectra_jensen<T: Real>(inst: &SpectraInstance<T>, tol: &Tolerance<T>) -> Result<CheckOutcome<T>> {
    spectra_hypotheses(inst, tol)?;
    let (lhs, rhs) = jensen_bohr_sides(&inst.base, T::one(), tol)?;
    operator_gap(&lhs, &rhs, tol)
}

pub const MAX_GENERATION_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct GeneratedSpectra<T: Real> {
    pub instance: SpectraInstance<T>,
    /// Attempts used, including the accepted one.
    pub attempts: usize,
}

/// Rejection-samples an instance satisfying every hypothesis of
/// [`check_spectra_jensen`]. Deterministic in `seed`.
pub fn generate_spectra_instance<T: Real>(
    dim: usize,
    n: usize,
    r: T,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<GeneratedSpectra<T>> {
    if dim == 0 || dim > 16 || n == 0 || n > 6 {
        return Err(Error::BadParam(format!("need 1 <= dim <= 16 and 1 <= n <= 6 (dim={dim}, n={n})")));
    }
    if !(r < T::zero() || r > T::one()) {
        return Err(Error::BadParam(format!("spectra condition needs r < 0 or r > 1 (r={r})")));
    }
    let mut rng = crate::random::rng_from_seed(seed);
    for attempt in 1..=MAX_GENERATION_ATTEMPTS {
        let base = spectra_candidate(&mut rng, dim, n, r);
        let Ok(inst) = SpectraInstance::new(base, tol) else { continue };
        if spectra_hypotheses(&inst, tol).is_ok() {
            return Ok(GeneratedSpectra { instance: inst, attempts: attempt });
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_GENERATION_ATTEMPTS })
}

/// Spectra of `B_i` alternate between the bands `[0.5, 1]` and `[4, 5]`;
/// the maps `psi_i = (w_i / S) phi_i` are unital congruences by scaled
/// unitaries and `A_i = B_i / (S s_i)`, so `sum phi_i(A_i) = sum psi_i(B_i)`.
fn spectra_candidate<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize, r: T) -> JensenInstance<T> {
    let a: Vec<T> = (0..n).map(|_| log_uniform(rng, 0.5, 2.0)).collect();
    let w = conjugate_weights(&a, r);
    let s = w.iter().fold(T::zero(), |acc, &x| acc + x);
    let c: Vec<T> = sample_simplex(rng, n);
    let mut maps = Vec::with_capacity(n);
    let mut operators = Vec::with_capacity(n);
    for i in 0..n {
        let u: Matrix<T> = sample_isometry(rng, dim, dim);
        maps.push(PositiveLinearMap::Congruence { x: u.scale_real((s * c[i] / w[i]).sqrt()) });
        let (lo, hi) = if i % 2 == 0 { (0.5, 1.0) } else { (4.0, 5.0) };
        let b = if n == 1 {
            Matrix::identity(dim).scale_real(uniform(rng, lo, hi))
        } else {
            let spectrum: Vec<T> = (0..dim).map(|_| uniform(rng, lo, hi)).collect();
            with_spectrum(rng, &spectrum)
        };
        // S s_i = S / w_i
        operators.push(b.scale_real(w[i] / s));
    }
    JensenInstance { maps, a, r, operators, k_constant: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MapFamily {
    Congruence,
    VectorState,
    Scale,
    Pinch,
}

/// Random instance satisfying the weight condition with constant `k`
/// (default 1), with operators PSD and exponent `r`.
pub fn generate_jensen_instance<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
    r: T,
    k: Option<T>,
) -> Result<JensenInstance<T>> {
    if dim == 0 || n == 0 {
        return Err(Error::BadParam("need dim >= 1 and n >= 1".into()));
    }
    let kk = validated_k(k)?;
    let a: Vec<T> = (0..n).map(|_| log_uniform(rng, 0.5, 2.0)).collect();
    validate_weights(&a, r)?;
    let families: &[MapFamily] = if kk >= T::one() {
        &[MapFamily::Congruence, MapFamily::VectorState, MapFamily::Scale, MapFamily::Pinch]
    } else {
        &[MapFamily::Congruence, MapFamily::VectorState, MapFamily::Scale]
    };
    let family = families[rng.random_range(0..families.len())];
    let out_dim = rng.random_range(1..=dim);
    let mut maps: Vec<PositiveLinearMap<T>> = (0..n)
        .map(|_| match family {
            MapFamily::Congruence => PositiveLinearMap::Congruence { x: sample_general(rng, dim, out_dim, T::one()) },
            MapFamily::VectorState => PositiveLinearMap::VectorState {
                x: (0..dim).map(|_| crate::random::sample_complex(rng, T::one())).collect(),
            },
            MapFamily::Scale => PositiveLinearMap::Scale { w: uniform(rng, 0.05, 1.0) },
            MapFamily::Pinch => {
                let mut idx: Vec<usize> = (0..dim).filter(|_| rng.random_bool(0.5)).collect();
                if idx.is_empty() {
                    idx.push(rng.random_range(0..dim));
                }
                PositiveLinearMap::Pinch { dim, indices: idx }
            }
        })
        .collect();
    if family != MapFamily::Pinch {
        let w = conjugate_weights(&a, r);
        let s = w.iter().fold(T::zero(), |acc, &x| acc + x);
        let ids = vec![Matrix::identity(dim); n];
        let h = weighted_map_sum(&maps, &w, &ids)?;
        let top = herm_eig(&h, &Tolerance::default())?.max();
        let c = uniform::<T, R>(rng, 0.5, 1.0) * kk * s / top;
        if !c.is_finite() || !(c > T::zero()) {
            return Err(Error::BadParam(format!("cannot normalize the weight condition (r={r})")));
        }
        maps = maps.iter().map(|m| m.scaled(c)).collect::<Result<_>>()?;
    }
    let operators = (0..n)
        .map(|_| {
            let scale = uniform(rng, 0.5, 3.0);
            sample_psd(rng, dim, scale)
        })
        .collect();
    Ok(JensenInstance { maps, a, r, operators, k_constant: k })
}

/// A unital family of `n` maps on `dim x dim` matrices: scaled unitary
/// congruences, convex combinations of scalings, or a pinch partition.
pub fn generate_unital_family<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
) -> Vec<PositiveLinearMap<T>> {
    match rng.random_range(0..3) {
        0 => {
            // K_i blocks of an isometry: sum K_i* K_i = I
            let v: Matrix<T> = sample_isometry(rng, n * dim, dim);
            (0..n)
                .map(|i| PositiveLinearMap::Congruence { x: Matrix::from_fn(dim, dim, |r, c| v[(i * dim + r, c)]) })
                .collect()
        }
        1 => sample_simplex(rng, n).into_iter().map(|w| PositiveLinearMap::Scale { w }).collect(),
        _ => {
            let mut blocks = vec![Vec::new(); n];
            for j in 0..dim {
                blocks[rng.random_range(0..n)].push(j);
            }
            blocks.into_iter().map(|indices| PositiveLinearMap::Pinch { dim, indices }).collect()
        }
    }
}
