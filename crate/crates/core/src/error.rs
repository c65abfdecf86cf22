use thiserror::Error;

/// Errors raised by the matrix kernel and every evaluator built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {threshold:e})")]
    NotHermitian { asymmetry: f64, threshold: f64 },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e} exceeds {threshold:e})")]
    NotSymmetric { asymmetry: f64, threshold: f64 },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("hypothesis violated: {0}")]
    ConditionViolated(String),
    #[error("maps are not unital: {0}")]
    NotUnital(String),
    #[error("instance generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("unknown check: {0}")]
    UnknownCheck(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
