//! Error type shared by every module of the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, KrylovError>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum KrylovError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |M_ij - conj(M_ji)| = {max_deviation:e}")]
    NotHermitian { max_deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (valid: 0..={max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("input vectors span no nonzero subspace")]
    EmptySpan,

    #[error("state vector has zero norm")]
    ZeroState,

    #[error("invalid tridiagonal matrix: {0}")]
    InvalidTridiagonal(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("exp(-beta*lambda) would overflow: beta*max|lambda| = {exponent:e} > 700")]
    OverflowGuard { exponent: f64 },

    #[error("z lies within the pole tolerance of atom {atom}")]
    PoleProximity { atom: usize },

    #[error("continued fraction denominator vanished at level {level}")]
    ZeroDenominator { level: usize },

    #[error("target 1/x is singular at atom {atom} (lambda = {lambda:e})")]
    SingularAtom { atom: usize, lambda: f64 },

    #[error("target is singular or undefined on the interval [{lo}, {hi}]")]
    SingularOnInterval { lo: f64, hi: f64 },

    #[error("target function is not finite at lambda = {lambda}")]
    NonFiniteTarget { lambda: f64 },

    #[error("tabulated target cannot be evaluated away from its atoms")]
    UnsupportedTarget,

    #[error("least-squares system is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("no interpolant up to degree {cap} reached the requested accuracy")]
    DegreeCapExceeded { cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl KrylovError {
    /// Variant name, stable across releases; used in report error records.
    pub fn kind(&self) -> &'static str {
        match self {
            KrylovError::NotSquare { .. } => "NotSquare",
            KrylovError::NotHermitian { .. } => "NotHermitian",
            KrylovError::DimensionMismatch { .. } => "DimensionMismatch",
            KrylovError::IndexOutOfRange { .. } => "IndexOutOfRange",
            KrylovError::ConvergenceFailure { .. } => "ConvergenceFailure",
            KrylovError::EmptySpan => "EmptySpan",
            KrylovError::ZeroState => "ZeroState",
            KrylovError::InvalidTridiagonal(_) => "InvalidTridiagonal",
            KrylovError::InvalidMeasure(_) => "InvalidMeasure",
            KrylovError::OverflowGuard { .. } => "OverflowGuard",
            KrylovError::PoleProximity { .. } => "PoleProximity",
            KrylovError::ZeroDenominator { .. } => "ZeroDenominator",
            KrylovError::SingularAtom { .. } => "SingularAtom",
            KrylovError::SingularOnInterval { .. } => "SingularOnInterval",
            KrylovError::NonFiniteTarget { .. } => "NonFiniteTarget",
            KrylovError::UnsupportedTarget => "UnsupportedTarget",
            KrylovError::IllConditioned { .. } => "IllConditioned",
            KrylovError::DegreeCapExceeded { .. } => "DegreeCapExceeded",
            KrylovError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
