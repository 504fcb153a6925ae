use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {0} is not a positive even number")]
    OddDimension(usize),
    #[error("restriction to an odd number ({0}) of indices")]
    OddRestriction(usize),
    #[error("Majorana subset of odd size {0} has no Wick expectation")]
    OddSubset(usize),
    #[error("index {index} out of range for dimension {dim} (or indices not strictly increasing)")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("eigensolver failed to converge")]
    ConvergenceFailure,
    #[error("unsupported Schatten exponent p = {0}")]
    UnsupportedP(f64),
    #[error("Ky Fan order {r} exceeds dimension {dim}")]
    RankTooLarge { r: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not antisymmetric (violation {0:e})")]
    NotAntisymmetric(f64),
    #[error("normal eigenvalue {0} exceeds 1: not a valid correlation matrix")]
    NotAValidCorrelationMatrix(f64),
    #[error("product-state parameter {0} outside [-1, 1]")]
    LambdaOutOfRange(f64),
    #[error("matrix is not orthogonal (deviation {0:e})")]
    NotOrthogonal(f64),
    #[error("state is not pure (smallest normal eigenvalue {0})")]
    NotPure(f64),
    #[error("rank exponent {r} outside [0, {max}]")]
    RankExponentOutOfRange { r: usize, max: usize },
    #[error("matrix is not Hermitian (violation {0:e})")]
    NotHermitian(f64),
    #[error("occupation number {0} outside [0, 1]")]
    OccupationOutOfRange(f64),
    #[error("{n} modes exceeds the cap of {max}")]
    TooManyModes { n: usize, max: usize },
    #[error("{r} local modes exceeds the tomography cap of {max}")]
    TooManyLocalModes { r: usize, max: usize },
    #[error("correlation entry has imaginary residue {0:e}")]
    NonNegligibleImaginaryPart(f64),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("shot budget {required} exceeds the cap {cap}")]
    BudgetOverflow { required: u128, cap: u64 },
    #[error("infeasible thresholds: {0}")]
    InfeasibleThresholds(String),
    #[error("robustness promise not certified: value {value} exceeds {limit}")]
    PromiseNotCertified { value: f64, limit: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
