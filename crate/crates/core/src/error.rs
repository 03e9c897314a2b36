use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |A - A†| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (max |U U† - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("expansion coefficients are off the unit sphere (|mu|² = {norm_sq})")]
    OffSphere { norm_sq: f64 },

    #[error("angle {index} = {value} outside its range {range}")]
    AngleRange { index: usize, value: f64, range: &'static str },

    #[error("family {family}: parameter {value} outside the admissible interval {interval}")]
    ParameterOutOfRange { family: String, value: f64, interval: String },

    #[error("unknown kernel family `{0}`")]
    UnknownFamily(String),

    #[error("master equations violated: tr Δ - 1 = {trace_residual:e}, tr Δ² - N = {trace_sq_residual:e}")]
    MasterEquations { trace_residual: f64, trace_sq_residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("stratum inconsistency: eigenvalue pattern `{pattern}` implies orbit dimension {expected}, Gram rank is {rank}")]
    StratumInconsistent { pattern: String, expected: usize, rank: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
