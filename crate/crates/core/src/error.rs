use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix must be square, found {nrows}x{ncols}")]
    NonSquare { nrows: usize, ncols: usize },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    #[error("invalid compressed-row data: {0}")]
    InvalidStructure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hamiltonian is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("matrix is structurally singular: no perfect matching (column {column} unmatched)")]
    StructurallySingular { column: usize },

    #[error("matrix is numerically singular: zero pivot in column {column}")]
    Singular { column: usize },

    #[error("incomplete factorization broke down: zero pivot in column {column} after dropping")]
    PreconditionerBreakdown { column: usize },

    #[error("factorization exceeded the stored-entry limit of {limit}")]
    MemoryLimit { limit: usize },

    #[error("dimension {dim} too large for dense computation (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("steady state is not unique: null space dimension {dim}")]
    DegenerateNullSpace { dim: usize },

    #[error("inner linear solver failed: {0}")]
    InnerSolverFailure(String),

    #[error("inverse-power iteration did not converge within {iterations} outer iterations")]
    OuterIterationLimit { iterations: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
