use thiserror::Error;

use crate::Bipartition;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: local dimension must be at least 2")]
    InvalidDimension(usize),

    #[error("operation requires local dimension {expected}, got {got}")]
    UnsupportedDimension { expected: &'static str, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("iterative solver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("invalid Schmidt spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("not a density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("criterion precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("degenerate coefficients: mu = 0")]
    DegenerateCoefficients,

    #[error("criterion never fires on [0, 1] for this family")]
    NoCrossing,

    #[error("bipartition {0} is not valid here")]
    InvalidBipartition(Bipartition),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
