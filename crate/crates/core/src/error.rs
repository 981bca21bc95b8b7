use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("eigen-solver did not converge: {0}")]
    NonConvergence(String),

    #[error("parameter `{axis}` = {value} outside domain [{lower}, {upper}]")]
    Domain {
        axis: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("model does not provide a generator set")]
    MissingGenerators,

    #[error("incompatible support: {0}")]
    IncompatibleSupport(String),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("degenerate gaps: {0}")]
    DegenerateGaps(String),

    #[error("integration step too large: {0}")]
    StepTooLarge(String),

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("inconsistent reconstruction: {0}")]
    InconsistentReconstruction(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by caller input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::DimensionMismatch(_)
                | Error::MissingGenerators
                | Error::IndexOutOfRange { .. }
                | Error::DegenerateGaps(_)
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
