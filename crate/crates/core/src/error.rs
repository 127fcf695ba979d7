use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    ShapeMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("not a frame: lower bound {lower:e} is not above tol * upper bound {upper:e}")]
    NotAFrame { lower: f64, upper: f64 },

    /// The sufficient condition of an inversion method does not hold. The
    /// operator may still be invertible.
    #[error("{method}: condition violated: {detail}")]
    ConditionViolated {
        method: &'static str,
        detail: String,
    },

    #[error(
        "matrix is numerically singular (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})"
    )]
    Singular { sigma_min: f64, sigma_max: f64 },

    #[error("symbol entry {index} is zero")]
    ZeroSymbol { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("wav error at byte offset {offset}: {msg}")]
    Wav { offset: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::ShapeMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
