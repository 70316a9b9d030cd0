use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed netpbm data. `field` names the header token or section at fault.
    #[error("format error in {field}: {message}")]
    Format { field: &'static str, message: String },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("query error: {0}")]
    Query(String),

    #[error("infeasible query: {0}")]
    InfeasibleQuery(String),

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("degenerate heuristic: {0}")]
    DegenerateHeuristic(String),

    #[error("degenerate map: {0}")]
    DegenerateMap(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("augmentation infeasible: {0}")]
    AugmentationInfeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn format(field: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn check_dims(expected: (usize, usize), got: (usize, usize)) -> Result<()> {
        if expected != got {
            return Err(Error::DimensionMismatch {
                expected_w: expected.0,
                expected_h: expected.1,
                got_w: got.0,
                got_h: got.1,
            });
        }
        Ok(())
    }
}
