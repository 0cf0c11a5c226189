use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter `{field}`: {message}")]
    Parameter { field: &'static str, message: String },

    /// A grid cannot resolve the requested quantity; names the resolution
    /// that would be needed.
    #[error("grid too coarse: {message} (required points: {required_points})")]
    Resolution {
        required_points: usize,
        message: String,
    },

    /// Malformed or empty input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// A numerical routine failed to converge; carries diagnostics.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Evaluation exactly at an integrable singularity.
    #[error("singular point: {0}")]
    Singularity(String),

    /// An operation was called outside its contract.
    #[error("usage error: {0}")]
    Usage(String),

    /// Parameters violate the hypotheses of a named theorem.
    #[error("outside the range of {theorem}: {message}")]
    Range {
        theorem: &'static str,
        message: String,
    },

    /// Non-finite field values during time stepping.
    #[error("blow-up detected on stream {stream_id} at step {step_index}")]
    BlowUp { stream_id: u64, step_index: u64 },

    /// Least-squares fit fed nonpositive or insufficient data.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn parameter(field: &'static str, message: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            message: message.into(),
        }
    }
}
