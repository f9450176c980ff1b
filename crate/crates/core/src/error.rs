use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown message id `{0}`")]
    UnknownMessage(String),

    #[error("world model probabilities sum to {0}, expected 1")]
    Unnormalized(f64),

    #[error("contradictory message `{0}`: logical probability is zero")]
    ContradictoryMessage(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("search space too large: {0}")]
    TooLarge(String),

    #[error(
        "text of {len} bytes does not fit a frame of {capacity_bits} bits (needs {required_bits})"
    )]
    TextTooLong {
        len: usize,
        capacity_bits: usize,
        required_bits: usize,
    },

    #[error("frame capacity mismatch: expected {expected} bits, got {actual}")]
    CapacityMismatch { expected: usize, actual: usize },

    #[error("LDPC construction failed: {0}")]
    CodeConstruction(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("unknown fixture (image hash {0})")]
    UnknownFixture(String),

    #[error("gateway transport error: {0}")]
    Transport(String),

    #[error("gateway protocol error (status {status}): {message}")]
    Protocol { status: u16, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
