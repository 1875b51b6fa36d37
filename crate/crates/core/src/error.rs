use std::path::PathBuf;

/// Errors raised while ingesting inputs or combining pipeline stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    Empty,

    #[error("non-finite value {value} at {location}")]
    NonFinite { value: f64, location: String },

    #[error("array is not rectangular: {0}")]
    Ragged(String),

    #[error("unsupported shape {shape:?} for {what}")]
    Shape { shape: Vec<usize>, what: &'static str },

    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    EndpointOutOfRange(usize, usize, usize),

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),

    #[error("no obstacle cells")]
    NoObstacles,

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("channel encoding requires grid domain")]
    NotGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported array dtype {0}")]
    DType(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse { path: path.into(), message: message.to_string() }
    }
}
