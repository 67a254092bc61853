use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("{value} is not admissible (adjacent 1-bits in binary)")]
    NotAdmissible { value: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition would exceed the size cap of {cap} intervals")]
    PartitionTooLarge { cap: usize },

    #[error("empty point sample")]
    EmptySample,

    #[error("unknown sequence id `{id}` (known: {known})")]
    UnknownSequence { id: String, known: String },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("degenerate polygon (area {area:e})")]
    DegeneratePolygon { area: f64 },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("incompatible grids: {0}")]
    GridMismatch(String),

    #[error("shape does not fit the grid: {0}")]
    ShapeExceedsGrid(String),

    #[error("mass drift {drift:.3e} before renormalization exceeds {limit}")]
    MassDrift { drift: f64, limit: f64 },

    #[error("unknown seed `{name}` (builtins: {known})")]
    UnknownSeed { name: String, known: String },

    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
