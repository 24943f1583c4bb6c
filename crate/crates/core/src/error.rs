use std::io;

use thiserror::Error;

use crate::backends::BackendId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("undefined on empty input")]
    EmptyInput,

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("value {value} does not fit in {bits} bits")]
    OutOfRange { value: i64, bits: u32 },

    #[error("corrupt delta stream")]
    CorruptDelta,

    #[error("malformed run token at position {0}")]
    MalformedRun(usize),

    #[error("value not in QuaRs map: {0}")]
    NotInQuarsMap(i64),

    #[error("invalid chain order: {0}")]
    InvalidChain(String),

    #[error("truncated stream")]
    TruncatedStream,

    #[error("corrupt block header")]
    CorruptBlockHeader,

    #[error("invalid code table: {0}")]
    InvalidCodeTable(String),

    #[error("corrupt model: {0}")]
    CorruptModel(String),

    #[error("alphabet too large: {cardinality} symbols (limit {limit})")]
    AlphabetTooLarge { cardinality: usize, limit: usize },

    #[error("invalid back-reference at output offset {0}")]
    InvalidBackReference(usize),

    #[error("unregistered backend: {0}")]
    UnregisteredBackend(String),

    #[error("backend unavailable: {0}")]
    BackendUnavailable(BackendId),

    #[error("{backend} failed: {message}")]
    Backend { backend: BackendId, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite values at rows {0:?}")]
    NonFinite(Vec<usize>),

    #[error("csv error at row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("unsupported container: {0}")]
    UnsupportedContainer(String),

    #[error("round-trip mismatch in channel {channel} at sample {index}")]
    RoundTripMismatch { channel: usize, index: usize },

    #[error("empty axis: {0}")]
    EmptyAxis(&'static str),

    #[error("unknown format: {0}")]
    UnknownFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn backend(backend: BackendId, err: impl std::fmt::Display) -> Self {
        Error::Backend {
            backend,
            message: err.to_string(),
        }
    }
}
