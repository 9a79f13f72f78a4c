use thiserror::Error;

/// Errors produced by the modem pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty message")]
    EmptyMessage,

    #[error("invalid bit character {0:?}; expected '0' or '1'")]
    InvalidBit(char),

    #[error("invalid hex string: {0}")]
    InvalidHex(String),

    #[error("illegal {field} value {value} for the active encoding profile")]
    IllegalParameter { field: &'static str, value: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trace has {len} samples; at least {needed} are required")]
    TooShort { len: usize, needed: usize },

    #[error("no vibration symbols found in trace")]
    NoSymbolsFound,

    #[error("pilot sequence not found at end of symbol stream")]
    PilotNotFound,

    #[error("sequences are not aligned: {sent} sent vs {received} received")]
    Unaligned { sent: usize, received: usize },

    #[error("sampling rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(f64, f64),

    #[error("resampling from {from} Hz to {to} Hz would upsample")]
    UpsampleUnsupported { from: f64, to: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
