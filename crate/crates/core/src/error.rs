//! Shared error type for the simulator library.

use thiserror::Error;

/// Errors produced by parsing, simulation, metrics and sweep orchestration.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed container or header data.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A frame payload ended before its declared size.
    #[error("truncated payload in frame {frame_index}")]
    Truncated { frame_index: usize },

    /// Input uses a feature the simulator does not support (bit depth, chroma mode, ...).
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// Shape mismatch: frame dimensions, factor divisibility, sequence lengths.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Value outside the domain an operation is defined on (negative intensity,
    /// wrong domain tag, non-positive threshold, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A serialized event stream failed validation.
    #[error("corrupt stream at byte {offset}: {message}")]
    CorruptStream { offset: usize, message: String },

    /// A distortion metric cannot be evaluated on the given frames.
    #[error("metric error: {0}")]
    Metric(String),

    /// Table emitters require at least one row.
    #[error("empty table")]
    EmptyTable,

    /// Sweep configuration failed validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse { offset, message: message.into() }
    }

    pub(crate) fn corrupt(offset: usize, message: impl Into<String>) -> Self {
        Error::CorruptStream { offset, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
