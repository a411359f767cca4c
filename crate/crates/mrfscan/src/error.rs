//! Crate-wide error type.
//!
//! Variants are grouped by what went wrong rather than where: configuration
//! errors (caller passed parameters outside an operation's domain), data
//! errors (files or values that do not parse or validate), and numerical
//! failures (non-finite intermediates). The CLI maps these groups onto its
//! exit codes.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain of the requested operation
    /// (bad dimension, empty range, zero-edge density, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input data failed to parse or validate (malformed CSV/JSON, symbol
    /// out of alphabet, missing party label, empty reference group, ...).
    #[error("invalid data: {0}")]
    Data(String),

    /// A computation produced a non-finite value or otherwise failed
    /// numerically (overflowing logits, zero kernel mass, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV-level parse failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand constructor for [`Error::Config`].
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Shorthand constructor for [`Error::Data`].
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Shorthand constructor for [`Error::Numerical`].
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
