//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by graph construction, cut evaluation, the SDP solver
/// and the certificate machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vertex {vertex} has zero degree")]
    DegenerateDegree { vertex: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("brute-force oracle limited to {limit} vertices, got {n}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("certificate interval ({lower}, {upper}) is empty")]
    CertificateIntervalEmpty { lower: f64, upper: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
