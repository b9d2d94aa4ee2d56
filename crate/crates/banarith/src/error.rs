use num_bigint::BigInt;
use thiserror::Error;

/// Library-wide error type. `Domain`/`Validation`/`Parse`/`Unsupported`
/// map to CLI exit code 2, everything else to 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not in ideal (x - p): evaluation remainder {remainder}")]
    NotInIdeal { remainder: BigInt },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 1,
            _ => 2,
        }
    }

    /// Stable machine-readable kind tag for error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Validation(_) => "validation",
            Error::Parse(_) => "parse",
            Error::Unsupported(_) => "unsupported",
            Error::NotInIdeal { .. } => "not-in-ideal",
            Error::Internal(_) => "internal",
        }
    }
}
