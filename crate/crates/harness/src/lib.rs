//! Reproducible verification runs over `calkin-core`.

pub mod config;
pub mod report;
pub mod seqspec;
pub mod suite;

use calkin_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;

impl HarnessError {
    /// 2 for bad input, 3 when a certificate could not be produced or did
    /// not re-verify.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(
                Error::InsufficientPrefix(_) | Error::SpanFailure(_) | Error::ConvergenceFailure,
            )
            | HarnessError::Certificate(_) => EXIT_CERTIFICATE,
            HarnessError::Io(_) | HarnessError::Csv(_) => 1,
            _ => EXIT_MALFORMED,
        }
    }
}
