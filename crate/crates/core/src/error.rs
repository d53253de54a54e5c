use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are grouped by how a caller should react: bad input, numerical
/// breakdown, exhausted resources, or a broken internal invariant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("ill-conditioned computation: {0}")]
    Conditioning(String),

    #[error("numerical consistency error: {0}")]
    NumericalConsistency(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 1 is reserved for failed invariants, 2 for rejected input and 3 for
    /// resource or conditioning limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::Domain(_)
            | Error::Precondition(_)
            | Error::Unsupported(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::Resource(_) | Error::Conditioning(_) | Error::NumericalConsistency(_) => 3,
            Error::Structural(_) | Error::InternalConsistency(_) | Error::SearchFailure(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
