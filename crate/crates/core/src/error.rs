use crate::model::StructuralFinding;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Fatal parse failures carry the findings that
/// caused them so callers can report what went wrong row by row.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("fatal parse error: {message}")]
    FatalParse {
        message: String,
        findings: Vec<StructuralFinding>,
    },

    #[error("dataset contains date-only timestamps; time-of-day required")]
    MissingTimeOfDay,

    #[error("empty sample: {0}")]
    EmptySample(&'static str),

    #[error("k={k} exceeds app count {app_count}")]
    KTooLarge { k: usize, app_count: usize },

    #[error("seed dataset rejected: {0}")]
    SeedRejected(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("prompt {label} {message}")]
    SeedMismatch { label: String, message: String },

    #[error("no CSV block found in reply")]
    NoCsvFound,

    #[error("endpoint error: {0}")]
    Endpoint(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
