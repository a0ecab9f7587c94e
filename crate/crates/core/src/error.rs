use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid resolution: {0}")]
    GridResolution(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coverage: {0}")]
    Coverage(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("line {line}: ordinate {value} is not strictly greater than the previous one")]
    NonAscending { line: usize, value: f64 },

    #[error("line {line}: duplicate ordinate {value}")]
    Duplicate { line: usize, value: f64 },

    #[error("zero table is empty")]
    EmptyTable,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("numerical consistency: {0}")]
    NumericalConsistency(String),

    #[error("calibration failed after {} attempt(s): {}", attempts.len(), summarize(attempts))]
    CalibrationFailure { attempts: Vec<CalibrationAttempt> },

    #[error("config `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io: {0}")]
    Io(String),
}

/// One rung of the calibration ladder, kept for error reporting.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CalibrationAttempt {
    pub xi0: f64,
    pub slope: f64,
    pub root: Option<f64>,
    pub fhat_min: Option<f64>,
    pub outcome: String,
}

fn summarize(attempts: &[CalibrationAttempt]) -> String {
    attempts
        .iter()
        .map(|a| format!("xi0={:.4e}: {}", a.xi0, a.outcome))
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
