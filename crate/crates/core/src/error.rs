use thiserror::Error;

/// Errors raised by grid construction, model setup and integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unstable discretisation: dt = {dt} must be strictly smaller than dx = {dx}")]
    Unstable { dx: f64, dt: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("non-finite field value at vertex {vertex} after step {step} (t = {t})")]
    BlowUp { step: u64, t: f64, vertex: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("output error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> SimError {
    SimError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
