use thiserror::Error;

/// Errors raised by reach-set queries.
///
/// Every variant maps onto a stable machine-readable `code`, and validation
/// failures additionally name the offending input `field`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReachError {
    #[error("invalid relative degrees: {0}")]
    InvalidDegrees(String),

    #[error("invalid value for `{field}`: {detail}")]
    Validation { field: String, detail: String },

    #[error("`{what}` = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unsupported request: {0}")]
    Capability(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite numeric input: {0}")]
    Numeric(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input channel: {0}")]
    Degenerate(String),
}

impl ReachError {
    pub fn validation(field: impl Into<String>, detail: impl Into<String>) -> Self {
        ReachError::Validation {
            field: field.into(),
            detail: detail.into(),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ReachError::InvalidDegrees(_) => "invalid_degrees",
            ReachError::Validation { .. } => "validation",
            ReachError::OutOfRange { .. } => "out_of_range",
            ReachError::Capability(_) => "capability",
            ReachError::Shape(_) => "shape",
            ReachError::Numeric(_) => "numeric",
            ReachError::InvalidInput(_) => "invalid_input",
            ReachError::Degenerate(_) => "degenerate",
        }
    }

    /// Name of the offending input field, when one can be attributed.
    pub fn field(&self) -> Option<&str> {
        match self {
            ReachError::Validation { field, .. } => Some(field),
            ReachError::InvalidDegrees(_) => Some("r"),
            ReachError::OutOfRange { what, .. } => Some(what),
            _ => None,
        }
    }

    pub fn is_capability(&self) -> bool {
        matches!(self, ReachError::Capability(_))
    }
}

pub type Result<T, E = ReachError> = std::result::Result<T, E>;
