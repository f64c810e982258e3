use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CpmError {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a closed degree-0 chain map: {0}")]
    NotClosed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("comparison not invertible in homotopy category: {0}")]
    NotQuasiIso(String),
    #[error("pattern mismatch: {0}")]
    Pattern(String),
}

pub type Result<T> = std::result::Result<T, CpmError>;
