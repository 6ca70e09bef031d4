use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cannot compose: {0}")]
    Compose(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("order exhausted: {0}")]
    Order(String),
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, ExactError>;
