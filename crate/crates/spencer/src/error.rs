use exact_core::ExactError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("order budget exhausted: {0}")]
    Order(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("point mismatch: {0}")]
    Compose(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("k-jet part is not the identity: {0}")]
    NotPartial(String),
}

pub type Result<T> = std::result::Result<T, Error>;
