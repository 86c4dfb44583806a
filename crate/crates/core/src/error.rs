use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("integer overflow in checked 64-bit arithmetic")]
    Overflow,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("inapplicable: {0}")]
    Inapplicable(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
