use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient domain error: {0}")]
    Domain(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("degree window exhausted at degree {degree}: {detail}")]
    Window { degree: i32, detail: String },
    #[error("not finitely representable: {0}")]
    Unrepresentable(String),
    #[error("compactness certificate required: {0}")]
    CertificateRequired(String),
    #[error("malformed hint: {0}")]
    Hint(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
