use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("alphabet mismatch: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource guard exceeded: {0}")]
    Guard(String),
    #[error("truncation cap exceeded: {0}")]
    Cap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
