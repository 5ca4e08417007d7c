use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet error: {0}")]
    Alphabet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("word has no alternation with the singled-out generator")]
    NoAlternation,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
