use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit label `{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
    #[error("register mismatch: {0}")]
    RegisterMismatch(String),
    #[error("projection has zero probability")]
    ZeroProbability,
    #[error("unknown optical path `{0}`")]
    UnknownPath(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("encoding violated: {0}")]
    Encoding(String),
    #[error("missing table entry: {0}")]
    MissingEntry(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("no accepted events")]
    ZeroAcceptance,
    #[error("parse error: {0}")]
    Parse(String),
}
