use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("precision mismatch: {left} vs {right}")]
    PrecisionMismatch { left: u32, right: u32 },
    #[error("field mismatch")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a unit: {0}")]
    NonUnit(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not weighted homogeneous: {0}")]
    NotGraded(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("theorem check failed: {0}")]
    TheoremViolation(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
