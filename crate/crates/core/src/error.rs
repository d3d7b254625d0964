use thiserror::Error;

pub type Result<T> = std::result::Result<T, MlsvmError>;

#[derive(Debug, Error)]
pub enum MlsvmError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("structural error at line {line}: {message}")]
    Structural { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("data must contain exactly two classes, found {0}")]
    ClassCount(usize),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("empty data set")]
    EmptyData,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid hierarchy level {level} (hierarchy has {levels} levels)")]
    InvalidLevel { level: usize, levels: usize },

    #[error("node id {id} out of range for level with {nodes} nodes")]
    InvalidNode { id: usize, nodes: usize },

    #[error("clustering is not compact: {0}")]
    NonCompactClustering(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for MlsvmError {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
        MlsvmError::Parse {
            line,
            message: err.to_string(),
        }
    }
}
