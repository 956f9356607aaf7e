use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate rule for entity `{label}`")]
    DuplicateTarget { label: String, line: usize },
    #[error("line {line}: entity `{label}` depends on itself")]
    SelfDependent { label: String, line: usize },
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("solver requires a {required} system, found {found}")]
    WrongClass {
        required: &'static str,
        found: &'static str,
    },
    #[error("search space of {subsets} candidate subsets exceeds cap {cap}")]
    InstanceTooLarge { subsets: u128, cap: u64 },
    #[error("asset set is insufficient: {0}")]
    InsufficientAssets(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("benchmark bound violated: {0}")]
    BoundViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
