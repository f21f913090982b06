use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("path too short: need at least 2 keypoints, got {got}")]
    PathTooShort { got: usize },

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        /// 1-based data row (the header is not counted).
        row: usize,
        column: String,
        message: String,
    },

    #[error("parameter {value} outside [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("degenerate view: position coincides with aim target")]
    DegenerateView,

    #[error("undefined correlation: column '{column}' has zero variance")]
    UndefinedCorrelation { column: String },

    #[error("degenerate sample: zero variance")]
    DegenerateSample,

    #[error("undefined fit: predictor has zero variance")]
    UndefinedFit,

    #[error("insufficient sample: need at least {needed} rows, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
