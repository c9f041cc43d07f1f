use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("undefined measure: {0}")]
    UndefinedMeasure(String),

    #[error("incompatible metric: {0}")]
    IncompatibleMetric(String),

    #[error("incomplete design: {0}")]
    IncompleteDesign(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("import error: {0}")]
    Import(String),

    #[error("task failed at split {split}, set '{set}', method '{method}', fold {fold}: {source}")]
    Task {
        split: usize,
        set: String,
        method: String,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short name of the failing module, used for structured CLI diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Schema(_) | Error::Parse { .. } | Error::Validation(_) => "dataio",
            Error::Argument(_) | Error::Numeric(_) => "args",
            Error::UndefinedMeasure(_) | Error::IncompatibleMetric(_) => "measures",
            Error::IncompleteDesign(_) | Error::DegenerateVariance(_) => "inference",
            Error::Import(_) | Error::Task { .. } => "orchestrator",
            Error::Io { .. } | Error::Csv(_) | Error::Json(_) => "io",
        }
    }
}
