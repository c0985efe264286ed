use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("self-message has no relationship graph (node '{0}')")]
    SelfMessage(String),

    #[error("no direct edge {from}→{to}")]
    MissingEdge { from: String, to: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("SMOTE requires ≥2 minority instances (found {0})")]
    SmoteMinority(usize),

    #[error(
        "fold_count {folds} exceeds minority class count {minority}; use a smaller fold_count"
    )]
    TooManyFolds { folds: usize, minority: usize },

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate sensitive attribute; audit impossible")]
    DegenerateAttribute,

    #[error("group '{group}' has no {cell} instances")]
    EmptyCell {
        group: &'static str,
        cell: &'static str,
    },

    #[error("AUC requires at least one positive and one negative label")]
    SingleClass,

    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),

    #[error("{0}")]
    Mismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("message '{id}': {message}")]
    InvalidRecord { id: String, message: String },

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error("synthetic calibration infeasible: {0}")]
    Calibration(String),

    #[error("experiment aborted: {failed} of {total} trials failed")]
    Aborted { failed: usize, total: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

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
}
