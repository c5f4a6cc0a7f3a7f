use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("feature count mismatch: model expects {expected}, data has {actual}")]
    FeatureMismatch { expected: usize, actual: usize },

    #[error("invalid cost matrix ({c0}, {c1}): {reason}")]
    InvalidCostMatrix { c0: f64, c1: f64, reason: &'static str },

    #[error("empty cost matrix set")]
    EmptyCostSet,

    #[error("invalid operating point ({p10}, {p01})")]
    InvalidOperatingPoint { p10: f64, p01: f64 },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid front: {0}")]
    InvalidFront(String),

    #[error("not in lemma configuration: {0}")]
    NotInLemmaConfiguration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejection budget exhausted after {attempts} attempts sampling {k} non-dominated cost matrices")]
    RejectionBudgetExhausted { k: usize, attempts: usize },

    #[error("{path}: row {row}, column '{column}': {reason}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        reason: String,
    },

    #[error("unsupported format version {found} in {what} (expected {expected})")]
    FormatVersion {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("benchmark failed at repeat {repeat}, fold {fold}: {source}")]
    Fold {
        repeat: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
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
