//! Crate-wide error type.

use crate::data::ClassLabel;

/// Errors produced by any flowforest operation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dataset has {labels} labels for {rows} rows")]
    LabelLengthMismatch { rows: usize, labels: usize },

    #[error("row {row} has {got} values, expected {expected}")]
    RowWidthMismatch {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("row {row}, column {column} is not finite")]
    NonFiniteValue { row: usize, column: usize },

    #[error("duplicate feature name {name:?}")]
    DuplicateFeatureName { name: String },

    #[error("test fraction must lie in (0, 1), got {0}")]
    InvalidTestFraction(f64),

    #[error("class {label:?} has {count} rows; at least {required} required")]
    ClassTooSmall {
        label: ClassLabel,
        count: usize,
        required: usize,
    },

    #[error("line {line}: data encountered before a #fields header")]
    MissingFieldsHeader { line: usize },

    #[error("#fields header is missing required column {column:?}")]
    MissingColumn { column: String },

    #[error("record {row}: field {field:?} is missing; impute before encoding")]
    MissingField { row: usize, field: &'static str },

    #[error("record {row}: invalid IP address {value:?}")]
    InvalidIpAddress { row: usize, value: String },

    #[error("record {row}: timestamp {value} is out of range")]
    InvalidTimestamp { row: usize, value: f64 },

    #[error("scaler fitted for {expected} columns, dataset has {got}")]
    ScalerWidthMismatch { expected: usize, got: usize },

    #[error("resample target for class {label:?} is {target}, below current count {current}")]
    TargetBelowCurrent {
        label: ClassLabel,
        target: usize,
        current: usize,
    },

    #[error("class {label:?} has a single row; no neighbor exists for interpolation")]
    NoInterpolationNeighbor { label: ClassLabel },

    #[error("neighbor filter needs more than k={k} rows, dataset has {rows}")]
    TooFewRowsForFilter { k: usize, rows: usize },

    #[error("{what} must be {requirement}, got {got}")]
    InvalidParameter {
        what: &'static str,
        requirement: &'static str,
        got: String,
    },

    #[error("cannot fit on an empty dataset")]
    EmptyDataset,

    #[error("window {window} exceeds feature count {features}")]
    WindowTooWide { window: usize, features: usize },

    #[error("input row has {got} features, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("validation split contains a single class; accuracy is degenerate")]
    DegenerateValidation,

    #[error("labels and predictions differ in length: {labels} vs {predictions}")]
    PredictionLengthMismatch { labels: usize, predictions: usize },

    #[error("confusion matrix is empty")]
    EmptyConfusionMatrix,

    #[error("ROC AUC requires both classes among the labels")]
    SingleClassAuc,

    #[error("importance for feature {name:?} is not finite")]
    NonFiniteImportance { name: String },

    #[error("rank fusion needs at least two rankings, got {0}")]
    TooFewRankings(usize),

    #[error("rank fusion universe is empty")]
    EmptyUniverse,

    #[error("k={k} out of range 1..={max}")]
    TopKOutOfRange { k: usize, max: usize },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("archive format version {got} is not supported (expected {expected})")]
    UnsupportedArchiveVersion { got: u64, expected: u64 },

    #[error("archive is corrupted: {0}")]
    CorruptArchive(String),

    #[error("config: {0}")]
    Config(String),

    #[error("importance file {path}, line {line}: {reason}")]
    ImportanceFile {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Error {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
