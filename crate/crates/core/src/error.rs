//! Error type shared across the pipeline.

use crate::dataset::{Period, ValidationReport};

/// Everything that can go wrong between reading a file and emitting a report.
///
/// Variants fall into two rough buckets: input problems detected while
/// loading or validating a dataset, and computation problems detected while
/// evaluating sub-indices and composites. The CLI maps the buckets to
/// distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("duplicate observation for ({region}, {indicator}, {period}): rows {first_row} and {second_row}")]
    DuplicateKey {
        region: String,
        indicator: String,
        period: Period,
        first_row: usize,
        second_row: usize,
    },

    #[error("row {row}: unknown indicator id '{indicator}'")]
    UnknownIndicator { row: usize, indicator: String },

    #[error("row {row}: non-finite value for ({region}, {indicator}, {period})")]
    NonFiniteValue {
        row: usize,
        region: String,
        indicator: String,
        period: Period,
    },

    #[error("dataset failed validation with {} error(s)", report.errors.len())]
    ValidationFailed { report: ValidationReport },

    #[error("division by zero in {context}")]
    DivisionByZero { context: String },

    #[error("non-finite input in {context}")]
    Domain { context: String },

    #[error("missing observation ({region}, {indicator}, {period})")]
    MissingObservation {
        region: String,
        indicator: String,
        period: Period,
    },

    #[error("non-positive value {value} for '{id}' cannot enter geometric aggregation")]
    NonPositiveValue { id: String, value: f64 },

    #[error("expected {expected} sub-index values, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("mixed keys: {detail}")]
    MixedKey { detail: String },

    #[error("empty region group")]
    EmptyGroup,

    #[error("missing weight for region '{region}'")]
    MissingWeight { region: String },

    #[error("insufficient data: need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("zero variance in {axis} values")]
    ZeroVariance { axis: String },

    #[error("missing feature '{field}' in typology profile for '{region}'")]
    MissingFeature { region: String, field: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors raised by malformed or incomplete input data, as
    /// opposed to errors raised while computing indices.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::DuplicateKey { .. }
                | Error::UnknownIndicator { .. }
                | Error::NonFiniteValue { .. }
                | Error::ValidationFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
