use std::path::PathBuf;

use thiserror::Error;

use crate::feature::Feature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("unknown feature name `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` is missing")]
    MissingFeature(Feature),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("text contains no word tokens")]
    EmptyText,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least 2 vectors to fit statistics, got {0}")]
    TooFewVectors(usize),
    #[error("feature `{0}` is constant across the corpus")]
    DegenerateFeature(Feature),
    #[error("statistics file lists {0} features, expected 14 in id order")]
    MalformedStats(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("reference vector is invalid: {0:?}")]
    InvalidReference(Vec<&'static str>),
    #[error("no valid control vector after {0} attempts")]
    Exhausted(usize),
    #[error("subset size {0} outside 1..=14")]
    SubsetSize(usize),
    #[error("sigma must be finite and non-negative, got {0}")]
    NegativeSigma(f64),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record {record} is missing field `{field}`")]
    MissingField { record: usize, field: &'static str },
    #[error("requested {requested} examples but only {available} are available")]
    InsufficientData { requested: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("request timed out")]
    Timeout,
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited")]
    RateLimited,
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("server error (HTTP {0})")]
    Server(u16),
    #[error("request rejected (HTTP {status}): {body}")]
    Rejected { status: u16, body: String },
    #[error("connection failed: {0}")]
    Connection(String),
    #[error("cannot construct text: {0}")]
    Unconstructible(String),
    #[error("invalid endpoint configuration: {0}")]
    Config(String),
}

impl ClientError {
    /// Whether a retry has a chance of succeeding.
    pub fn is_transient(&self) -> bool {
        matches!(
            self,
            ClientError::Timeout
                | ClientError::RateLimited
                | ClientError::Server(_)
                | ClientError::Connection(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("feature `{0}` has a degenerate normalization scale (min == p95)")]
    DegenerateScale(Feature),
    #[error("no errors recorded for feature `{feature}` and baseline `{baseline}`")]
    EmptyRow { feature: Feature, baseline: String },
    #[error("ledger is incomplete; {} (task, k) pairs missing", .0.len())]
    IncompleteLedger(Vec<(String, usize)>),
    #[error("feature extraction failed for task {task} k={k}: {source}")]
    ExtractionFailed {
        task: String,
        k: usize,
        #[source]
        source: ExtractError,
    },
    #[error("unknown task id `{0}` in responses")]
    UnknownTask(String),
    #[error("response extraction failed: {0}")]
    Extraction(#[from] ExtractError),
    #[error("run `{run}` mixes sweep points: {detail}")]
    MixedSweepPoint { run: String, detail: String },
}
