//! Chronological evaluation harness.
//!
//! Splits, recency weights, P/R/F1, the growing- and sliding-window
//! experiments, the weighting-delta experiment and CSV export.

mod config;
mod experiment;
mod export;
mod metrics;
mod split;
mod weights;

use std::path::PathBuf;

use thiserror::Error;

use crate::classifiers::ClassifierError;
use crate::features::FeatureError;
use crate::supervision::SupervisionError;

pub use config::{EvalKind, ExperimentConfig, ExperimentKind};
pub use experiment::{
    run_config, run_growing_window, run_sliding_window, run_weighting_delta,
    train_topic_classifier, trainable_topics, AbsentCell, EvalTarget, ExperimentOutput,
    ExperimentSettings, TopicClassifier, WeightingDelta, WeightingTable, WindowAudit, WindowBounds,
    WindowMode, WindowSpec,
};
pub use export::{
    export_results, parse_results, read_results, write_results, ResultRow, CSV_HEADER,
};
pub use metrics::{evaluate_binary, evaluate_on_gold, Metrics};
pub use split::{chronological_split, SplitSpec, Timestamped};
pub use weights::{recency_weights, RecencyWeightSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("recency weighting needs p >= 1, got {0}")]
    InvalidP(f64),
    #[error("predictions and gold differ in length ({predictions} vs {gold})")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("gold standard is empty")]
    EmptyGold,
    #[error(
        "temporal leakage for topic '{topic}': training data reaches {max_train} but evaluation starts at {min_test}"
    )]
    TemporalLeakage {
        topic: String,
        max_train: i64,
        min_test: i64,
    },
    #[error("no training data: {0}")]
    NoTrainingData(String),
    #[error("nothing to export")]
    EmptyResults,
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Supervision(#[from] SupervisionError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error("results file {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("results file {path}: {reason}")]
    ResultsFormat { path: PathBuf, reason: String },
}
