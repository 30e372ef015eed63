//! Topic classification of curated post streams via distant supervision.
//!
//! Accounts whose editors only ever post about one topic ("focused" streams)
//! supply free training labels. Those labels train per-topic logistic
//! regression classifiers (and a multinomial naive Bayes multi-class model)
//! over TF-IDF features, which are then applied to posts from streams that
//! mix topics. The [`harness`] module runs the chronological window
//! experiments that measure how much data, how recent data, and recency
//! weighting affect effectiveness under topic drift.
//!
//! Modules, bottom up:
//!
//! * [`corpus`]: posts, the account registry, JSON-lines ingestion and a
//!   seeded synthetic generator with controllable drift.
//! * [`supervision`]: positives from focused streams, capped negatives,
//!   multi-class datasets and gold-standard judgments.
//! * [`features`]: tweet tokenizer and TF-IDF vectorizer.
//! * [`classifiers`]: weighted logistic regression and multinomial NB.
//! * [`harness`]: splits, recency weights, metrics, experiments, CSV export.

pub mod classifiers;
pub mod corpus;
pub mod features;
pub mod harness;
pub mod supervision;

mod float_format;

pub use classifiers::{
    logistic_loss_grad, nb_predict, predict, predict_proba, train_logistic, train_nb,
    ClassifierError, LogisticModel, LogisticTrainConfig, NaiveBayesModel, TrainingExample,
};
pub use corpus::{
    build_corpus, corpus_stats, generate_synthetic, load_accounts, load_tweets, write_tweets,
    Account, AccountRegistry, Corpus, CorpusError, CorpusStats, StreamType, SynthConfig,
    SyntheticCorpus, TopicLabel, TopicSet, Tweet,
};
pub use features::{fit, tokenize, transform, FeatureVector, SparseVector, TfIdfModel, TokenList};
pub use harness::{
    chronological_split, evaluate_binary, recency_weights, EvalTarget, ExperimentConfig,
    HarnessError, Metrics, ResultRow,
};
pub use supervision::{
    assign_positive_labels, build_binary_dataset, build_multiclass_dataset, load_gold,
    sample_negatives, GoldExample, LabeledDataset, LabeledExample, NegativeSamplingConfig,
    PoolPolicy, SupervisionError, Target,
};
