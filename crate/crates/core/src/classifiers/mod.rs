//! Weighted binary logistic regression and multinomial naive Bayes over
//! sparse inputs, both written from scratch.

mod logistic;
mod naive_bayes;

use thiserror::Error;

pub use logistic::{
    logistic_loss_grad, predict, predict_proba, sigmoid, train_logistic, LogisticModel,
    LogisticTrainConfig, LossGrad, TrainingExample,
};
pub use naive_bayes::{nb_predict, train_nb, NaiveBayesModel, NbPrediction};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate labels: training needs at least one positive and one negative example")]
    DegenerateLabels,
    #[error("non-finite feature value in example {0}")]
    NonFiniteFeature(usize),
    #[error("example weight must be finite and positive, got {weight} at example {index}")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("naive Bayes needs at least two classes, found {0}")]
    TooFewClasses(usize),
    #[error("smoothing alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("count vectors must be non-negative and finite")]
    InvalidCount,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
}
