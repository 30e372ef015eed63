use curated_core::classifiers::NaiveBayesModel;
use curated_core::features::{TfIdfModel, Tokenizer};
use curated_core::harness::TopicClassifier;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Lr,
    Nb,
}

/// Multi-class naive Bayes over raw term counts of a fitted vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbBundle {
    pub tokenizer: Tokenizer,
    pub vocabulary: TfIdfModel,
    pub naive_bayes: NaiveBayesModel,
}

/// On-disk model: one logistic classifier per topic, or one NB model.
///
/// Kept as a flat struct rather than a tagged enum so the 17-digit float
/// fields can be read back without intermediate buffering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub model: ModelTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifiers: Option<Vec<TopicClassifier>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nb: Option<NbBundle>,
}
