//! Tokenization and TF-IDF feature extraction.

mod sparse;
mod tfidf;
mod tokenize;

pub use sparse::{FeatureVector, SparseVector};
pub use tfidf::{fit, transform, FeatureError, TfIdfModel};
pub use tokenize::{tokenize, TokenList, Tokenizer};
