use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use super::{FeatureVector, SparseVector, TokenList};
use crate::float_format::format17;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot fit a vocabulary: every document is empty")]
    NoTokens,
    #[error("min_df must be at least 1")]
    InvalidMinDf,
    #[error("no token reaches min_df = {0}")]
    EmptyVocabulary(usize),
}

/// Fitted vocabulary with smoothed inverse document frequencies.
///
/// Terms are indexed in lexicographic order and
/// `idf(t) = ln((1 + D) / (1 + df(t))) + 1`, so every idf is at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    terms: Vec<String>,
    idf: Vec<f64>,
    doc_count: usize,
    min_df: usize,
}

pub fn fit(docs: &[TokenList], min_df: usize) -> Result<TfIdfModel, FeatureError> {
    if min_df == 0 {
        return Err(FeatureError::InvalidMinDf);
    }
    if docs.iter().all(|d| d.is_empty()) {
        return Err(FeatureError::NoTokens);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for token in seen {
            *df.entry(token).or_default() += 1;
        }
    }
    let doc_count = docs.len();
    let (terms, idf): (Vec<String>, Vec<f64>) = df
        .into_iter()
        .filter(|&(_, count)| count >= min_df)
        .map(|(token, count)| (token.to_string(), smoothed_idf(doc_count, count)))
        .unzip();
    if terms.is_empty() {
        return Err(FeatureError::EmptyVocabulary(min_df));
    }
    Ok(TfIdfModel {
        terms,
        idf,
        doc_count,
        min_df,
    })
}

fn smoothed_idf(doc_count: usize, df: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// L2-normalized TF-IDF vector; out-of-vocabulary tokens are ignored.
pub fn transform(model: &TfIdfModel, doc: &TokenList) -> FeatureVector {
    let counts = model.counts(doc);
    let raw: Vec<(usize, f64)> = counts.iter().map(|(i, c)| (i, c * model.idf[i])).collect();
    let norm = raw.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    SparseVector::new(model.dim(), raw.into_iter().map(|(i, v)| (i, v / norm)))
}

impl TfIdfModel {
    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    /// Vocabulary in index order.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(token)).ok()
    }

    pub fn transform(&self, doc: &TokenList) -> FeatureVector {
        transform(self, doc)
    }

    /// Raw in-vocabulary term counts of `doc`.
    pub fn counts(&self, doc: &TokenList) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for token in doc {
            if let Some(i) = self.index_of(token) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        SparseVector::new(self.dim(), counts)
    }
}

#[derive(Serialize)]
struct ModelOut<'a> {
    doc_count: usize,
    min_df: usize,
    terms: Vec<(&'a str, Box<RawValue>)>,
}

#[derive(Deserialize)]
struct ModelIn {
    doc_count: usize,
    min_df: usize,
    terms: Vec<(String, f64)>,
}

impl Serialize for TfIdfModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .zip(&self.idf)
            .map(|(t, v)| {
                RawValue::from_string(format17(*v))
                    .map(|raw| (t.as_str(), raw))
                    .map_err(serde::ser::Error::custom)
            })
            .collect::<Result<Vec<_>, _>>()?;
        ModelOut {
            doc_count: self.doc_count,
            min_df: self.min_df,
            terms,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TfIdfModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ModelIn::deserialize(deserializer)?;
        if raw.min_df == 0 {
            return Err(D::Error::custom("min_df must be at least 1"));
        }
        if !raw.terms.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(D::Error::custom(
                "terms must be unique and in lexicographic order",
            ));
        }
        if raw
            .terms
            .iter()
            .any(|(_, idf)| !(idf.is_finite() && *idf >= 1.0))
        {
            return Err(D::Error::custom("idf values must be finite and at least 1"));
        }
        let (terms, idf) = raw.terms.into_iter().unzip();
        Ok(TfIdfModel {
            terms,
            idf,
            doc_count: raw.doc_count,
            min_df: raw.min_df,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(items: &[&str]) -> TokenList {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn idf_hand_values() {
        let docs = vec![doc(&["a", "b"]), doc(&["a"]), doc(&["a", "a"])];
        let model = fit(&docs, 1).unwrap();
        assert_eq!(model.terms(), &["a".to_string(), "b".to_string()]);
        assert!((model.idf()[0] - 1.0).abs() < 1e-12);
        assert!((model.idf()[1] - (2f64.ln() + 1.0)).abs() < 1e-12);
        assert!((model.idf()[1] - 1.693_147_180_559_945).abs() < 1e-12);
    }

    #[test]
    fn min_df_threshold() {
        let docs = vec![doc(&["a", "b"]), doc(&["a"])];
        let model = fit(&docs, 2).unwrap();
        assert_eq!(model.terms(), &["a".to_string()]);
        assert_eq!(model.index_of("b"), None);
        assert_eq!(fit(&docs, 3), Err(FeatureError::EmptyVocabulary(3)));
        assert_eq!(fit(&docs, 0), Err(FeatureError::InvalidMinDf));
    }

    #[test]
    fn all_empty_docs_fail() {
        assert_eq!(fit(&[vec![], vec![]], 1), Err(FeatureError::NoTokens));
        assert_eq!(fit(&[], 1), Err(FeatureError::NoTokens));
    }

    #[test]
    fn single_token_is_unit() {
        let model = fit(&[doc(&["x", "y"]), doc(&["y"])], 1).unwrap();
        let v = transform(&model, &doc(&["x"]));
        assert_eq!(v.indices(), &[0]);
        assert!((v.values()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_normalization() {
        let model = TfIdfModel {
            terms: vec!["a".into(), "b".into()],
            idf: vec![1.0, 2.0],
            doc_count: 3,
            min_df: 1,
        };
        let v = transform(&model, &doc(&["a", "a", "b"]));
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v.values()[0] - expected).abs() < 1e-12);
        assert!((v.values()[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn out_of_vocabulary_doc_is_empty() {
        let model = fit(&[doc(&["a"])], 1).unwrap();
        let v = transform(&model, &doc(&["zzz", "q"]));
        assert!(v.is_empty());
        assert_eq!(v.dim(), 1);
    }

    #[test]
    fn json_format() {
        let model = fit(&[doc(&["b", "a"]), doc(&["a"])], 1).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        assert!(json
            .starts_with(r#"{"doc_count":2,"min_df":1,"terms":[["a",1.0000000000000000e0],["b","#));
        let back: TfIdfModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
        let unsorted = r#"{"doc_count":2,"min_df":1,"terms":[["b",1.0],["a",1.0]]}"#;
        assert!(serde_json::from_str::<TfIdfModel>(unsorted).is_err());
    }

    proptest! {
        #[test]
        fn idf_is_decreasing_in_df(docs in prop::collection::vec(
            prop::collection::vec("[a-f]", 0..6), 1..12)
        ) {
            let docs: Vec<TokenList> = docs;
            prop_assume!(docs.iter().any(|d| !d.is_empty()));
            let model = fit(&docs, 1).unwrap();
            let df = |t: &str| docs.iter().filter(|d| d.iter().any(|x| x == t)).count();
            for (i, a) in model.terms().iter().enumerate() {
                for (j, b) in model.terms().iter().enumerate() {
                    if df(a) < df(b) {
                        prop_assert!(model.idf()[i] > model.idf()[j]);
                    }
                }
            }
            prop_assert_eq!(fit(&docs, 1).unwrap(), model);
        }

        #[test]
        fn transformed_rows_have_unit_norm(
            docs in prop::collection::vec(prop::collection::vec("[a-h]{1,2}", 1..8), 1..10),
            probe in prop::collection::vec("[a-j]{1,2}", 0..10),
        ) {
            let model = fit(&docs, 1).unwrap();
            let v = transform(&model, &probe);
            prop_assert!(v.is_empty() || (v.norm() - 1.0).abs() < 1e-9);
        }
    }
}
