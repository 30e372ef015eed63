use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ClassifierError;
use crate::corpus::TopicLabel;
use crate::features::SparseVector;
use crate::float_format;

/// Multinomial naive Bayes with additive (Laplace/Lidstone) smoothing.
/// Classes are kept in lexicographic label order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub classes: Vec<TopicLabel>,
    #[serde(with = "float_format::vec")]
    pub class_log_priors: Vec<f64>,
    /// `[class][feature]` log-likelihoods.
    #[serde(with = "float_format::matrix")]
    pub feature_log_likelihoods: Vec<Vec<f64>>,
    #[serde(with = "float_format::scalar")]
    pub smoothing_alpha: f64,
}

impl NaiveBayesModel {
    pub fn dim(&self) -> usize {
        self.feature_log_likelihoods.first().map_or(0, Vec::len)
    }
}

fn check_counts(x: &SparseVector) -> Result<(), ClassifierError> {
    if x.values().iter().all(|v| v.is_finite() && *v >= 0.0) {
        Ok(())
    } else {
        Err(ClassifierError::InvalidCount)
    }
}

/// Fits priors `ln(n_c / n)` and likelihoods
/// `ln((count(t, c) + α) / (Σ_t' count(t', c) + α·V))`.
pub fn train_nb(
    examples: &[(SparseVector, TopicLabel)],
    dim: usize,
    alpha: f64,
) -> Result<NaiveBayesModel, ClassifierError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(ClassifierError::InvalidAlpha(alpha));
    }
    // per class: (document count, per-feature counts)
    let mut per_class: BTreeMap<&TopicLabel, (usize, Vec<f64>)> = BTreeMap::new();
    for (x, label) in examples {
        if x.dim() != dim {
            return Err(ClassifierError::DimensionMismatch {
                expected: dim,
                found: x.dim(),
            });
        }
        check_counts(x)?;
        let entry = per_class
            .entry(label)
            .or_insert_with(|| (0, vec![0.0; dim]));
        entry.0 += 1;
        for (i, v) in x.iter() {
            entry.1[i] += v;
        }
    }
    if per_class.len() < 2 {
        return Err(ClassifierError::TooFewClasses(per_class.len()));
    }
    let n = examples.len() as f64;
    let v = dim as f64;
    let mut classes = Vec::with_capacity(per_class.len());
    let mut class_log_priors = Vec::with_capacity(per_class.len());
    let mut feature_log_likelihoods = Vec::with_capacity(per_class.len());
    for (label, (docs, counts)) in per_class {
        let total: f64 = counts.iter().sum();
        let denom = (total + alpha * v).ln();
        classes.push(label.clone());
        class_log_priors.push((docs as f64 / n).ln());
        feature_log_likelihoods.push(counts.iter().map(|c| (c + alpha).ln() - denom).collect());
    }
    Ok(NaiveBayesModel {
        classes,
        class_log_priors,
        feature_log_likelihoods,
        smoothing_alpha: alpha,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbPrediction {
    pub label: TopicLabel,
    /// Normalized log-posterior per class, in model class order.
    pub log_posteriors: Vec<(TopicLabel, f64)>,
}

/// Arg-max of `log_prior(c) + Σ_t x_t · log_likelihood(c, t)`; ties go to
/// the lexicographically smallest class.
pub fn nb_predict(
    model: &NaiveBayesModel,
    x: &SparseVector,
) -> Result<NbPrediction, ClassifierError> {
    if x.dim() != model.dim() {
        return Err(ClassifierError::DimensionMismatch {
            expected: model.dim(),
            found: x.dim(),
        });
    }
    check_counts(x)?;
    let joint: Vec<f64> = model
        .class_log_priors
        .iter()
        .zip(&model.feature_log_likelihoods)
        .map(|(prior, ll)| prior + x.iter().map(|(i, v)| v * ll[i]).sum::<f64>())
        .collect();
    let mut best = 0;
    for (c, score) in joint.iter().enumerate() {
        if *score > joint[best] {
            best = c;
        }
    }
    let max = joint[best];
    let log_norm = max + joint.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    Ok(NbPrediction {
        label: model.classes[best].clone(),
        log_posteriors: model
            .classes
            .iter()
            .cloned()
            .zip(joint.iter().map(|s| s - log_norm))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TopicSet;

    fn topics() -> TopicSet {
        TopicSet::new(["alpha", "beta", "gamma"]).unwrap()
    }

    fn l(name: &str) -> TopicLabel {
        topics().label(name).unwrap()
    }

    fn counts(x: &[f64]) -> SparseVector {
        SparseVector::from_dense(x)
    }

    #[test]
    fn equal_class_sizes_give_equal_priors() {
        let data = vec![
            (counts(&[1.0, 0.0]), l("alpha")),
            (counts(&[0.0, 1.0]), l("beta")),
        ];
        let model = train_nb(&data, 2, 1.0).unwrap();
        assert_eq!(model.classes, vec![l("alpha"), l("beta")]);
        for p in &model.class_log_priors {
            assert!((p - 0.5f64.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn laplace_hand_values() {
        // class alpha has counts (a: 3, b: 1), alpha = 1, V = 2
        let data = vec![
            (counts(&[2.0, 1.0]), l("alpha")),
            (counts(&[1.0, 0.0]), l("alpha")),
            (counts(&[0.0, 5.0]), l("beta")),
        ];
        let model = train_nb(&data, 2, 1.0).unwrap();
        let ll = &model.feature_log_likelihoods[0];
        assert!((ll[0].exp() - 4.0 / 6.0).abs() < 1e-12);
        assert!((ll[1].exp() - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn unseen_term_likelihood() {
        // class beta: total count 10 over V = 5 terms, term 4 unseen
        let data = vec![
            (counts(&[4.0, 3.0, 2.0, 1.0, 0.0]), l("beta")),
            (counts(&[0.0, 0.0, 0.0, 0.0, 1.0]), l("alpha")),
        ];
        let model = train_nb(&data, 5, 1.0).unwrap();
        let beta = model.classes.iter().position(|c| c == &l("beta")).unwrap();
        assert!((model.feature_log_likelihoods[beta][4].exp() - 1.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn likelihoods_are_normalized() {
        let data = vec![
            (counts(&[2.0, 0.0, 7.0]), l("gamma")),
            (counts(&[1.0, 1.0, 0.0]), l("alpha")),
            (counts(&[0.0, 3.0, 1.0]), l("beta")),
        ];
        let model = train_nb(&data, 3, 0.5).unwrap();
        for ll in &model.feature_log_likelihoods {
            let sum: f64 = ll.iter().map(|v| v.exp()).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_tie_goes_to_first_label() {
        let data = vec![
            (counts(&[1.0, 0.0]), l("beta")),
            (counts(&[0.0, 1.0]), l("alpha")),
        ];
        let model = train_nb(&data, 2, 1.0).unwrap();
        let pred = nb_predict(&model, &counts(&[1.0, 1.0])).unwrap();
        assert_eq!(pred.label, l("alpha"));
    }

    #[test]
    fn empty_evidence_follows_priors() {
        let data = vec![
            (counts(&[1.0, 0.0]), l("alpha")),
            (counts(&[0.0, 1.0]), l("beta")),
            (counts(&[0.0, 2.0]), l("beta")),
        ];
        let model = train_nb(&data, 2, 1.0).unwrap();
        let pred = nb_predict(&model, &counts(&[0.0, 0.0])).unwrap();
        assert_eq!(pred.label, l("beta"));
        assert!((pred.log_posteriors[1].1 - (2.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let one = vec![(counts(&[1.0]), l("alpha"))];
        assert_eq!(
            train_nb(&one, 1, 1.0),
            Err(ClassifierError::TooFewClasses(1))
        );
        let two = vec![(counts(&[1.0]), l("alpha")), (counts(&[1.0]), l("beta"))];
        assert_eq!(
            train_nb(&two, 1, 0.0),
            Err(ClassifierError::InvalidAlpha(0.0))
        );
        let neg = vec![(counts(&[-1.0]), l("alpha")), (counts(&[1.0]), l("beta"))];
        assert_eq!(train_nb(&neg, 1, 1.0), Err(ClassifierError::InvalidCount));
        let model = train_nb(&two, 1, 1.0).unwrap();
        assert!(nb_predict(&model, &counts(&[1.0, 2.0])).is_err());
    }
}
