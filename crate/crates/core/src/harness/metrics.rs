use serde::{Deserialize, Serialize};

use super::experiment::TopicClassifier;
use super::HarnessError;
use crate::corpus::TopicLabel;
use crate::supervision::GoldExample;

/// Binary confusion counts with precision, recall and F1. Ratios with a
/// zero denominator are defined as 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }

    /// Micro-average: pool the counts, then recompute the ratios.
    pub fn pooled<'a>(parts: impl IntoIterator<Item = &'a Metrics>) -> Self {
        let (tp, fp, fn_) = parts
            .into_iter()
            .fold((0, 0, 0), |(a, b, c), m| (a + m.tp, b + m.fp, c + m.fn_));
        Self::from_counts(tp, fp, fn_)
    }
}

pub fn evaluate_binary(predictions: &[bool], gold: &[bool]) -> Result<Metrics, HarnessError> {
    if predictions.len() != gold.len() {
        return Err(HarnessError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(Metrics::from_counts(tp, fp, fn_))
}

/// Scores each topic classifier against multi-label gold judgments. A row
/// is positive for topic T iff T is among its labels, so "other" rows are
/// negatives everywhere.
pub fn evaluate_on_gold(
    classifiers: &[TopicClassifier],
    gold: &[GoldExample],
) -> Result<Vec<(TopicLabel, Metrics)>, HarnessError> {
    let min_gold = gold
        .iter()
        .map(|g| g.timestamp)
        .min()
        .ok_or(HarnessError::EmptyGold)?;
    classifiers
        .iter()
        .map(|c| {
            if c.trained_until >= min_gold {
                return Err(HarnessError::TemporalLeakage {
                    topic: c.topic.to_string(),
                    max_train: c.trained_until,
                    min_test: min_gold,
                });
            }
            let predictions = gold
                .iter()
                .map(|g| c.predict(&g.text).map(|(_, decision)| decision))
                .collect::<Result<Vec<_>, _>>()?;
            let truth: Vec<bool> = gold.iter().map(|g| g.is_positive_for(&c.topic)).collect();
            Ok((c.topic.clone(), evaluate_binary(&predictions, &truth)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let m = evaluate_binary(&[true, false, true], &[true, false, true]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn two_thirds_everywhere() {
        // tp = 2, fp = 1, fn = 1
        let m = evaluate_binary(
            &[true, true, true, false, false],
            &[true, true, false, true, false],
        )
        .unwrap();
        assert_eq!((m.tp, m.fp, m.fn_), (2, 1, 1));
        for v in [m.precision, m.recall, m.f1] {
            assert!((v - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn nothing_predicted_nothing_true() {
        let m = evaluate_binary(&[false, false], &[false, false]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            evaluate_binary(&[true], &[]),
            Err(HarnessError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn pooling_sums_counts() {
        let a = Metrics::from_counts(1, 0, 1);
        let b = Metrics::from_counts(3, 2, 0);
        let all = Metrics::pooled([&a, &b]);
        assert_eq!((all.tp, all.fp, all.fn_), (4, 2, 1));
    }
}
