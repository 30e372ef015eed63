//! The window experiments.
//!
//! For every topic the training region of the corpus is turned into one
//! chronologically ordered binary dataset of `N` examples. A window is a
//! contiguous run of that dataset; the TF-IDF vocabulary and the classifier
//! of a window are fitted on the window's examples only, then scored against
//! a fixed evaluation target that lies entirely after the training region.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EvalKind, ExperimentConfig, ExperimentKind};
use super::export::ResultRow;
use super::metrics::{evaluate_binary, Metrics};
use super::split::{chronological_split, SplitSpec};
use super::weights::{recency_weights, RecencyWeightSpec};
use super::HarnessError;
use crate::classifiers::{
    predict_proba, train_logistic, ClassifierError, LogisticModel, LogisticTrainConfig,
    TrainingExample,
};
use crate::corpus::{Corpus, StreamType, TopicLabel};
use crate::features::{fit, FeatureError, FeatureVector, TfIdfModel, TokenList, Tokenizer};
use crate::supervision::{
    assign_positive_labels, build_binary_dataset, negative_pool, GoldExample, LabeledDataset,
    NegativeSamplingConfig, Target,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSettings {
    pub negatives: NegativeSamplingConfig,
    pub train: LogisticTrainConfig,
    pub min_df: usize,
    pub tokenizer: Tokenizer,
    pub split: SplitSpec,
    /// Keep a [`WindowAudit`] for every trained window.
    pub collect_audits: bool,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            negatives: NegativeSamplingConfig::default(),
            train: LogisticTrainConfig::default(),
            min_df: 1,
            tokenizer: Tokenizer::default(),
            split: SplitSpec::default(),
            collect_audits: false,
        }
    }
}

/// What the trained windows are scored against.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalTarget {
    /// Chronological split of the corpus: train on the older part, test on
    /// focused-account tweets of the newer part labelled by their account.
    NoisySplit,
    /// Train on everything older than the first judgment, test on the
    /// judgments.
    Gold(Vec<GoldExample>),
}

/// A per-topic classifier together with the vocabulary it was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicClassifier {
    pub topic: TopicLabel,
    /// Newest training timestamp.
    pub trained_until: i64,
    pub tokenizer: Tokenizer,
    pub tfidf: TfIdfModel,
    pub logistic: LogisticModel,
}

impl TopicClassifier {
    pub fn features(&self, text: &str) -> FeatureVector {
        self.tfidf.transform(&self.tokenizer.tokenize(text))
    }

    /// Probability and thresholded decision for `text`.
    pub fn predict(&self, text: &str) -> Result<(f64, bool), ClassifierError> {
        self.predict_tokens(&self.tokenizer.tokenize(text))
    }

    fn predict_tokens(&self, tokens: &TokenList) -> Result<(f64, bool), ClassifierError> {
        let p = predict_proba(&self.logistic, &self.tfidf.transform(tokens))?;
        Ok((p, p >= self.logistic.train_config.decision_threshold))
    }
}

/// Fits TF-IDF and logistic regression on one window. Returns `None` when
/// the window lacks one of the two classes or has no usable tokens.
pub fn train_topic_classifier(
    topic: &TopicLabel,
    dataset: &LabeledDataset,
    tokens: &[TokenList],
    weights: &[f64],
    settings: &ExperimentSettings,
) -> Result<Option<TopicClassifier>, HarnessError> {
    let examples = &dataset.examples;
    assert_eq!(examples.len(), tokens.len());
    assert_eq!(examples.len(), weights.len());
    let has_pos = examples.iter().any(|e| e.is_positive());
    let has_neg = examples.iter().any(|e| !e.is_positive());
    if !(has_pos && has_neg) {
        return Ok(None);
    }
    let tfidf = match fit(tokens, settings.min_df) {
        Ok(model) => model,
        Err(FeatureError::NoTokens | FeatureError::EmptyVocabulary(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let training: Vec<TrainingExample> = examples
        .iter()
        .zip(tokens)
        .zip(weights)
        .map(|((e, t), &w)| TrainingExample {
            features: tfidf.transform(t),
            label: e.target == Target::Binary(true),
            weight: w,
        })
        .collect();
    let logistic = train_logistic(&training, tfidf.dim(), &settings.train)?;
    let trained_until = examples
        .iter()
        .map(|e| e.timestamp)
        .max()
        .expect("non-empty window");
    Ok(Some(TopicClassifier {
        topic: topic.clone(),
        trained_until,
        tokenizer: settings.tokenizer,
        tfidf,
        logistic,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowMode {
    GrowingEndFixed,
    SlidingFixedSize,
}

/// Growing mode: `fractions` are window sizes, each window ending at the
/// newest training example. Sliding mode: `fractions` are start offsets of
/// windows of size `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub mode: WindowMode,
    pub fractions: Vec<f64>,
    pub r: f64,
}

/// A window quantized to example positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowBounds {
    pub start: usize,
    pub len: usize,
    /// Nominal start as a fraction of `N`.
    pub start_frac: f64,
    /// Nominal size as a fraction of `N`.
    pub size_frac: f64,
}

const FRACTION_SLACK: f64 = 1e-9;

impl WindowSpec {
    pub fn growing(sizes: Vec<f64>) -> Self {
        Self {
            mode: WindowMode::GrowingEndFixed,
            fractions: sizes,
            r: 1.0,
        }
    }

    pub fn sliding(r: f64, offsets: Vec<f64>) -> Self {
        Self {
            mode: WindowMode::SlidingFixedSize,
            fractions: offsets,
            r,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidWindow(m));
        if self.fractions.is_empty() {
            return bad("no window sizes or offsets".into());
        }
        match self.mode {
            WindowMode::GrowingEndFixed => {
                for &s in &self.fractions {
                    if !(s > 0.0 && s <= 1.0) {
                        return bad(format!("window size {s} outside (0, 1]"));
                    }
                }
                if !self.fractions.windows(2).all(|w| w[0] < w[1]) {
                    return bad("window sizes must be ascending".into());
                }
            }
            WindowMode::SlidingFixedSize => {
                if !(self.r > 0.0 && self.r <= 1.0) {
                    return bad(format!("R = {} outside (0, 1]", self.r));
                }
                for &o in &self.fractions {
                    if !(o >= 0.0 && o + self.r <= 1.0 + FRACTION_SLACK) {
                        return bad(format!("offset {o} with R = {} overruns the data", self.r));
                    }
                }
            }
        }
        Ok(())
    }

    /// Quantizes every window onto `n` examples by flooring.
    pub fn bounds(&self, n: usize) -> Vec<WindowBounds> {
        let nf = n as f64;
        match self.mode {
            WindowMode::GrowingEndFixed => self
                .fractions
                .iter()
                .map(|&s| {
                    let len = ((s * nf).floor() as usize).min(n);
                    WindowBounds {
                        start: n - len,
                        len,
                        start_frac: 1.0 - s,
                        size_frac: s,
                    }
                })
                .collect(),
            WindowMode::SlidingFixedSize => {
                let len = ((self.r * nf).floor() as usize).min(n);
                self.fractions
                    .iter()
                    .map(|&o| WindowBounds {
                        start: ((o * nf).floor() as usize).min(n - len),
                        len,
                        start_frac: o,
                        size_frac: self.r,
                    })
                    .collect()
            }
        }
    }
}

/// Evidence that a trained window respected chronology.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowAudit {
    pub experiment: String,
    pub topic: TopicLabel,
    pub start: usize,
    pub len: usize,
    pub train_ids: Vec<String>,
    pub max_train_timestamp: i64,
    pub min_test_timestamp: i64,
    pub vocabulary: Vec<String>,
}

/// A (topic, window) cell that could not be trained.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsentCell {
    pub experiment: String,
    pub topic: TopicLabel,
    pub window_start_frac: f64,
    pub window_size_frac: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub absent: Vec<AbsentCell>,
    pub audits: Vec<WindowAudit>,
}

/// Training data and evaluation items for one topic.
struct TopicTask {
    topic: TopicLabel,
    train: LabeledDataset,
    train_tokens: Vec<TokenList>,
    test_tokens: Vec<TokenList>,
    test_truth: Vec<bool>,
    min_test_timestamp: i64,
}

impl TopicTask {
    fn window(&self, bounds: &WindowBounds) -> (LabeledDataset, &[TokenList]) {
        let range = bounds.start..bounds.start + bounds.len;
        (
            LabeledDataset {
                examples: self.train.examples[range.clone()].to_vec(),
            },
            &self.train_tokens[range],
        )
    }
}

fn prepare_tasks(
    corpus: &Corpus,
    topics: &[TopicLabel],
    target: &EvalTarget,
    settings: &ExperimentSettings,
) -> Result<Vec<TopicTask>, HarnessError> {
    let tokenizer = settings.tokenizer;
    let (train_region, test_region) = match target {
        EvalTarget::NoisySplit => {
            let (train, test) = chronological_split(corpus.tweets(), settings.split)?;
            (
                corpus.slice(0..train.len()),
                Some(corpus.slice(train.len()..train.len() + test.len())),
            )
        }
        EvalTarget::Gold(gold) => {
            let min_gold = gold
                .iter()
                .map(|g| g.timestamp)
                .min()
                .ok_or(HarnessError::EmptyGold)?;
            (corpus.before(min_gold), None)
        }
    };
    if train_region.is_empty() {
        return Err(HarnessError::NoTrainingData(
            "no tweets precede the evaluation data".into(),
        ));
    }

    topics
        .par_iter()
        .map(|topic| {
            let train = build_binary_dataset(&train_region, topic, &settings.negatives)?;
            let train_tokens = train
                .examples
                .iter()
                .map(|e| tokenizer.tokenize(&e.text))
                .collect();
            let (test_tokens, test_truth, min_test_timestamp) = match (target, &test_region) {
                (EvalTarget::NoisySplit, Some(test)) => {
                    let positives = assign_positive_labels(test, topic)?;
                    let pool = negative_pool(test, topic, settings.negatives.pool_policy);
                    let texts = positives
                        .iter()
                        .map(|e| (e.text.as_str(), true))
                        .chain(pool.into_iter().map(|t| (t.text.as_str(), false)));
                    let (tokens, truth): (Vec<TokenList>, Vec<bool>) =
                        texts.map(|(text, y)| (tokenizer.tokenize(text), y)).unzip();
                    (tokens, truth, test.tweets()[0].timestamp)
                }
                (EvalTarget::Gold(gold), _) => {
                    let (tokens, truth): (Vec<TokenList>, Vec<bool>) = gold
                        .iter()
                        .map(|g| (tokenizer.tokenize(&g.text), g.is_positive_for(topic)))
                        .unzip();
                    let min = gold
                        .iter()
                        .map(|g| g.timestamp)
                        .min()
                        .expect("non-empty gold");
                    (tokens, truth, min)
                }
                (EvalTarget::NoisySplit, None) => {
                    unreachable!("noisy split always has a test region")
                }
            };
            Ok(TopicTask {
                topic: topic.clone(),
                train,
                train_tokens,
                test_tokens,
                test_truth,
                min_test_timestamp,
            })
        })
        .collect()
}

enum CellOutcome {
    Trained {
        metrics: Metrics,
        audit: Option<WindowAudit>,
    },
    Absent(String),
}

fn run_cell(
    experiment: &str,
    task: &TopicTask,
    bounds: &WindowBounds,
    p: f64,
    settings: &ExperimentSettings,
) -> Result<CellOutcome, HarnessError> {
    if bounds.len == 0 {
        return Ok(CellOutcome::Absent("empty window".into()));
    }
    let (window, tokens) = task.window(bounds);
    let weights = recency_weights(window.len(), RecencyWeightSpec { p })?;
    let Some(classifier) =
        train_topic_classifier(&task.topic, &window, tokens, &weights, settings)?
    else {
        return Ok(CellOutcome::Absent(
            "window lacks positive or negative examples".into(),
        ));
    };
    if classifier.trained_until > task.min_test_timestamp {
        return Err(HarnessError::TemporalLeakage {
            topic: task.topic.to_string(),
            max_train: classifier.trained_until,
            min_test: task.min_test_timestamp,
        });
    }
    let predictions = task
        .test_tokens
        .iter()
        .map(|t| classifier.predict_tokens(t).map(|(_, d)| d))
        .collect::<Result<Vec<_>, _>>()?;
    let metrics = evaluate_binary(&predictions, &task.test_truth)?;
    let audit = settings.collect_audits.then(|| WindowAudit {
        experiment: experiment.to_string(),
        topic: task.topic.clone(),
        start: bounds.start,
        len: bounds.len,
        train_ids: window
            .examples
            .iter()
            .map(|e| e.tweet_ref.clone())
            .collect(),
        max_train_timestamp: classifier.trained_until,
        min_test_timestamp: task.min_test_timestamp,
        vocabulary: classifier.tfidf.terms().to_vec(),
    });
    Ok(CellOutcome::Trained { metrics, audit })
}

fn run_windows(
    experiment: &str,
    corpus: &Corpus,
    topics: &[TopicLabel],
    spec: &WindowSpec,
    p: f64,
    target: &EvalTarget,
    settings: &ExperimentSettings,
) -> Result<ExperimentOutput, HarnessError> {
    spec.validate()?;
    recency_weights(1, RecencyWeightSpec { p })?;
    let tasks = prepare_tasks(corpus, topics, target, settings)?;
    let cells: Vec<(&TopicTask, WindowBounds)> = tasks
        .iter()
        .flat_map(|task| {
            spec.bounds(task.train.len())
                .into_iter()
                .map(move |b| (task, b))
        })
        .collect();
    let outcomes = cells
        .par_iter()
        .map(|(task, bounds)| run_cell(experiment, task, bounds, p, settings))
        .collect::<Result<Vec<_>, _>>()?;

    let mut output = ExperimentOutput::default();
    for ((task, bounds), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            CellOutcome::Trained { metrics, audit } => {
                output.rows.push(ResultRow::from_metrics(
                    experiment,
                    task.topic.as_str(),
                    bounds.start_frac,
                    bounds.size_frac,
                    p,
                    &metrics,
                ));
                output.audits.extend(audit);
            }
            CellOutcome::Absent(reason) => output.absent.push(AbsentCell {
                experiment: experiment.to_string(),
                topic: task.topic.clone(),
                window_start_frac: bounds.start_frac,
                window_size_frac: bounds.size_frac,
                reason,
            }),
        }
    }
    Ok(output)
}

/// Windows that all end at the newest training example and grow backwards
/// in time.
pub fn run_growing_window(
    corpus: &Corpus,
    topics: &[TopicLabel],
    sizes: &[f64],
    target: &EvalTarget,
    settings: &ExperimentSettings,
) -> Result<ExperimentOutput, HarnessError> {
    let spec = WindowSpec::growing(sizes.to_vec());
    run_windows("growing", corpus, topics, &spec, 1.0, target, settings)
}

/// Fixed-size windows of `r · N` examples starting at each offset.
pub fn run_sliding_window(
    corpus: &Corpus,
    topics: &[TopicLabel],
    r: f64,
    offsets: &[f64],
    target: &EvalTarget,
    settings: &ExperimentSettings,
) -> Result<ExperimentOutput, HarnessError> {
    let spec = WindowSpec::sliding(r, offsets.to_vec());
    run_windows("sliding", corpus, topics, &spec, 1.0, target, settings)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightingDelta {
    pub topic: String,
    pub unweighted: Metrics,
    pub weighted: Metrics,
}

impl WeightingDelta {
    pub fn delta_f1(&self) -> f64 {
        self.weighted.f1 - self.unweighted.f1
    }
}

/// Per-topic F1 with and without recency weighting, plus a pooled "all"
/// row that micro-averages every topic's binary decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightingTable {
    pub p: f64,
    pub rows: Vec<WeightingDelta>,
    pub all: WeightingDelta,
    pub absent: Vec<AbsentCell>,
    pub audits: Vec<WindowAudit>,
}

impl WeightingTable {
    pub fn row(&self, topic: &str) -> Option<&WeightingDelta> {
        self.rows.iter().find(|r| r.topic == topic)
    }

    /// Unweighted, weighted and delta rows per topic, then for "all".
    pub fn to_rows(&self) -> Vec<ResultRow> {
        self.rows
            .iter()
            .chain(std::iter::once(&self.all))
            .flat_map(|d| {
                [
                    ResultRow::from_metrics(
                        "weighting_unweighted",
                        &d.topic,
                        0.0,
                        1.0,
                        1.0,
                        &d.unweighted,
                    ),
                    ResultRow::from_metrics(
                        "weighting_weighted",
                        &d.topic,
                        0.0,
                        1.0,
                        self.p,
                        &d.weighted,
                    ),
                    ResultRow::delta(
                        "weighting_delta",
                        &d.topic,
                        self.p,
                        &d.unweighted,
                        &d.weighted,
                    ),
                ]
            })
            .collect()
    }

    pub fn into_output(self) -> ExperimentOutput {
        ExperimentOutput {
            rows: self.to_rows(),
            absent: self.absent,
            audits: self.audits,
        }
    }
}

/// Trains every topic on its full training region twice, uniformly and
/// with recency weights `p`, and reports the F1 differences.
pub fn run_weighting_delta(
    corpus: &Corpus,
    topics: &[TopicLabel],
    p: f64,
    target: &EvalTarget,
    settings: &ExperimentSettings,
) -> Result<WeightingTable, HarnessError> {
    recency_weights(1, RecencyWeightSpec { p })?;
    let tasks = prepare_tasks(corpus, topics, target, settings)?;
    let full = WindowSpec::growing(vec![1.0]);
    let runs = tasks
        .par_iter()
        .map(|task| {
            let bounds = full.bounds(task.train.len())[0];
            let plain = run_cell("weighting_unweighted", task, &bounds, 1.0, settings)?;
            let weighted = run_cell("weighting_weighted", task, &bounds, p, settings)?;
            Ok((plain, weighted))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let mut rows = Vec::new();
    let mut absent = Vec::new();
    let mut audits = Vec::new();
    for (task, (plain, weighted)) in tasks.iter().zip(runs) {
        match (plain, weighted) {
            (
                CellOutcome::Trained {
                    metrics: unweighted,
                    audit: a,
                },
                CellOutcome::Trained {
                    metrics: weighted,
                    audit: b,
                },
            ) => {
                audits.extend(a);
                audits.extend(b);
                rows.push(WeightingDelta {
                    topic: task.topic.to_string(),
                    unweighted,
                    weighted,
                });
            }
            (CellOutcome::Absent(reason), _) | (_, CellOutcome::Absent(reason)) => {
                absent.push(AbsentCell {
                    experiment: "weighting".into(),
                    topic: task.topic.clone(),
                    window_start_frac: 0.0,
                    window_size_frac: 1.0,
                    reason,
                })
            }
        }
    }
    let all = WeightingDelta {
        topic: "all".into(),
        unweighted: Metrics::pooled(rows.iter().map(|r| &r.unweighted)),
        weighted: Metrics::pooled(rows.iter().map(|r| &r.weighted)),
    };
    Ok(WeightingTable {
        p,
        rows,
        all,
        absent,
        audits,
    })
}

/// Topics of the corpus that have at least one focused account.
pub fn trainable_topics(corpus: &Corpus) -> Vec<TopicLabel> {
    corpus
        .topics()
        .labels()
        .iter()
        .filter(|t| {
            corpus
                .registry()
                .iter()
                .any(|a| a.stream_type == StreamType::Focused && a.topics.contains(*t))
        })
        .cloned()
        .collect()
}

/// Runs the experiment described by `config`.
pub fn run_config(
    corpus: &Corpus,
    config: &ExperimentConfig,
    gold: Option<Vec<GoldExample>>,
    settings: &ExperimentSettings,
) -> Result<ExperimentOutput, HarnessError> {
    config.validate()?;
    let topics = if config.topics.is_empty() {
        trainable_topics(corpus)
    } else {
        config
            .topics
            .iter()
            .map(|name| {
                corpus
                    .topics()
                    .label(name)
                    .map_err(|e| HarnessError::Config(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if topics.is_empty() {
        return Err(HarnessError::Config(
            "no topic has a focused account".into(),
        ));
    }
    let target = match (config.eval, gold) {
        (EvalKind::Noisy, _) => EvalTarget::NoisySplit,
        (EvalKind::Gold, Some(gold)) => EvalTarget::Gold(gold),
        (EvalKind::Gold, None) => {
            return Err(HarnessError::Config(
                "gold evaluation requires gold judgments".into(),
            ))
        }
    };
    let settings = ExperimentSettings {
        negatives: NegativeSamplingConfig {
            seed: config.seed,
            ..settings.negatives
        },
        ..settings.clone()
    };
    let p = config.effective_p();
    match config.experiment {
        ExperimentKind::Growing => {
            let spec = WindowSpec::growing(config.effective_sizes());
            run_windows("growing", corpus, &topics, &spec, p, &target, &settings)
        }
        ExperimentKind::Sliding => {
            let spec = WindowSpec::sliding(config.effective_r(), config.effective_offsets());
            run_windows("sliding", corpus, &topics, &spec, p, &target, &settings)
        }
        ExperimentKind::Weighting => {
            Ok(run_weighting_delta(corpus, &topics, p, &target, &settings)?.into_output())
        }
    }
}
