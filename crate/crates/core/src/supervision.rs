//! Distant supervision: turning account topicality into training labels.
//!
//! A tweet from a focused account is a positive example for that account's
//! topic. Negatives are sampled uniformly (without replacement) from a pool
//! of off-topic tweets, capped at `cap_ratio` times the positive count.
//! Hybrid and general accounts never provide positives because the topic of
//! an individual post from them is unknown.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::corpus::{
    parse_tweet_object, Corpus, StreamType, SyntheticCorpus, TopicLabel, TopicSet, Tweet,
};

#[derive(Debug, Error)]
pub enum SupervisionError {
    #[error("unknown topic '{0}'")]
    UnknownTopic(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("gold file line {line}: {reason}")]
    GoldFormat { line: usize, reason: String },
    #[error("invalid negative sampling config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Binary(bool),
    Topic(TopicLabel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub tweet_ref: String,
    pub timestamp: i64,
    pub text: String,
    pub target: Target,
    pub weight: f64,
}

impl LabeledExample {
    fn from_tweet(tweet: &Tweet, target: Target) -> Self {
        Self {
            tweet_ref: tweet.id.clone(),
            timestamp: tweet.timestamp,
            text: tweet.text.clone(),
            target,
            weight: 1.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.target == Target::Binary(true)
    }
}

/// Chronologically ordered examples for one training task.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledDataset {
    pub examples: Vec<LabeledExample>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.examples.iter().filter(|e| e.is_positive()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolPolicy {
    /// Tweets from focused accounts of other topics.
    #[default]
    OtherFocusedOnly,
    /// Tweets from any non-general account whose topics exclude the target.
    AllNonTopic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativeSamplingConfig {
    pub cap_ratio: f64,
    pub pool_policy: PoolPolicy,
    pub seed: u64,
}

impl Default for NegativeSamplingConfig {
    fn default() -> Self {
        Self {
            cap_ratio: 5.0,
            pool_policy: PoolPolicy::OtherFocusedOnly,
            seed: 0,
        }
    }
}

fn check_topic(corpus: &Corpus, topic: &TopicLabel) -> Result<(), SupervisionError> {
    if corpus.topics().contains(topic) {
        Ok(())
    } else {
        Err(SupervisionError::UnknownTopic(topic.to_string()))
    }
}

/// Tweets from accounts focused on exactly `topic`, in corpus order.
pub fn assign_positive_labels(
    corpus: &Corpus,
    topic: &TopicLabel,
) -> Result<Vec<LabeledExample>, SupervisionError> {
    check_topic(corpus, topic)?;
    Ok(corpus
        .tweets()
        .iter()
        .filter(|t| corpus.account_of(t).focus() == Some(topic))
        .map(|t| LabeledExample::from_tweet(t, Target::Binary(true)))
        .collect())
}

/// Tweets eligible as negatives for `topic` under `policy`, in corpus order.
pub fn negative_pool<'a>(
    corpus: &'a Corpus,
    topic: &TopicLabel,
    policy: PoolPolicy,
) -> Vec<&'a Tweet> {
    corpus
        .tweets()
        .iter()
        .filter(|t| {
            let account = corpus.account_of(t);
            match policy {
                PoolPolicy::OtherFocusedOnly => {
                    account.stream_type == StreamType::Focused && !account.topics.contains(topic)
                }
                PoolPolicy::AllNonTopic => {
                    account.stream_type != StreamType::General && !account.topics.contains(topic)
                }
            }
        })
        .collect()
}

/// Samples `min(floor(cap_ratio · |positives|), |pool|)` negatives uniformly
/// without replacement and returns them in chronological order.
pub fn sample_negatives(
    corpus: &Corpus,
    topic: &TopicLabel,
    positives: &[LabeledExample],
    config: &NegativeSamplingConfig,
) -> Result<Vec<LabeledExample>, SupervisionError> {
    check_topic(corpus, topic)?;
    if !(config.cap_ratio.is_finite() && config.cap_ratio > 0.0) {
        return Err(SupervisionError::InvalidConfig(format!(
            "cap_ratio must be positive, got {}",
            config.cap_ratio
        )));
    }
    if positives.is_empty() {
        return Ok(Vec::new());
    }
    let pool = negative_pool(corpus, topic, config.pool_policy);
    let cap = (config.cap_ratio * positives.len() as f64).floor() as usize;
    let amount = cap.min(pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut picked = rand::seq::index::sample(&mut rng, pool.len(), amount).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| LabeledExample::from_tweet(pool[i], Target::Binary(false)))
        .collect())
}

fn merge_chronological(mut examples: Vec<LabeledExample>) -> LabeledDataset {
    examples.sort_by(|a, b| (a.timestamp, &a.tweet_ref).cmp(&(b.timestamp, &b.tweet_ref)));
    LabeledDataset { examples }
}

/// Positives plus capped negatives for one topic, chronologically ordered,
/// every weight 1.0.
pub fn build_binary_dataset(
    corpus: &Corpus,
    topic: &TopicLabel,
    config: &NegativeSamplingConfig,
) -> Result<LabeledDataset, SupervisionError> {
    let mut positives = assign_positive_labels(corpus, topic)?;
    let negatives = sample_negatives(corpus, topic, &positives, config)?;
    positives.extend(negatives);
    Ok(merge_chronological(positives))
}

/// One example per focused-account tweet, labelled with the account's topic.
pub fn build_multiclass_dataset(corpus: &Corpus) -> LabeledDataset {
    let examples = corpus
        .tweets()
        .iter()
        .filter_map(|t| {
            corpus
                .account_of(t)
                .focus()
                .map(|topic| LabeledExample::from_tweet(t, Target::Topic(topic.clone())))
        })
        .collect();
    LabeledDataset { examples }
}

/// A human-judged (or synthetic latent-topic) test example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldExample {
    pub tweet_ref: String,
    pub timestamp: i64,
    pub account: String,
    pub text: String,
    pub labels: BTreeSet<TopicLabel>,
    /// Set when the assessor judged the post as none of the topics.
    pub other_flag: bool,
}

impl GoldExample {
    /// Gold truth for a per-topic binary task; "other" rows are negative for
    /// every topic.
    pub fn is_positive_for(&self, topic: &TopicLabel) -> bool {
        self.labels.contains(topic)
    }
}

#[derive(Serialize)]
struct GoldRecord<'a> {
    id: &'a str,
    created_at: i64,
    account: &'a str,
    text: &'a str,
    labels: Vec<&'a str>,
}

pub fn load_gold(
    path: impl AsRef<Path>,
    topics: &TopicSet,
) -> Result<Vec<GoldExample>, SupervisionError> {
    let path = path.as_ref();
    let io = |source| SupervisionError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    read_gold(BufReader::new(file), topics).map_err(|e| match e {
        GoldReadError::Io(source) => io(source),
        GoldReadError::Supervision(inner) => inner,
    })
}

#[derive(Debug)]
enum GoldReadError {
    Io(std::io::Error),
    Supervision(SupervisionError),
}

fn read_gold(reader: impl BufRead, topics: &TopicSet) -> Result<Vec<GoldExample>, GoldReadError> {
    let mut out = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(GoldReadError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let example = parse_gold(&line, topics).map_err(|reason| {
            GoldReadError::Supervision(SupervisionError::GoldFormat {
                line: index + 1,
                reason,
            })
        })?;
        out.push(example);
    }
    Ok(out)
}

/// Parses gold JSON lines from an in-memory string.
pub fn parse_gold_str(text: &str, topics: &TopicSet) -> Result<Vec<GoldExample>, SupervisionError> {
    read_gold(text.as_bytes(), topics).map_err(|e| match e {
        GoldReadError::Io(_) => unreachable!("in-memory reads do not fail"),
        GoldReadError::Supervision(inner) => inner,
    })
}

fn parse_gold(line: &str, topics: &TopicSet) -> Result<GoldExample, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| "record must be a JSON object".to_string())?;
    let tweet = parse_tweet_object(obj)?;
    let raw_labels = match obj.get("labels") {
        None => return Err("missing required field 'labels'".into()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| "labels must be strings".to_string())
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err("field 'labels' must be an array".into()),
    };
    let other = raw_labels
        .iter()
        .any(|l| l.trim().eq_ignore_ascii_case("other"));
    if other && raw_labels.len() > 1 {
        return Err("'other' cannot be combined with topic labels".into());
    }
    if raw_labels.is_empty() {
        return Err("labels must be non-empty (use [\"other\"] for off-topic)".into());
    }
    let labels = if other {
        BTreeSet::new()
    } else {
        raw_labels
            .iter()
            .map(|l| topics.label(l).map_err(|e| e.to_string()))
            .collect::<Result<BTreeSet<_>, _>>()?
    };
    Ok(GoldExample {
        tweet_ref: tweet.id,
        timestamp: tweet.timestamp,
        account: tweet.account,
        text: tweet.text,
        labels,
        other_flag: other,
    })
}

pub fn write_gold(path: impl AsRef<Path>, gold: &[GoldExample]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for g in gold {
        let labels = if g.other_flag {
            vec!["other"]
        } else {
            g.labels.iter().map(TopicLabel::as_str).collect()
        };
        let record = GoldRecord {
            id: &g.tweet_ref,
            created_at: g.timestamp,
            account: &g.account,
            text: &g.text,
            labels,
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Gold judgments for a synthetic corpus: its trailing hybrid and general
/// posts labelled with their latent topic.
pub fn gold_from_synthetic(synth: &SyntheticCorpus) -> Vec<GoldExample> {
    synth
        .gold_candidates()
        .map(|(tweet, topic)| GoldExample {
            tweet_ref: tweet.id.clone(),
            timestamp: tweet.timestamp,
            account: tweet.account.clone(),
            text: tweet.text.clone(),
            labels: BTreeSet::from([topic.clone()]),
            other_flag: false,
        })
        .collect()
}
