//! Seeded synthetic corpora with controllable topic drift.
//!
//! Every topic owns two disjoint lexicons, a start lexicon and an end
//! lexicon. A topical token drawn at relative time `u ∈ [0, 1]` comes from
//! the end lexicon with probability `min(1, drift_rate · u)`, so with
//! `drift_rate = 1` a topic's vocabulary moves linearly from one lexicon to
//! the other across the time span. The remaining tokens of each post come
//! from a lexicon shared by all topics. Within a lexicon, token ranks follow
//! a Zipf law.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    build_corpus, Account, AccountRegistry, Corpus, CorpusError, StreamType, TopicLabel, TopicSet,
    Tweet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountsPerType {
    /// Focused accounts per topic.
    pub focused: usize,
    /// Hybrid accounts in total; hybrid account `j` covers topics `j` and
    /// `j + 1` (mod topic count).
    pub hybrid: usize,
    /// General accounts in total.
    pub general: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub topic_set: Vec<String>,
    pub accounts_per_type: AccountsPerType,
    pub tweets_total: usize,
    /// `[start_ms, end_ms]`; timestamps are drawn from `[start_ms, end_ms)`.
    pub time_span: [i64; 2],
    pub drift_rate: f64,
    pub vocab_size_per_topic: usize,
    pub shared_vocab_size: usize,
    pub seed: u64,
    /// Inclusive token count range per post.
    #[serde(default = "default_tweet_length")]
    pub tweet_length: [usize; 2],
    /// Probability that a token is topical rather than shared.
    #[serde(default = "default_topic_token_share")]
    pub topic_token_share: f64,
    /// Trailing fraction of the time span whose hybrid and general posts are
    /// exported as gold judgments.
    #[serde(default = "default_gold_fraction")]
    pub gold_fraction: f64,
}

fn default_tweet_length() -> [usize; 2] {
    [6, 14]
}

fn default_topic_token_share() -> f64 {
    0.35
}

fn default_gold_fraction() -> f64 {
    0.1
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            topic_set: vec!["politics".into(), "sports".into(), "technology".into()],
            accounts_per_type: AccountsPerType {
                focused: 3,
                hybrid: 3,
                general: 3,
            },
            tweets_total: 5000,
            time_span: [1_481_587_200_000, 1_483_434_660_000],
            drift_rate: 1.0,
            vocab_size_per_topic: 300,
            shared_vocab_size: 1000,
            seed: 0,
            tweet_length: default_tweet_length(),
            topic_token_share: default_topic_token_share(),
            gold_fraction: default_gold_fraction(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<TopicSet, CorpusError> {
        let bad = |msg: &str| Err(CorpusError::InvalidSynthConfig(msg.to_string()));
        let topics = TopicSet::new(&self.topic_set)
            .map_err(|e| CorpusError::InvalidSynthConfig(e.to_string()))?;
        if self.tweets_total == 0 {
            return bad("tweets_total must be positive");
        }
        if self.time_span[1] <= self.time_span[0] {
            return bad("time_span end must be after start");
        }
        if !(self.drift_rate.is_finite() && self.drift_rate >= 0.0) {
            return bad("drift_rate must be finite and non-negative");
        }
        if self.vocab_size_per_topic == 0 {
            return bad("vocab_size_per_topic must be positive");
        }
        if !(self.topic_token_share > 0.0 && self.topic_token_share <= 1.0) {
            return bad("topic_token_share must lie in (0, 1]");
        }
        if self.shared_vocab_size == 0 && self.topic_token_share < 1.0 {
            return bad("shared_vocab_size must be positive when topic_token_share < 1");
        }
        let [min_len, max_len] = self.tweet_length;
        if min_len == 0 || min_len > max_len {
            return bad("tweet_length must be a non-empty range of positive lengths");
        }
        if !(0.0..1.0).contains(&self.gold_fraction) {
            return bad("gold_fraction must lie in [0, 1)");
        }
        let per = self.accounts_per_type;
        if per.hybrid > 0 && topics.len() < 2 {
            return bad("hybrid accounts need at least two topics");
        }
        if per.focused * topics.len() + per.hybrid + per.general == 0 {
            return bad("at least one account is required");
        }
        Ok(topics)
    }
}

/// A generated corpus plus the hidden per-post topic the generator drew.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// Latent topic of each tweet, aligned with `corpus.tweets()`.
    pub latent_topics: Vec<TopicLabel>,
    /// First timestamp of the gold region.
    pub gold_start_ms: i64,
}

impl SyntheticCorpus {
    /// Hybrid and general posts at or after `gold_start_ms`, with their
    /// latent topic.
    pub fn gold_candidates(&self) -> impl Iterator<Item = (&Tweet, &TopicLabel)> {
        self.corpus
            .tweets()
            .iter()
            .zip(&self.latent_topics)
            .filter(move |(t, _)| {
                t.timestamp >= self.gold_start_ms
                    && self.corpus.account_of(t).stream_type != StreamType::Focused
            })
    }
}

const SYLLABLES: [&str; 16] = [
    "ba", "ko", "mi", "du", "re", "sa", "lu", "ti", "po", "ne", "ga", "fi", "zo", "he", "ru", "ya",
];

/// Fixed-width base-16 syllable spelling of `index`, unique per index.
fn pseudo_word(index: usize, width: usize) -> String {
    let mut digits = vec![0usize; width];
    let mut n = index;
    for slot in digits.iter_mut().rev() {
        *slot = n % SYLLABLES.len();
        n /= SYLLABLES.len();
    }
    digits.iter().map(|&d| SYLLABLES[d]).collect()
}

fn zipf(size: usize) -> WeightedIndex<f64> {
    WeightedIndex::new((0..size).map(|r| 1.0 / (r as f64 + 1.0))).expect("non-empty lexicon")
}

struct Lexicon {
    words: Vec<String>,
    dist: WeightedIndex<f64>,
}

impl Lexicon {
    fn new(words: Vec<String>) -> Self {
        let dist = zipf(words.len());
        Self { words, dist }
    }

    fn draw<'a>(&'a self, rng: &mut ChaCha8Rng) -> &'a str {
        &self.words[self.dist.sample(rng)]
    }
}

struct TopicLexicons {
    start: Lexicon,
    end: Lexicon,
}

/// Generates a corpus; a pure function of `config`.
pub fn generate_synthetic(config: &SynthConfig) -> Result<SyntheticCorpus, CorpusError> {
    let topics = config.validate()?;
    let k = topics.len();
    let v = config.vocab_size_per_topic;

    let total_words = config.shared_vocab_size + 2 * k * v;
    let mut width = 3;
    while SYLLABLES.len().pow(width as u32) < total_words {
        width += 1;
    }
    let shared = (config.shared_vocab_size > 0).then(|| {
        Lexicon::new(
            (0..config.shared_vocab_size)
                .map(|i| pseudo_word(i, width))
                .collect(),
        )
    });
    let lexicons: Vec<TopicLexicons> = (0..k)
        .map(|t| {
            let base = config.shared_vocab_size + 2 * t * v;
            TopicLexicons {
                start: Lexicon::new((0..v).map(|j| pseudo_word(base + j, width)).collect()),
                end: Lexicon::new((0..v).map(|j| pseudo_word(base + v + j, width)).collect()),
            }
        })
        .collect();

    let labels = topics.labels();
    let mut registry = AccountRegistry::new(topics.clone());
    // (handle, topic indices) in registration order
    let mut accounts: Vec<(String, Vec<usize>)> = Vec::new();
    for (t, label) in labels.iter().enumerate() {
        for j in 0..config.accounts_per_type.focused {
            accounts.push((format!("{label}_desk{j}"), vec![t]));
        }
    }
    for j in 0..config.accounts_per_type.hybrid {
        let (a, b) = (j % k, (j + 1) % k);
        accounts.push((format!("mixed_{}_{}_{j}", labels[a], labels[b]), vec![a, b]));
    }
    for j in 0..config.accounts_per_type.general {
        accounts.push((format!("general_{j}"), Vec::new()));
    }
    for (handle, topic_ids) in &accounts {
        let stream_type = match topic_ids.len() {
            0 => StreamType::General,
            1 => StreamType::Focused,
            _ => StreamType::Hybrid,
        };
        let set: BTreeSet<TopicLabel> = topic_ids.iter().map(|&t| labels[t].clone()).collect();
        registry.insert(Account::new(handle.clone(), stream_type, set)?)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let [start, end] = config.time_span;
    let span = (end - start) as f64;
    let [min_len, max_len] = config.tweet_length;

    struct Draft {
        timestamp: i64,
        draw: usize,
        account: usize,
        topic: usize,
        text: String,
    }

    let mut drafts = Vec::with_capacity(config.tweets_total);
    for draw in 0..config.tweets_total {
        let timestamp = rng.random_range(start..end);
        let account = rng.random_range(0..accounts.len());
        let topic_ids = &accounts[account].1;
        let topic = if topic_ids.is_empty() {
            rng.random_range(0..k)
        } else {
            topic_ids[rng.random_range(0..topic_ids.len())]
        };
        let u = (timestamp - start) as f64 / span;
        let end_share = (config.drift_rate * u).min(1.0);
        let len = rng.random_range(min_len..=max_len);
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for _ in 0..len {
            let topical = match &shared {
                Some(_) => rng.random_bool(config.topic_token_share),
                None => true,
            };
            let word = if topical {
                let lex = &lexicons[topic];
                if end_share > 0.0 && rng.random_bool(end_share) {
                    lex.end.draw(&mut rng)
                } else {
                    lex.start.draw(&mut rng)
                }
            } else {
                shared.as_ref().expect("shared lexicon").draw(&mut rng)
            };
            words.push(word);
        }
        let mut text = words.join(" ");
        if let Some(first) = text.get(0..1) {
            let upper = first.to_uppercase();
            text.replace_range(0..1, &upper);
        }
        text.push('.');
        drafts.push(Draft {
            timestamp,
            draw,
            account,
            topic,
            text,
        });
    }
    drafts.sort_by_key(|d| (d.timestamp, d.draw));

    let id_width = config.tweets_total.to_string().len();
    let mut tweets = Vec::with_capacity(drafts.len());
    let mut latent_topics = Vec::with_capacity(drafts.len());
    for (i, d) in drafts.into_iter().enumerate() {
        tweets.push(Tweet {
            id: format!("syn-{:0width$}", i + 1, width = id_width),
            timestamp: d.timestamp,
            account: accounts[d.account].0.clone(),
            text: d.text,
        });
        latent_topics.push(labels[d.topic].clone());
    }
    let corpus = build_corpus(tweets, registry)?;
    let gold_start_ms = end - (config.gold_fraction * span).floor() as i64;
    Ok(SyntheticCorpus {
        corpus,
        latent_topics,
        gold_start_ms,
    })
}
