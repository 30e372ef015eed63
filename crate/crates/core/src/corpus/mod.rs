//! Posts, accounts and chronologically ordered corpora.
//!
//! A [`Corpus`] is the immutable starting point of every pipeline: a list of
//! [`Tweet`]s sorted by `(timestamp, id)` plus the [`AccountRegistry`] that
//! says which stream type each account is and which topics it covers.

mod synth;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub use synth::{generate_synthetic, AccountsPerType, SynthConfig, SyntheticCorpus};

/// Topics used when no explicit topic set is configured.
pub const DEFAULT_TOPICS: [&str; 7] = [
    "politics",
    "business",
    "health",
    "sports",
    "science",
    "technology",
    "entertainment",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed account registry {path}: {source}")]
    RegistryFormat {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("unknown topic '{0}'")]
    UnknownTopic(String),
    #[error("invalid topic set: {0}")]
    InvalidTopicSet(String),
    #[error("account '{handle}': {stream_type} stream cannot have {count} topic(s)")]
    Taxonomy {
        handle: String,
        stream_type: StreamType,
        count: usize,
    },
    #[error("duplicate account handle '{0}'")]
    DuplicateHandle(String),
    #[error("tweets reference unregistered account(s): {}", .0.join(", "))]
    UnresolvedAccounts(Vec<String>),
    #[error("duplicate tweet id '{0}'")]
    DuplicateTweetId(String),
    #[error("invalid synthetic config: {0}")]
    InvalidSynthConfig(String),
}

/// A topic name drawn from a [`TopicSet`]. Always stored lowercase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicLabel(String);

impl TopicLabel {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TopicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The closed set of topics a pipeline works with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicSet {
    labels: Vec<TopicLabel>,
}

impl TopicSet {
    pub fn new<I, S>(names: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut labels = Vec::new();
        for name in names {
            let name = name.as_ref().trim().to_lowercase();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(CorpusError::InvalidTopicSet(format!(
                    "bad topic name '{name}'"
                )));
            }
            if name == "other" {
                return Err(CorpusError::InvalidTopicSet(
                    "'other' is reserved for gold judgments".into(),
                ));
            }
            let label = TopicLabel(name);
            if labels.contains(&label) {
                return Err(CorpusError::InvalidTopicSet(format!(
                    "duplicate topic '{label}'"
                )));
            }
            labels.push(label);
        }
        if labels.is_empty() {
            return Err(CorpusError::InvalidTopicSet("no topics".into()));
        }
        Ok(Self { labels })
    }

    /// Resolves `name` case-insensitively.
    pub fn label(&self, name: &str) -> Result<TopicLabel, CorpusError> {
        let wanted = name.trim().to_lowercase();
        self.labels
            .iter()
            .find(|l| l.0 == wanted)
            .cloned()
            .ok_or_else(|| CorpusError::UnknownTopic(name.to_string()))
    }

    pub fn contains(&self, label: &TopicLabel) -> bool {
        self.labels.contains(label)
    }

    pub fn labels(&self) -> &[TopicLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl Default for TopicSet {
    fn default() -> Self {
        Self::new(DEFAULT_TOPICS).expect("default topics are valid")
    }
}

/// One timestamped post from a named stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    /// Milliseconds since the Unix epoch, UTC.
    #[serde(rename = "created_at")]
    pub timestamp: i64,
    pub account: String,
    pub text: String,
}

impl Tweet {
    fn order_key(&self) -> (i64, &str) {
        (self.timestamp, &self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamType {
    Focused,
    Hybrid,
    General,
}

impl fmt::Display for StreamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamType::Focused => "focused",
            StreamType::Hybrid => "hybrid",
            StreamType::General => "general",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Account {
    pub handle: String,
    pub stream_type: StreamType,
    pub topics: BTreeSet<TopicLabel>,
}

impl Account {
    /// Builds an account, enforcing the stream taxonomy: focused accounts
    /// have exactly one topic, hybrid at least two, general none.
    pub fn new(
        handle: impl Into<String>,
        stream_type: StreamType,
        topics: BTreeSet<TopicLabel>,
    ) -> Result<Self, CorpusError> {
        let handle = handle.into();
        let count = topics.len();
        let ok = match stream_type {
            StreamType::Focused => count == 1,
            StreamType::Hybrid => count >= 2,
            StreamType::General => count == 0,
        };
        if !ok {
            return Err(CorpusError::Taxonomy {
                handle,
                stream_type,
                count,
            });
        }
        Ok(Self {
            handle,
            stream_type,
            topics,
        })
    }

    /// The single topic of a focused account.
    pub fn focus(&self) -> Option<&TopicLabel> {
        match self.stream_type {
            StreamType::Focused => self.topics.iter().next(),
            _ => None,
        }
    }
}

/// Accounts keyed by handle, together with the topic set they were
/// validated against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountRegistry {
    topics: TopicSet,
    accounts: BTreeMap<String, Account>,
}

#[derive(Deserialize)]
struct RawAccount {
    handle: String,
    stream_type: StreamType,
    topics: Vec<String>,
}

impl AccountRegistry {
    pub fn new(topics: TopicSet) -> Self {
        Self {
            topics,
            accounts: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, account: Account) -> Result<(), CorpusError> {
        if let Some(t) = account.topics.iter().find(|t| !self.topics.contains(t)) {
            return Err(CorpusError::UnknownTopic(t.to_string()));
        }
        if self.accounts.contains_key(&account.handle) {
            return Err(CorpusError::DuplicateHandle(account.handle));
        }
        self.accounts.insert(account.handle.clone(), account);
        Ok(())
    }

    /// Parses the registry JSON array format.
    pub fn from_json(text: &str, topics: TopicSet) -> Result<Self, RegistryParseError> {
        let raw: Vec<RawAccount> = serde_json::from_str(text).map_err(RegistryParseError::Json)?;
        let mut registry = Self::new(topics);
        for entry in raw {
            let labels = entry
                .topics
                .iter()
                .map(|name| registry.topics.label(name))
                .collect::<Result<Vec<_>, _>>()
                .map_err(RegistryParseError::Invalid)?;
            let set: BTreeSet<TopicLabel> = labels.iter().cloned().collect();
            if set.len() != labels.len() {
                return Err(RegistryParseError::Invalid(CorpusError::Taxonomy {
                    handle: entry.handle,
                    stream_type: entry.stream_type,
                    count: labels.len(),
                }));
            }
            let account = Account::new(entry.handle, entry.stream_type, set)
                .map_err(RegistryParseError::Invalid)?;
            registry
                .insert(account)
                .map_err(RegistryParseError::Invalid)?;
        }
        Ok(registry)
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<&Account> = self.accounts.values().collect();
        serde_json::to_string_pretty(&entries).expect("accounts serialize")
    }

    pub fn get(&self, handle: &str) -> Option<&Account> {
        self.accounts.get(handle)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn len(&self) -> usize {
        self.accounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }

    pub fn topics(&self) -> &TopicSet {
        &self.topics
    }
}

#[derive(Debug, Error)]
pub enum RegistryParseError {
    #[error(transparent)]
    Json(serde_json::Error),
    #[error(transparent)]
    Invalid(CorpusError),
}

/// A problem with one line of a JSON-lines file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Result of loading a tweet file: records in file order plus every
/// malformed line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TweetBatch {
    pub tweets: Vec<Tweet>,
    pub errors: Vec<RecordError>,
}

pub fn load_tweets(path: impl AsRef<Path>) -> Result<TweetBatch, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_tweets(BufReader::new(file)).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads JSON-lines tweets. Blank lines are skipped; any other line that is
/// not a valid record becomes a [`RecordError`].
pub fn read_tweets(reader: impl BufRead) -> std::io::Result<TweetBatch> {
    let mut batch = TweetBatch::default();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_tweet(&line) {
            Ok(tweet) => batch.tweets.push(tweet),
            Err(reason) => batch.errors.push(RecordError {
                line: index + 1,
                reason,
            }),
        }
    }
    Ok(batch)
}

pub(crate) fn required_str<'a>(
    obj: &'a serde_json::Map<String, Value>,
    field: &str,
) -> Result<&'a str, String> {
    match obj.get(field) {
        None => Err(format!("missing required field '{field}'")),
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(format!("field '{field}' must be a string")),
    }
}

pub(crate) fn required_i64(
    obj: &serde_json::Map<String, Value>,
    field: &str,
) -> Result<i64, String> {
    match obj.get(field) {
        None => Err(format!("missing required field '{field}'")),
        Some(v) => v
            .as_i64()
            .ok_or_else(|| format!("field '{field}' must be an integer")),
    }
}

pub(crate) fn parse_tweet_object(obj: &serde_json::Map<String, Value>) -> Result<Tweet, String> {
    let id = required_str(obj, "id")?;
    let timestamp = required_i64(obj, "created_at")?;
    let account = required_str(obj, "account")?;
    let text = required_str(obj, "text")?;
    if id.is_empty() {
        return Err("field 'id' must be non-empty".into());
    }
    if text.trim().is_empty() {
        return Err("field 'text' must be non-empty".into());
    }
    Ok(Tweet {
        id: id.to_string(),
        timestamp,
        account: account.to_string(),
        text: text.to_string(),
    })
}

fn parse_tweet(line: &str) -> Result<Tweet, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| "record must be a JSON object".to_string())?;
    parse_tweet_object(obj)
}

pub fn write_tweets(path: impl AsRef<Path>, tweets: &[Tweet]) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let wrap = |source| CorpusError::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(wrap)?;
    let mut out = BufWriter::new(file);
    write_tweets_to(&mut out, tweets).map_err(wrap)?;
    out.flush().map_err(wrap)
}

pub fn write_tweets_to(out: &mut impl Write, tweets: &[Tweet]) -> std::io::Result<()> {
    for tweet in tweets {
        serde_json::to_writer(&mut *out, tweet)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn load_accounts(
    path: impl AsRef<Path>,
    topics: &TopicSet,
) -> Result<AccountRegistry, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    AccountRegistry::from_json(&text, topics.clone()).map_err(|e| match e {
        RegistryParseError::Json(source) => CorpusError::RegistryFormat {
            path: path.to_path_buf(),
            source,
        },
        RegistryParseError::Invalid(inner) => inner,
    })
}

/// Tweets sorted by `(timestamp, id)` with every author registered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    registry: AccountRegistry,
}

/// Validates references and ids, then sorts chronologically.
pub fn build_corpus(
    mut tweets: Vec<Tweet>,
    registry: AccountRegistry,
) -> Result<Corpus, CorpusError> {
    let unresolved: BTreeSet<&str> = tweets
        .iter()
        .filter(|t| registry.get(&t.account).is_none())
        .map(|t| t.account.as_str())
        .collect();
    if !unresolved.is_empty() {
        return Err(CorpusError::UnresolvedAccounts(
            unresolved.into_iter().map(str::to_string).collect(),
        ));
    }
    let mut seen = HashSet::with_capacity(tweets.len());
    for tweet in &tweets {
        if !seen.insert(tweet.id.as_str()) {
            return Err(CorpusError::DuplicateTweetId(tweet.id.clone()));
        }
    }
    tweets.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    Ok(Corpus { tweets, registry })
}

impl Corpus {
    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn registry(&self) -> &AccountRegistry {
        &self.registry
    }

    pub fn topics(&self) -> &TopicSet {
        self.registry.topics()
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Account that posted `tweet`. Always resolvable for tweets of this
    /// corpus.
    pub fn account_of(&self, tweet: &Tweet) -> &Account {
        self.registry
            .get(&tweet.account)
            .expect("corpus tweets reference registered accounts")
    }

    /// Sub-corpus of the tweets in `range` (by chronological position).
    pub fn slice(&self, range: std::ops::Range<usize>) -> Corpus {
        Corpus {
            tweets: self.tweets[range].to_vec(),
            registry: self.registry.clone(),
        }
    }

    /// Sub-corpus of the tweets strictly older than `timestamp`.
    pub fn before(&self, timestamp: i64) -> Corpus {
        let end = self.tweets.partition_point(|t| t.timestamp < timestamp);
        self.slice(0..end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopicStats {
    pub topic: TopicLabel,
    /// Accounts mapped to the topic; hybrid accounts count once per topic.
    pub accounts: usize,
    /// Tweets from accounts mapped to the topic.
    pub tweets: usize,
    /// Tweets from focused accounts of the topic.
    pub focused_tweets: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub rows: Vec<TopicStats>,
    pub general_accounts: usize,
    pub general_tweets: usize,
    pub total_accounts: usize,
    pub total_tweets: usize,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let topics = corpus.topics();
    let mut rows: Vec<TopicStats> = topics
        .labels()
        .iter()
        .map(|topic| TopicStats {
            topic: topic.clone(),
            accounts: 0,
            tweets: 0,
            focused_tweets: 0,
        })
        .collect();
    let position = |label: &TopicLabel| topics.labels().iter().position(|l| l == label);

    let mut general_accounts = 0;
    for account in corpus.registry.iter() {
        if account.stream_type == StreamType::General {
            general_accounts += 1;
        }
        for topic in &account.topics {
            if let Some(i) = position(topic) {
                rows[i].accounts += 1;
            }
        }
    }
    let mut general_tweets = 0;
    for tweet in &corpus.tweets {
        let account = corpus.account_of(tweet);
        if account.stream_type == StreamType::General {
            general_tweets += 1;
        }
        for topic in &account.topics {
            if let Some(i) = position(topic) {
                rows[i].tweets += 1;
                if account.stream_type == StreamType::Focused {
                    rows[i].focused_tweets += 1;
                }
            }
        }
    }
    CorpusStats {
        rows,
        general_accounts,
        general_tweets,
        total_accounts: corpus.registry.len(),
        total_tweets: corpus.tweets.len(),
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>9} {:>9} {:>9}",
            "topic", "accounts", "tweets", "focused"
        )?;
        writeln!(
            f,
            "{:<16} {:>9} {:>9} {:>9}",
            "general", self.general_accounts, self.general_tweets, "-"
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "{:<16} {:>9} {:>9} {:>9}",
                row.topic.as_str(),
                row.accounts,
                row.tweets,
                row.focused_tweets
            )?;
        }
        write!(
            f,
            "{:<16} {:>9} {:>9} {:>9}",
            "total", self.total_accounts, self.total_tweets, "-"
        )
    }
}
