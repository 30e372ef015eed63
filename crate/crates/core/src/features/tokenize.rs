//! Tweet-aware tokenizer.
//!
//! Lowercases, keeps `@mentions`, `#hashtags` and URLs as single tokens,
//! splits everything else on whitespace and trims punctuation from the ends
//! of each remaining word (internal hyphens and apostrophes survive).

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Lowercase tokens, none empty, none containing whitespace.
pub type TokenList = Vec<String>;

static TOKEN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
        (?P<url>[a-z][a-z0-9+.\-]*://\S+)
        | (?P<mention>@[a-z0-9_]+)
        | (?P<hashtag>\#[\p{L}\p{N}_]+)
        | (?P<word>[^\s@\#]+)
        ",
    )
    .expect("token pattern compiles")
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenizer {
    pub keep_mentions: bool,
    pub keep_urls: bool,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self {
            keep_mentions: true,
            keep_urls: true,
        }
    }
}

impl Tokenizer {
    pub fn tokenize(&self, text: &str) -> TokenList {
        let lower = text.to_lowercase();
        let mut tokens = Vec::new();
        for caps in TOKEN.captures_iter(&lower) {
            if let Some(m) = caps.name("url") {
                if self.keep_urls {
                    tokens.push(m.as_str().to_string());
                }
            } else if let Some(m) = caps.name("mention") {
                if self.keep_mentions {
                    tokens.push(m.as_str().to_string());
                }
            } else if let Some(m) = caps.name("hashtag") {
                tokens.push(m.as_str().to_string());
            } else if let Some(m) = caps.name("word") {
                let word = m.as_str().trim_matches(|c: char| !c.is_alphanumeric());
                if !word.is_empty() {
                    tokens.push(word.to_string());
                }
            }
        }
        tokens
    }
}

/// Tokenizes with the default settings (mentions and URLs kept).
pub fn tokenize(text: &str) -> TokenList {
    Tokenizer::default().tokenize(text)
}
