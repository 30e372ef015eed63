//! Shared fixtures for the criterion benchmarks under `benches/`.

use curated_core::corpus::{generate_synthetic, SynthConfig, SyntheticCorpus};
use curated_core::features::{tokenize, TokenList};

/// Default synthetic corpus of `tweets` posts.
pub fn corpus(tweets: usize) -> SyntheticCorpus {
    generate_synthetic(&SynthConfig {
        tweets_total: tweets,
        seed: 1,
        ..SynthConfig::default()
    })
    .expect("default config is valid")
}

pub fn token_lists(synth: &SyntheticCorpus) -> Vec<TokenList> {
    synth
        .corpus
        .tweets()
        .iter()
        .map(|t| tokenize(&t.text))
        .collect()
}
