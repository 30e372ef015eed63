//! `curated`: validate corpora, synthesize data, train and apply topic
//! classifiers, and run the chronological experiments.

mod commands;
mod failure;
mod model_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curated_core::corpus::{TopicSet, DEFAULT_TOPICS};

use failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "curated",
    version,
    about = "Topic classification of curated post streams"
)]
struct Cli {
    /// Comma-separated topic set used to interpret registries and gold files.
    #[arg(long, global = true, value_delimiter = ',')]
    topic_set: Option<Vec<String>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a corpus, print its per-topic summary and list malformed records.
    Validate(CorpusArgs),
    /// Generate a synthetic corpus, registry and gold file from a config.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; receives tweets.jsonl, accounts.json, gold.jsonl.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train per-topic logistic regression or a multi-class naive Bayes model.
    Train(TrainArgs),
    /// Tag each tweet with per-topic scores and decisions as JSON lines.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a growing, sliding or weighting experiment and write the results CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Gold judgments, required for `"eval": "gold"`.
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Print the best and worst window per experiment and topic.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long)]
    tweets: PathBuf,
    #[arg(long)]
    accounts: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Lr,
    Nb,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// A topic name, or `all`.
    #[arg(long)]
    topic: String,
    #[arg(long, value_enum, default_value = "lr")]
    model: ModelKind,
    /// Recency weighting; 1 trains unweighted.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long)]
    out: PathBuf,
    /// Seed for negative sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn topic_set(names: Option<Vec<String>>) -> Result<TopicSet, Failure> {
    match names {
        None => TopicSet::new(DEFAULT_TOPICS).map_err(Failure::runtime),
        Some(names) => TopicSet::new(names).map_err(Failure::usage),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let topics = topic_set(cli.topic_set)?;
    match cli.command {
        Command::Validate(args) => commands::validate(&args.tweets, &args.accounts, &topics),
        Command::Synth { config, out } => commands::synth(&config, &out),
        Command::Train(args) => commands::train(&args, &topics),
        Command::Classify { model, tweets, out } => {
            commands::classify(&model, &tweets, out.as_deref())
        }
        Command::Experiment {
            config,
            out,
            corpus,
            gold,
        } => commands::experiment(&config, &out, &corpus, gold.as_deref(), &topics),
        Command::Report { input } => commands::report(&input),
    }
}

/// The error chain joined by ": ", skipping causes that an outer message
/// already quotes.
fn describe(error: &anyhow::Error) -> String {
    let mut text = String::new();
    for cause in error.chain() {
        let part = cause.to_string();
        if !text.contains(&part) {
            if !text.is_empty() {
                text.push_str(": ");
            }
            text.push_str(&part);
        }
    }
    text
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let _ = e.print();
            return if informational {
                eprintln!("curated: ok");
                ExitCode::SUCCESS
            } else {
                eprintln!("curated: usage error");
                ExitCode::from(Failure::USAGE)
            };
        }
    };
    match run(cli) {
        Ok(summary) => {
            eprintln!("curated: ok: {summary}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("curated: error: {}", describe(&failure.error));
            ExitCode::from(failure.code)
        }
    }
}
