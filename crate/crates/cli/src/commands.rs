use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context as _;
use curated_core::classifiers::{nb_predict, train_nb, ClassifierError};
use curated_core::corpus::{
    build_corpus, corpus_stats, generate_synthetic, load_accounts, load_tweets, write_tweets,
    Corpus, RecordError, SynthConfig, TopicLabel, TopicSet,
};
use curated_core::features::{fit, Tokenizer};
use curated_core::harness::{
    export_results, read_results, recency_weights, run_config, train_topic_classifier,
    trainable_topics, ExperimentConfig, ExperimentSettings, HarnessError, RecencyWeightSpec,
    ResultRow,
};
use curated_core::supervision::{
    build_binary_dataset, build_multiclass_dataset, gold_from_synthetic, load_gold, write_gold,
    NegativeSamplingConfig, Target,
};
use serde::Serialize;

use crate::failure::{data_msg, usage_msg, Failure};
use crate::model_file::{ModelFile, ModelTag, NbBundle};
use crate::{CorpusArgs, ModelKind, TrainArgs};

const NB_ALPHA: f64 = 1.0;

fn warn_records(path: &Path, errors: &[RecordError]) {
    for e in errors {
        eprintln!("warning: {}: {e}", path.display());
    }
}

/// Loads and cross-checks a tweet file and a registry. Malformed tweet lines
/// are returned rather than treated as fatal.
fn load_corpus(
    tweets: &Path,
    accounts: &Path,
    topics: &TopicSet,
) -> Result<(Corpus, Vec<RecordError>), Failure> {
    let batch = load_tweets(tweets).map_err(Failure::data)?;
    let registry = load_accounts(accounts, topics).map_err(Failure::data)?;
    let corpus = build_corpus(batch.tweets, registry).map_err(Failure::data)?;
    Ok((corpus, batch.errors))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::runtime)
}

pub fn validate(tweets: &Path, accounts: &Path, topics: &TopicSet) -> Result<String, Failure> {
    let (corpus, errors) = load_corpus(tweets, accounts, topics)?;
    println!("{}", corpus_stats(&corpus));
    if !errors.is_empty() {
        println!();
        println!(
            "{} malformed record(s) in {}:",
            errors.len(),
            tweets.display()
        );
        for e in &errors {
            println!("  {e}");
        }
    }
    Ok(format!(
        "{} tweets, {} accounts, {} malformed record(s)",
        corpus.len(),
        corpus.registry().len(),
        errors.len()
    ))
}

pub fn synth(config: &Path, out: &Path) -> Result<String, Failure> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("cannot read {}", config.display()))
        .map_err(Failure::data)?;
    let config: SynthConfig = serde_json::from_str(&text)
        .with_context(|| format!("invalid synthetic config {}", config.display()))
        .map_err(Failure::data)?;
    let synth = generate_synthetic(&config).map_err(Failure::data)?;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(Failure::runtime)?;
    write_tweets(out.join("tweets.jsonl"), synth.corpus.tweets()).map_err(Failure::runtime)?;
    write_file(
        &out.join("accounts.json"),
        &(synth.corpus.registry().to_json() + "\n"),
    )?;
    let gold = gold_from_synthetic(&synth);
    let gold_path = out.join("gold.jsonl");
    write_gold(&gold_path, &gold)
        .with_context(|| format!("cannot write {}", gold_path.display()))
        .map_err(Failure::runtime)?;
    Ok(format!(
        "wrote {} tweets, {} accounts, {} gold judgments to {}",
        synth.corpus.len(),
        synth.corpus.registry().len(),
        gold.len(),
        out.display()
    ))
}

fn resolve_topics(corpus: &Corpus, topic: &str) -> Result<Vec<TopicLabel>, Failure> {
    let trainable = trainable_topics(corpus);
    if topic == "all" {
        if trainable.is_empty() {
            return Err(data_msg("no topic has a focused account"));
        }
        return Ok(trainable);
    }
    let label = corpus.topics().label(topic).map_err(Failure::usage)?;
    if !trainable.contains(&label) {
        return Err(data_msg(format!(
            "topic '{label}' has no focused account to draw training examples from"
        )));
    }
    Ok(vec![label])
}

pub fn train(args: &TrainArgs, topics: &TopicSet) -> Result<String, Failure> {
    if !(args.p.is_finite() && args.p >= 1.0) {
        return Err(usage_msg(format!("--p must be at least 1, got {}", args.p)));
    }
    if args.model == ModelKind::Nb {
        if args.topic != "all" {
            return Err(usage_msg(
                "naive Bayes is multi-class only; use --topic all",
            ));
        }
        if args.p != 1.0 {
            return Err(usage_msg("naive Bayes does not support recency weighting"));
        }
    }
    let (corpus, errors) = load_corpus(&args.corpus.tweets, &args.corpus.accounts, topics)?;
    warn_records(&args.corpus.tweets, &errors);
    let selected = resolve_topics(&corpus, &args.topic)?;

    let file = match args.model {
        ModelKind::Lr => ModelFile {
            model: ModelTag::Lr,
            classifiers: Some(train_lr(&corpus, &selected, args)?),
            nb: None,
        },
        ModelKind::Nb => ModelFile {
            model: ModelTag::Nb,
            classifiers: None,
            nb: Some(train_naive_bayes(&corpus)?),
        },
    };
    let json = serde_json::to_string_pretty(&file)
        .context("cannot serialize model")
        .map_err(Failure::runtime)?;
    write_file(&args.out, &(json + "\n"))?;
    Ok(format!(
        "trained {} model for {} topic(s), written to {}",
        match args.model {
            ModelKind::Lr => "lr",
            ModelKind::Nb => "nb",
        },
        selected.len(),
        args.out.display()
    ))
}

fn train_lr(
    corpus: &Corpus,
    topics: &[TopicLabel],
    args: &TrainArgs,
) -> Result<Vec<curated_core::harness::TopicClassifier>, Failure> {
    let settings = ExperimentSettings {
        negatives: NegativeSamplingConfig {
            seed: args.seed,
            ..NegativeSamplingConfig::default()
        },
        ..ExperimentSettings::default()
    };
    let mut classifiers = Vec::with_capacity(topics.len());
    for topic in topics {
        let dataset =
            build_binary_dataset(corpus, topic, &settings.negatives).map_err(Failure::data)?;
        let tokens: Vec<_> = dataset
            .examples
            .iter()
            .map(|e| settings.tokenizer.tokenize(&e.text))
            .collect();
        let weights = recency_weights(dataset.len(), RecencyWeightSpec { p: args.p })
            .map_err(Failure::usage)?;
        let classifier = train_topic_classifier(topic, &dataset, &tokens, &weights, &settings)
            .map_err(Failure::runtime)?
            .ok_or_else(|| {
                data_msg(format!(
                    "topic '{topic}' has no negative examples or no usable tokens"
                ))
            })?;
        classifiers.push(classifier);
    }
    Ok(classifiers)
}

fn train_naive_bayes(corpus: &Corpus) -> Result<NbBundle, Failure> {
    let tokenizer = Tokenizer::default();
    let dataset = build_multiclass_dataset(corpus);
    let tokens: Vec<_> = dataset
        .examples
        .iter()
        .map(|e| tokenizer.tokenize(&e.text))
        .collect();
    let vocabulary = fit(&tokens, 1).map_err(Failure::data)?;
    let examples: Vec<_> = dataset
        .examples
        .iter()
        .zip(&tokens)
        .map(|(e, t)| match &e.target {
            Target::Topic(label) => (vocabulary.counts(t), label.clone()),
            Target::Binary(_) => unreachable!("multi-class dataset"),
        })
        .collect();
    let naive_bayes = train_nb(&examples, vocabulary.dim(), NB_ALPHA).map_err(|e| match e {
        ClassifierError::TooFewClasses(_) => Failure::data(e),
        other => Failure::runtime(other),
    })?;
    Ok(NbBundle {
        tokenizer,
        vocabulary,
        naive_bayes,
    })
}

/// `Ok(true)` when the reader of our output has gone away.
fn stop_writing(result: io::Result<()>) -> Result<bool, Failure> {
    match result {
        Ok(()) => Ok(false),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(true),
        Err(e) => Err(Failure::runtime(
            anyhow::Error::new(e).context("cannot write output"),
        )),
    }
}

#[derive(Serialize)]
struct Tagged<'a> {
    id: &'a str,
    topic_scores: BTreeMap<String, f64>,
    topics: Vec<String>,
}

pub fn classify(model: &Path, tweets: &Path, out: Option<&Path>) -> Result<String, Failure> {
    let text = fs::read_to_string(model)
        .with_context(|| format!("cannot read {}", model.display()))
        .map_err(Failure::data)?;
    let file: ModelFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed model file {}", model.display()))
        .map_err(Failure::data)?;
    let batch = load_tweets(tweets).map_err(Failure::data)?;
    warn_records(tweets, &batch.errors);

    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(
            fs::File::create(path)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::runtime)?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    for tweet in &batch.tweets {
        let mut tagged = Tagged {
            id: &tweet.id,
            topic_scores: BTreeMap::new(),
            topics: Vec::new(),
        };
        match (file.model, &file.classifiers, &file.nb) {
            (ModelTag::Lr, Some(classifiers), _) => {
                for c in classifiers {
                    let (p, yes) = c.predict(&tweet.text).map_err(Failure::data)?;
                    tagged.topic_scores.insert(c.topic.to_string(), p);
                    if yes {
                        tagged.topics.push(c.topic.to_string());
                    }
                }
            }
            (ModelTag::Nb, _, Some(nb)) => {
                let counts = nb.vocabulary.counts(&nb.tokenizer.tokenize(&tweet.text));
                let pred = nb_predict(&nb.naive_bayes, &counts).map_err(Failure::data)?;
                for (label, log_p) in &pred.log_posteriors {
                    tagged.topic_scores.insert(label.to_string(), log_p.exp());
                }
                tagged.topics.push(pred.label.to_string());
            }
            _ => {
                return Err(data_msg(
                    "model file lacks the parameters its kind requires",
                ))
            }
        }
        let written = serde_json::to_writer(&mut sink, &tagged)
            .map_err(io::Error::from)
            .and_then(|()| sink.write_all(b"\n"));
        if stop_writing(written)? {
            return Ok("output closed early".into());
        }
    }
    if stop_writing(sink.flush())? {
        return Ok("output closed early".into());
    }
    Ok(format!("classified {} tweets", batch.tweets.len()))
}

fn harness_failure(e: HarnessError) -> Failure {
    match e {
        HarnessError::Config(_) | HarnessError::InvalidWindow(_) | HarnessError::InvalidP(_) => {
            Failure::usage(e)
        }
        HarnessError::Classifier(_) | HarnessError::Feature(_) | HarnessError::Csv { .. } => {
            Failure::runtime(e)
        }
        _ => Failure::data(e),
    }
}

pub fn experiment(
    config: &Path,
    out: &Path,
    corpus_args: &CorpusArgs,
    gold: Option<&Path>,
    topics: &TopicSet,
) -> Result<String, Failure> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("cannot read {}", config.display()))
        .map_err(Failure::usage)?;
    let config = ExperimentConfig::from_json(&text).map_err(Failure::usage)?;
    let (corpus, errors) = load_corpus(&corpus_args.tweets, &corpus_args.accounts, topics)?;
    warn_records(&corpus_args.tweets, &errors);
    let gold = gold
        .map(|path| load_gold(path, topics).map_err(Failure::data))
        .transpose()?;
    let output = run_config(&corpus, &config, gold, &ExperimentSettings::default())
        .map_err(harness_failure)?;
    for cell in &output.absent {
        eprintln!(
            "warning: {} window for '{}' at start {:.6}, size {:.6} not trained: {}",
            cell.experiment, cell.topic, cell.window_start_frac, cell.window_size_frac, cell.reason
        );
    }
    if output.rows.is_empty() {
        return Err(data_msg("no window could be trained"));
    }
    export_results(&output.rows, out).map_err(harness_failure)?;
    Ok(format!(
        "wrote {} result rows to {}",
        output.rows.len(),
        out.display()
    ))
}

pub fn report(input: &Path) -> Result<String, Failure> {
    let rows = read_results(input).map_err(Failure::data)?;
    if rows.is_empty() {
        return Err(data_msg(format!("{} has no result rows", input.display())));
    }
    // (experiment, topic) groups in first-seen order
    let mut groups: Vec<((&str, &str), Vec<&ResultRow>)> = Vec::new();
    for row in &rows {
        let key = (row.experiment.as_str(), row.topic.as_str());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    println!(
        "{:<22} {:<16} {:>7} {:>20} {:>20}",
        "experiment", "topic", "windows", "best (start/size f1)", "worst (start/size f1)"
    );
    for ((experiment, topic), members) in &groups {
        // ties keep the earliest window
        let mut best = members[0];
        let mut worst = members[0];
        for row in &members[1..] {
            if row.f1 > best.f1 {
                best = row;
            }
            if row.f1 < worst.f1 {
                worst = row;
            }
        }
        let cell = |r: &ResultRow| {
            format!(
                "{:.2}/{:.2} {:.4}",
                r.window_start_frac, r.window_size_frac, r.f1
            )
        };
        println!(
            "{:<22} {:<16} {:>7} {:>20} {:>20}",
            experiment,
            topic,
            members.len(),
            cell(best),
            cell(worst)
        );
    }
    Ok(format!("{} rows in {} groups", rows.len(), groups.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harness_errors_map_to_exit_codes() {
        let leak = HarnessError::TemporalLeakage {
            topic: "sports".into(),
            max_train: 2,
            min_test: 1,
        };
        assert_eq!(harness_failure(leak).code, Failure::DATA);
        assert_eq!(
            harness_failure(HarnessError::Config("x".into())).code,
            Failure::USAGE
        );
        assert_eq!(
            harness_failure(HarnessError::InvalidP(0.5)).code,
            Failure::USAGE
        );
        assert_eq!(harness_failure(HarnessError::EmptyGold).code, Failure::DATA);
    }
}
