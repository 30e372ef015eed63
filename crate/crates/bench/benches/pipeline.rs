use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use curated_bench::{corpus, token_lists};
use curated_core::classifiers::{train_logistic, train_nb, LogisticTrainConfig, TrainingExample};
use curated_core::features::{fit, tokenize};
use curated_core::harness::{run_growing_window, EvalTarget, ExperimentSettings};
use curated_core::supervision::{
    build_binary_dataset, build_multiclass_dataset, NegativeSamplingConfig, Target,
};

fn features(c: &mut Criterion) {
    let synth = corpus(5000);
    let texts: Vec<&str> = synth
        .corpus
        .tweets()
        .iter()
        .map(|t| t.text.as_str())
        .collect();
    let docs = token_lists(&synth);
    let model = fit(&docs, 1).unwrap();

    c.bench_function("tokenize 5000 posts", |b| {
        b.iter(|| {
            texts
                .iter()
                .map(|t| tokenize(black_box(t)).len())
                .sum::<usize>()
        })
    });
    c.bench_function("tfidf fit 5000 docs", |b| {
        b.iter(|| fit(black_box(&docs), 1).unwrap())
    });
    c.bench_function("tfidf transform 5000 docs", |b| {
        b.iter(|| {
            docs.iter()
                .map(|d| model.transform(black_box(d)).nnz())
                .sum::<usize>()
        })
    });
}

fn classifiers(c: &mut Criterion) {
    let synth = corpus(5000);
    let topic = synth.corpus.topics().labels()[0].clone();
    let data =
        build_binary_dataset(&synth.corpus, &topic, &NegativeSamplingConfig::default()).unwrap();
    let docs: Vec<_> = data.examples.iter().map(|e| tokenize(&e.text)).collect();
    let tfidf = fit(&docs, 1).unwrap();
    let examples: Vec<TrainingExample> = data
        .examples
        .iter()
        .zip(&docs)
        .map(|(e, d)| TrainingExample {
            features: tfidf.transform(d),
            label: e.is_positive(),
            weight: 1.0,
        })
        .collect();
    let config = LogisticTrainConfig::default();
    c.bench_function("train logistic, one topic", |b| {
        b.iter(|| train_logistic(black_box(&examples), tfidf.dim(), &config).unwrap())
    });

    let multi = build_multiclass_dataset(&synth.corpus);
    let docs: Vec<_> = multi.examples.iter().map(|e| tokenize(&e.text)).collect();
    let vocab = fit(&docs, 1).unwrap();
    let counted: Vec<_> = multi
        .examples
        .iter()
        .zip(&docs)
        .map(|(e, d)| match &e.target {
            Target::Topic(label) => (vocab.counts(d), label.clone()),
            Target::Binary(_) => unreachable!(),
        })
        .collect();
    c.bench_function("train naive bayes", |b| {
        b.iter(|| train_nb(black_box(&counted), vocab.dim(), 1.0).unwrap())
    });
}

fn experiments(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiments");
    group.sample_size(10);
    let synth = corpus(5000);
    let topics = synth.corpus.topics().labels().to_vec();
    let settings = ExperimentSettings::default();
    group.bench_function("growing window, 5 sizes x 3 topics", |b| {
        b.iter(|| {
            run_growing_window(
                &synth.corpus,
                &topics,
                &[0.2, 0.4, 0.6, 0.8, 1.0],
                &EvalTarget::NoisySplit,
                &settings,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, features, classifiers, experiments);
criterion_main!(benches);
