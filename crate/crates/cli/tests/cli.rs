use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_curated");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn status_line(out: &Output) -> String {
    stderr(out).lines().last().unwrap_or_default().to_string()
}

const SYNTH: &str = r#"{
  "topic_set": ["politics", "sports", "technology"],
  "accounts_per_type": {"focused": 2, "hybrid": 2, "general": 1},
  "tweets_total": 1200,
  "time_span": [1481587200000, 1483434660000],
  "drift_rate": 1.0,
  "vocab_size_per_topic": 150,
  "shared_vocab_size": 400,
  "seed": 11
}"#;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("synth.json"), SYNTH).unwrap();
        let out = run(&[
            "synth",
            "--config",
            dir.path().join("synth.json").to_str().unwrap(),
            "--out",
            dir.path().join("data").to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn corpus_args(&self) -> Vec<String> {
        vec![
            "--tweets".into(),
            self.arg("data/tweets.jsonl"),
            "--accounts".into(),
            self.arg("data/accounts.json"),
        ]
    }

    fn run(&self, head: &[&str], tail: &[&str]) -> Output {
        let corpus = self.corpus_args();
        let mut args: Vec<&str> = head.to_vec();
        args.extend(corpus.iter().map(String::as_str));
        args.extend_from_slice(tail);
        run(&args)
    }
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap()
}

#[test]
fn validate_synthetic_output() {
    let fx = Fixture::new();
    let out = fx.run(&["validate"], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(table.contains("politics"));
    assert!(table
        .lines()
        .any(|l| l.starts_with("total") && l.contains("1200")));
    assert!(status_line(&out).starts_with("curated: ok"));
}

#[test]
fn validate_rejects_bad_focused_entry() {
    let dir = tempfile::tempdir().unwrap();
    let tweets = dir.path().join("t.jsonl");
    let accounts = dir.path().join("a.json");
    fs::write(&tweets, "").unwrap();
    fs::write(
        &accounts,
        r#"[{"handle":"X","stream_type":"focused","topics":["sports","health"]}]"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--tweets",
        tweets.to_str().unwrap(),
        "--accounts",
        accounts.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(status_line(&out).contains("'X'"), "{}", stderr(&out));
}

#[test]
fn validate_missing_file() {
    let out = run(&[
        "validate",
        "--tweets",
        "/nonexistent/t.jsonl",
        "--accounts",
        "/nonexistent/a.json",
    ]);
    assert_eq!(code(&out), 2);
    assert!(status_line(&out).starts_with("curated: error"));
}

#[test]
fn validate_lists_malformed_records() {
    let dir = tempfile::tempdir().unwrap();
    let tweets = dir.path().join("t.jsonl");
    let accounts = dir.path().join("a.json");
    fs::write(
        &tweets,
        concat!(
            r#"{"id":"1","created_at":1481587200000,"account":"ESPN","text":"Cavs win"}"#,
            "\n",
            r#"{"id":"2","created_at":1481587200001,"account":"ESPN"}"#,
            "\n"
        ),
    )
    .unwrap();
    fs::write(
        &accounts,
        r#"[{"handle":"ESPN","stream_type":"focused","topics":["sports"]}]"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--tweets",
        tweets.to_str().unwrap(),
        "--accounts",
        accounts.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("line 2"), "{stdout}");
    assert!(stdout.contains("text"), "{stdout}");
}

#[test]
fn synth_is_deterministic_and_rejects_empty() {
    let a = Fixture::new();
    let b = Fixture::new();
    for name in ["data/tweets.jsonl", "data/accounts.json", "data/gold.jsonl"] {
        assert_eq!(read(&a.path(name)), read(&b.path(name)), "{name}");
    }

    let empty = SYNTH.replace("\"tweets_total\": 1200", "\"tweets_total\": 0");
    fs::write(a.path("empty.json"), empty).unwrap();
    let out = run(&[
        "synth",
        "--config",
        &a.arg("empty.json"),
        "--out",
        &a.arg("empty"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn train_lr_and_p_one_identity() {
    let fx = Fixture::new();
    let out = fx.run(
        &["train"],
        &[
            "--topic",
            "sports",
            "--model",
            "lr",
            "--out",
            &fx.arg("a.json"),
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = fx.run(
        &["train"],
        &["--topic", "sports", "--p", "1", "--out", &fx.arg("b.json")],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read(&fx.path("a.json")), read(&fx.path("b.json")));

    let out = fx.run(
        &["train"],
        &["--topic", "sports", "--p", "10", "--out", &fx.arg("c.json")],
    );
    assert_eq!(code(&out), 0);
    assert_ne!(read(&fx.path("a.json")), read(&fx.path("c.json")));

    let model: Value = serde_json::from_slice(&read(&fx.path("a.json"))).unwrap();
    assert_eq!(model["model"], "lr");
    assert_eq!(model["classifiers"][0]["topic"], "sports");
}

#[test]
fn train_contract_errors() {
    let fx = Fixture::new();
    let out = fx.run(
        &["train"],
        &[
            "--topic",
            "sports",
            "--model",
            "nb",
            "--out",
            &fx.arg("m.json"),
        ],
    );
    assert_eq!(code(&out), 1);
    assert!(status_line(&out).contains("--topic all"));

    // in the default topic set but without any focused account
    let out = fx.run(
        &["train"],
        &["--topic", "business", "--out", &fx.arg("m.json")],
    );
    assert_eq!(code(&out), 2);
    assert!(status_line(&out).contains("business"));

    let out = fx.run(
        &["train"],
        &[
            "--topic",
            "sports",
            "--p",
            "0.5",
            "--out",
            &fx.arg("m.json"),
        ],
    );
    assert_eq!(code(&out), 1);
    assert!(!fx.path("m.json").exists());
}

#[test]
fn train_nb_and_classify() {
    let fx = Fixture::new();
    let out = fx.run(
        &["train"],
        &[
            "--topic",
            "all",
            "--model",
            "nb",
            "--out",
            &fx.arg("nb.json"),
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&[
        "classify",
        "--model",
        &fx.arg("nb.json"),
        "--tweets",
        &fx.arg("data/tweets.jsonl"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 1200);
    for line in &lines {
        let scores = line["topic_scores"].as_object().unwrap();
        assert_eq!(scores.len(), 3);
        let total: f64 = scores.values().map(|v| v.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert_eq!(line["topics"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn classify_with_zero_model_gives_one_half() {
    let fx = Fixture::new();
    let out = fx.run(&["train"], &["--topic", "all", "--out", &fx.arg("lr.json")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut model: Value = serde_json::from_slice(&read(&fx.path("lr.json"))).unwrap();
    for c in model["classifiers"].as_array_mut().unwrap() {
        let logistic = &mut c["logistic"];
        for w in logistic["weights"].as_array_mut().unwrap() {
            *w = Value::from(0.0);
        }
        logistic["bias"] = Value::from(0.0);
    }
    fs::write(fx.path("zero.json"), serde_json::to_string(&model).unwrap()).unwrap();
    let out = run(&[
        "classify",
        "--model",
        &fx.arg("zero.json"),
        "--tweets",
        &fx.arg("data/tweets.jsonl"),
        "--out",
        &fx.arg("tags.jsonl"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(fx.path("tags.jsonl")).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["id"], "syn-0001");
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        for score in v["topic_scores"].as_object().unwrap().values() {
            assert_eq!(score.as_f64().unwrap(), 0.5);
        }
        // 0.5 meets the default threshold
        assert_eq!(v["topics"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn weighting_experiment_writes_delta_rows() {
    let fx = Fixture::new();
    fs::write(
        fx.path("w.json"),
        r#"{"experiment":"weighting","topics":[],"eval":"noisy","p":10,"seed":3}"#,
    )
    .unwrap();
    let out = fx.run(
        &[
            "experiment",
            "--config",
            &fx.arg("w.json"),
            "--out",
            &fx.arg("w.csv"),
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(fx.path("w.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "experiment,topic,window_start_frac,window_size_frac,p,precision,recall,f1,tp,fp,fn"
    );
    let deltas: Vec<&str> = lines
        .filter(|l| l.starts_with("weighting_delta,"))
        .collect();
    let topics: Vec<&str> = deltas
        .iter()
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(topics, ["politics", "sports", "technology", "all"]);
    assert!(deltas
        .iter()
        .all(|l| l.split(',').nth(4) == Some("10.000000")));

    let out = run(&["report", "--in", &fx.arg("w.csv")]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("weighting_delta"));
}

#[test]
fn gold_experiment() {
    let fx = Fixture::new();
    fs::write(
        fx.path("g.json"),
        r#"{"experiment":"sliding","eval":"gold"}"#,
    )
    .unwrap();
    let args = [
        "experiment",
        "--config",
        &fx.arg("g.json"),
        "--out",
        &fx.arg("g.csv"),
    ];
    let out = fx.run(&args, &[]);
    assert_eq!(code(&out), 1, "gold eval without --gold");
    let out = fx.run(&args, &["--gold", &fx.arg("data/gold.jsonl")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(fx.path("g.csv")).unwrap();
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(3) == Some("0.600000")));
}

#[test]
fn malformed_experiment_config() {
    let fx = Fixture::new();
    for bad in [
        r#"{"experiment":"bogus","eval":"noisy"}"#,
        r#"{"experiment":"growing","eval":"noisy","colour":1}"#,
        r#"{"experiment":"weighting","eval":"noisy","p":0.5}"#,
        "not json",
    ] {
        fs::write(fx.path("bad.json"), bad).unwrap();
        let out = fx.run(
            &[
                "experiment",
                "--config",
                &fx.arg("bad.json"),
                "--out",
                &fx.arg("x.csv"),
            ],
            &[],
        );
        assert_eq!(code(&out), 1, "{bad}: {}", stderr(&out));
    }
    assert!(!fx.path("x.csv").exists());
}

#[test]
fn report_on_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&run(&["report", "--in", empty.to_str().unwrap()])), 2);
    let header_only = dir.path().join("header.csv");
    fs::write(
        &header_only,
        "experiment,topic,window_start_frac,window_size_frac,p,precision,recall,f1,tp,fp,fn\n",
    )
    .unwrap();
    assert_eq!(
        code(&run(&["report", "--in", header_only.to_str().unwrap()])),
        2
    );
}

#[test]
fn usage_errors_and_status_line() {
    let out = run(&["validate", "--bogus"]);
    assert_eq!(code(&out), 1);
    assert_eq!(status_line(&out), "curated: usage error");
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert_eq!(status_line(&out), "curated: ok");
}

#[test]
fn inputs_are_not_modified() {
    let fx = Fixture::new();
    let before: Vec<Vec<u8>> = ["data/tweets.jsonl", "data/accounts.json"]
        .iter()
        .map(|n| read(&fx.path(n)))
        .collect();
    fx.run(&["validate"], &[]);
    fx.run(&["train"], &["--topic", "all", "--out", &fx.arg("m.json")]);
    let after: Vec<Vec<u8>> = ["data/tweets.jsonl", "data/accounts.json"]
        .iter()
        .map(|n| read(&fx.path(n)))
        .collect();
    assert_eq!(before, after);
}
