use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use credx::report::read_report;
use credx_core::metrics::Comparison;
use serde_json::Value;

fn credx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_credx"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = credx(dir, args);
    assert!(out.status.success(), "credx {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(s.lines().count(), 1, "expected a single error line, got {s:?}");
    s.trim_end().to_string()
}

fn corpus(rows: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen-data", "--out", ".", "--rows", rows]);
    dir
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ok(dir.path(), &["--help"]).contains("scorecard"));
    assert!(ok(dir.path(), &["--version"]).contains("credx"));
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["frobnicate"][..], &["train"], &["train", "--config", "x.toml", "--model", "svm"]] {
        let out = credx(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr_line(&out).starts_with("error: usage: "));
    }
}

#[test]
fn missing_schema_is_a_usage_error() {
    let dir = corpus("400");
    fs::remove_file(dir.path().join("schema.toml")).unwrap();
    let out = credx(dir.path(), &["prepare", "--config", "credx.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let line = stderr_line(&out);
    assert!(line.starts_with("error: usage: ") && line.contains("schema.toml"), "{line}");
    assert!(!dir.path().join("out/prepared").exists());
}

#[test]
fn malformed_csv_is_a_data_error() {
    let dir = corpus("400");
    let path = dir.path().join("loans.csv");
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("only,three,fields\n");
    fs::write(&path, text).unwrap();
    let out = credx(dir.path(), &["prepare", "--config", "credx.toml"]);
    assert_eq!(out.status.code(), Some(1));
    let line = stderr_line(&out);
    assert!(line.starts_with("error: data: ") && line.contains("loans.csv"), "{line}");
}

#[test]
fn prepare_is_byte_identical_on_rerun() {
    let dir = corpus("800");
    ok(dir.path(), &["prepare", "--config", "credx.toml"]);
    let read = |f: &str| fs::read(dir.path().join("out/prepared").join(f)).unwrap();
    let first = [read("train.csv"), read("test.csv"), read("metadata.json")];
    ok(dir.path(), &["prepare", "--config", "credx.toml"]);
    assert_eq!(first, [read("train.csv"), read("test.csv"), read("metadata.json")]);
    let meta = String::from_utf8(first[2].clone()).unwrap();
    assert!(!meta.contains(dir.path().to_str().unwrap()), "metadata must not embed absolute paths");
    assert!(!dir.path().join("out/.credx.lock").exists());
}

#[test]
fn seed_override_changes_the_split() {
    let dir = corpus("800");
    ok(dir.path(), &["prepare", "--config", "credx.toml", "--out", "a"]);
    ok(dir.path(), &["prepare", "--config", "credx.toml", "--out", "b", "--seed", "7"]);
    let a = fs::read(dir.path().join("a/prepared/test.csv")).unwrap();
    let b = fs::read(dir.path().join("b/prepared/test.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn locked_output_directory_is_refused() {
    let dir = corpus("400");
    fs::create_dir_all(dir.path().join("out")).unwrap();
    fs::write(dir.path().join("out/.credx.lock"), "").unwrap();
    let out = credx(dir.path(), &["prepare", "--config", "credx.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("error: lock: "));
    assert!(!dir.path().join("out/prepared").exists());
}

#[test]
fn commands_before_their_inputs_exist() {
    let dir = corpus("400");
    let out = credx(dir.path(), &["train", "--config", "credx.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).contains("prepared"));
    ok(dir.path(), &["prepare", "--config", "credx.toml"]);
    let out = credx(dir.path(), &["evaluate", "--config", "credx.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("credx train"));
}

#[test]
fn single_model_train_evaluate_explain() {
    let dir = corpus("1200");
    let p = dir.path();
    ok(p, &["prepare", "--config", "credx.toml"]);
    let table = ok(p, &["train", "--config", "credx.toml", "--model", "logistic"]);
    assert!(table.contains("logistic") && !table.contains("forest"));
    assert!(p.join("out/models/logistic.json").is_file());
    assert!(!p.join("out/models/forest.json").exists());
    let cmp: Comparison = read_report(&p.join("out/reports/comparison.json")).unwrap();
    assert_eq!(cmp.rows.len(), 1);
    let before = fs::read(p.join("out/reports/eval-logistic.json")).unwrap();
    ok(p, &["evaluate", "--config", "credx.toml", "--model", "logistic"]);
    assert_eq!(before, fs::read(p.join("out/reports/eval-logistic.json")).unwrap());

    let out = credx(p, &["explain", "--config", "credx.toml", "--model", "logistic", "--row", "100000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("out of range"));

    // threshold 0 denies every applicant
    ok(p, &["explain", "--config", "credx.toml", "--model", "logistic", "--row", "3", "--threshold", "0"]);
    let notice: Value = serde_json::from_str(&fs::read_to_string(p.join("out/explain/logistic-row3-notice.json")).unwrap()).unwrap();
    assert_eq!(notice["schema"], "credx.notice/v1");
    assert_eq!(notice["decision"], "deny");
    let reasons = notice["reasons"].as_array().unwrap();
    assert!(!reasons.is_empty() && reasons.len() <= 4);
    let weights: Vec<f64> = reasons.iter().map(|r| r["weight"].as_f64().unwrap()).collect();
    assert!(weights.iter().all(|&w| w > 0.0));
    assert!(weights.windows(2).all(|w| w[0] >= w[1]));
    let text = fs::read_to_string(p.join("out/explain/logistic-row3-notice.txt")).unwrap();
    assert!(text.contains("DENY") && text.contains("1. "));

    // threshold 1 approves every applicant
    ok(p, &["explain", "--config", "credx.toml", "--model", "logistic", "--row", "3", "--threshold", "1"]);
    let notice: Value = serde_json::from_str(&fs::read_to_string(p.join("out/explain/logistic-row3-notice.json")).unwrap()).unwrap();
    assert_eq!(notice["decision"], "approve");
    assert!(notice["reasons"].as_array().unwrap().is_empty());

    let e: Value = serde_json::from_str(&fs::read_to_string(p.join("out/explain/logistic-row3.json")).unwrap()).unwrap();
    assert_eq!(e["schema"], "credx.explanation/v1");
    assert_eq!(e["method"], "lime");

    let out = credx(p, &["explain", "--config", "credx.toml", "--model", "logistic", "--row", "3", "--threshold", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scorecard_writes_cards_summary_and_radar() {
    let dir = corpus("1200");
    let p = dir.path();
    let cfg = fs::read_to_string(p.join("credx.toml")).unwrap();
    let cfg = cfg
        .replace("models = [\"logistic\", \"forest\", \"mlp\"]", "models = [\"logistic\", \"mlp\"]")
        .replace("sample_count = 5000", "sample_count = 500")
        .replace("global_sample = 100", "global_sample = 40");
    fs::write(p.join("credx.toml"), cfg).unwrap();
    ok(p, &["prepare", "--config", "credx.toml"]);
    ok(p, &["train", "--config", "credx.toml"]);
    let summary = ok(p, &["scorecard", "--config", "credx.toml"]);
    assert!(summary.contains("logistic") && summary.contains("mlp") && summary.contains("composite"));
    let card: Value = serde_json::from_str(&fs::read_to_string(p.join("out/scorecard/logistic.json")).unwrap()).unwrap();
    assert_eq!(card["schema"], "credx.scorecard/v1");
    assert_eq!(card["dimensions"].as_array().unwrap().len(), 5);
    let svg = fs::read_to_string(p.join("out/scorecard/radar.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let polys = doc.descendants().filter(|n| n.has_tag_name("polygon")).count();
    assert_eq!(polys, 2);
}
