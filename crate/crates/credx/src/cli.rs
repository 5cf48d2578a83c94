//! Command-line driver: `prepare`, `train`, `evaluate`, `explain`,
//! `scorecard` and `gen-data`.
//!
//! Output tree under the configured output directory:
//!
//! ```text
//! prepared/   train.csv, test.csv, metadata.json
//! models/     <kind>.json
//! reports/    prepare.json, eval-<kind>.json, comparison.json, comparison.txt
//! explain/    <kind>-row<i>.json, <kind>-row<i>-notice.json, <kind>-row<i>-notice.txt
//! scorecard/  <kind>.json, summary.txt, radar.svg
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use credx_core::explain::{Background, Explainer};
use credx_core::ingest::{prepare, ColumnRole};
use credx_core::metrics::{compare, evaluate, EvalReport};
use credx_core::models::{Classifier, ModelKind, TrainConfig};
use credx_core::rng::{derive_seed, rng_for};
use credx_core::scorecard::{score_model, Dimension, ScoreCard};
use rand::seq::SliceRandom;

use crate::config::{template, RunConfig};
use crate::csv_io::{load_csv, load_macro, load_schema, write_text, PreparedFiles, PreparedMeta, PREPARED_SCHEMA};
use crate::error::{Error, Result};
use crate::model_file::{load_model, save_model};
use crate::notice::build_notice;
use crate::radar::radar_from_cards;
use crate::report::emit_report;
use crate::synth::{generate, macro_file, SynthConfig};

const EXPLAIN_STREAM: u64 = 1003;
const SCORECARD_STREAM: u64 = 1004;
const SCORECARD_ROWS_STREAM: u64 = 1005;
const LOCK_FILE: &str = ".credx.lock";

#[derive(Debug, Parser)]
#[command(name = "credx", version, about = "Explainable credit-default modelling pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configured root seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest the loan table and write the train/test matrices.
    Prepare {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Train the configured models and write the comparison table.
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Train only this model.
        #[arg(long)]
        model: Option<ModelKind>,
        /// Decision threshold for class metrics.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Re-evaluate saved models on the test split.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        model: Option<ModelKind>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Explain one test row and write the adverse-action notice.
    Explain {
        #[command(flatten)]
        run: RunArgs,
        /// Model to explain (defaults to the first configured model).
        #[arg(long)]
        model: Option<ModelKind>,
        /// Zero-based test row index.
        #[arg(long)]
        row: usize,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Score saved models on the five explainability dimensions.
    Scorecard {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        model: Option<ModelKind>,
    },
    /// Write the synthetic loan corpus, macro series, schema and a config.
    GenData {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5000)]
        rows: usize,
    },
}

/// Output-directory layout.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn prepared(&self) -> PreparedFiles {
        PreparedFiles::new(self.root.join("prepared"))
    }
    pub fn model(&self, kind: ModelKind) -> PathBuf {
        self.root.join("models").join(format!("{kind}.json"))
    }
    pub fn reports(&self) -> PathBuf {
        self.root.join("reports")
    }
    pub fn explain(&self) -> PathBuf {
        self.root.join("explain")
    }
    pub fn scorecard(&self) -> PathBuf {
        self.root.join("scorecard")
    }
}

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(OutputLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked { dir: dir.to_path_buf(), lock: path }),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

struct Session {
    cfg: RunConfig,
    layout: Layout,
    _lock: OutputLock,
}

impl Session {
    fn open(run: &RunArgs) -> Result<Self> {
        let mut cfg = RunConfig::load(&run.config)?;
        if let Some(seed) = run.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &run.out {
            cfg.output_dir = out.clone();
        }
        let lock = OutputLock::acquire(&cfg.output_dir)?;
        Ok(Session {
            layout: Layout {
                root: cfg.output_dir.clone(),
            },
            cfg,
            _lock: lock,
        })
    }

    fn models(&self, only: Option<ModelKind>) -> Vec<ModelKind> {
        match only {
            Some(k) => vec![k],
            None => self.cfg.models.clone(),
        }
    }

    fn threshold(&self, flag: Option<f64>) -> Result<f64> {
        let t = flag.unwrap_or(self.cfg.threshold);
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Usage(format!("threshold must be in [0, 1], got {t}")));
        }
        Ok(t)
    }

    fn load_models(&self, kinds: &[ModelKind]) -> Result<Vec<Classifier>> {
        kinds
            .iter()
            .map(|&k| {
                let path = self.layout.model(k);
                if !path.is_file() {
                    return Err(Error::Usage(format!("model file {} not found; run `credx train` first", path.display())));
                }
                load_model(&path)
            })
            .collect()
    }
}

fn list_counts(m: &BTreeMap<String, usize>) -> String {
    if m.is_empty() {
        return "none".into();
    }
    m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

pub fn cmd_prepare(run: &RunArgs) -> Result<()> {
    let s = Session::open(run)?;
    s.cfg.check_inputs()?;
    let schema = load_schema(&s.cfg.schema)?;
    let table = load_csv(&s.cfg.data, &schema.columns)?;
    let series = s
        .cfg
        .macro_series
        .iter()
        .map(|m| load_macro(&m.path, &m.name))
        .collect::<Result<Vec<_>>>()?;
    let prepared = prepare(&table, &series, &schema, &s.cfg.prepare_config()).map_err(|e| Error::data(&s.cfg.data, e))?;
    let mut labels = BTreeMap::new();
    for c in &schema.columns {
        if c.role == ColumnRole::Continuous || c.role == ColumnRole::Categorical {
            labels.insert(c.name.clone(), schema.label(&c.name));
        }
    }
    if schema.credit_line_column.is_some() {
        labels.insert(schema.history_feature.clone(), "Credit history (months)".into());
    }
    for m in &series {
        labels.insert(m.name().to_string(), m.name().to_string());
    }
    let meta = PreparedMeta {
        schema: PREPARED_SCHEMA.into(),
        columns: prepared.train.columns.clone(),
        preprocessor: prepared.preprocessor.clone(),
        summary: prepared.summary.clone(),
        status_map: schema.status_map.clone(),
        labels,
    };
    s.layout.prepared().write(&prepared.train, &prepared.test, &meta)?;
    emit_report(&s.layout.reports().join("prepare.json"), &prepared.summary)?;
    let sum = &prepared.summary;
    println!("rows read          {}", sum.rows_in);
    println!("dropped (status)   {}", list_counts(&sum.dropped_by_status));
    println!("dropped (macro)    {}", sum.dropped_by_macro);
    println!("rows kept          {} (train {}, test {})", sum.rows_out, sum.train_rows, sum.test_rows);
    println!("feature columns    {}", sum.columns_out);
    println!("default rate       {:.4}", sum.positive_rate);
    let drops: Vec<String> = prepared.train.dropped.iter().map(|d| d.name.clone()).collect();
    println!("dropped columns    {}", if drops.is_empty() { "none".into() } else { drops.join(", ") });
    Ok(())
}

fn write_comparison(layout: &Layout, reports: &[EvalReport]) -> Result<String> {
    let table = compare(reports);
    emit_report(&layout.reports().join("comparison.json"), &table)?;
    let text = table.to_text();
    write_text(&layout.reports().join("comparison.txt"), &text)?;
    Ok(text)
}

fn eval_on_test(s: &Session, clf: &Classifier, test: &credx_core::ingest::FeatureMatrix, threshold: f64) -> Result<EvalReport> {
    let scores = clf.predict_proba(test)?;
    let report = evaluate(clf.kind(), &test.target, &scores, threshold)?;
    emit_report(&s.layout.reports().join(format!("eval-{}.json", clf.kind())), &report)?;
    Ok(report)
}

pub fn cmd_train(run: &RunArgs, model: Option<ModelKind>, threshold: Option<f64>) -> Result<()> {
    let s = Session::open(run)?;
    let threshold = s.threshold(threshold)?;
    let (train, test, _) = s.layout.prepared().read()?;
    let kinds = s.models(model);
    let tc = TrainConfig {
        seed: s.cfg.seed,
        ..TrainConfig::default()
    };
    let mut reports = Vec::new();
    let mut failed = 0;
    for &kind in &kinds {
        let result = Classifier::train(kind, &train, &tc)
            .map_err(Error::from)
            .and_then(|clf| {
                save_model(&s.layout.model(kind), &clf)?;
                eval_on_test(&s, &clf, &test, threshold)
            });
        match result {
            Ok(r) => {
                println!("trained {kind}: test AUC {:.4}", r.auc);
                reports.push(r);
            }
            Err(e) => {
                failed += 1;
                eprintln!("error: {}: {kind}: {}", e.category(), one_line(&e.to_string()));
            }
        }
    }
    if !reports.is_empty() {
        print!("{}", write_comparison(&s.layout, &reports)?);
    }
    if failed > 0 {
        return Err(Error::PartialTraining {
            failed,
            total: kinds.len(),
        });
    }
    Ok(())
}

pub fn cmd_evaluate(run: &RunArgs, model: Option<ModelKind>, threshold: Option<f64>) -> Result<()> {
    let s = Session::open(run)?;
    let threshold = s.threshold(threshold)?;
    let (_, test, _) = s.layout.prepared().read()?;
    let models = s.load_models(&s.models(model))?;
    let reports = models
        .iter()
        .map(|clf| eval_on_test(&s, clf, &test, threshold))
        .collect::<Result<Vec<_>>>()?;
    print!("{}", write_comparison(&s.layout, &reports)?);
    Ok(())
}

pub fn cmd_explain(run: &RunArgs, model: Option<ModelKind>, row: usize, threshold: Option<f64>) -> Result<()> {
    let s = Session::open(run)?;
    let threshold = s.threshold(threshold)?;
    let kind = model.unwrap_or(s.cfg.models[0]);
    let (train, test, meta) = s.layout.prepared().read()?;
    if row >= test.n_rows() {
        return Err(Error::Usage(format!("row {row} out of range: test split has {} rows", test.n_rows())));
    }
    let clf = s.load_models(&[kind])?.remove(0);
    clf.check_features(&test.names())?;
    let bg = Background::sample(&train, s.cfg.background_size, s.cfg.seed)?;
    let seed = derive_seed(s.cfg.seed, EXPLAIN_STREAM, row as u64);
    let explainer = Explainer::from_method(s.cfg.explainer, s.cfg.perturb_config(seed));
    let instance = test.values.row(row);
    let mut e = explainer.explain(&clf, instance, &bg)?;
    e.instance = Some(test.row_ids.get(row).cloned().unwrap_or_else(|| row.to_string()));
    let notice = build_notice(&e, kind, threshold, &test.columns, instance, &meta.labels);

    let stem = format!("{kind}-row{row}");
    let dir = s.layout.explain();
    emit_report(&dir.join(format!("{stem}.json")), &e)?;
    emit_report(&dir.join(format!("{stem}-notice.json")), &notice)?;
    let text = notice.to_text();
    write_text(&dir.join(format!("{stem}-notice.txt")), &text)?;

    println!(
        "{} explanation of test row {row} ({}) under {kind}",
        e.method.as_str(),
        e.instance.as_deref().unwrap_or("")
    );
    print!("prediction {:.4}, base value {:.4}", e.prediction, e.base_value);
    match e.fidelity {
        Some(f) => println!(", fidelity {f:.4}"),
        None => println!(),
    }
    for a in e.top() {
        println!("  {:+.4}  {}", a.weight, a.feature);
    }
    println!();
    print!("{text}");
    Ok(())
}

fn scorecard_text(cards: &[ScoreCard]) -> String {
    let mut s = format!("{:<10}", "model");
    for d in Dimension::ALL {
        s.push_str(&format!("{:>13}", format!("{d:?}").to_lowercase()));
    }
    s.push_str(&format!("{:>11}\n", "composite"));
    for c in cards {
        s.push_str(&format!("{:<10}", c.model.as_str()));
        for v in c.scores() {
            s.push_str(&format!("{v:>13.3}"));
        }
        s.push_str(&format!("{:>11.3}\n", c.composite));
    }
    let w = &cards.first().map(|c| c.weights.0).unwrap_or_default();
    s.push_str(&format!(
        "weights = [{}]\n",
        w.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
    ));
    s
}

pub fn cmd_scorecard(run: &RunArgs, model: Option<ModelKind>) -> Result<()> {
    let s = Session::open(run)?;
    let (train, test, _) = s.layout.prepared().read()?;
    let models = s.load_models(&s.models(model))?;
    let bg = Background::sample(&train, s.cfg.background_size, s.cfg.seed)?;
    let sc = &s.cfg.scorecard;
    let need = sc.global_sample.max(sc.local_instances).max(sc.consistency_instances);
    let mut order: Vec<usize> = (0..test.n_rows()).collect();
    order.shuffle(&mut rng_for(s.cfg.seed, SCORECARD_ROWS_STREAM, 0));
    order.truncate(need);
    let rows = test.values.select_rows(&order);
    let seed = derive_seed(s.cfg.seed, SCORECARD_STREAM, 0);
    let explainer = Explainer::from_method(s.cfg.explainer, s.cfg.perturb_config(seed));
    let cfg = s.cfg.scorecard_config(seed);
    let mut cards = Vec::new();
    for clf in &models {
        clf.check_features(&test.names())?;
        let card = score_model(clf, &rows, &bg, &explainer, &cfg)?;
        emit_report(&s.layout.scorecard().join(format!("{}.json", clf.kind())), &card)?;
        cards.push(card);
    }
    let text = scorecard_text(&cards);
    write_text(&s.layout.scorecard().join("summary.txt"), &text)?;
    write_text(&s.layout.scorecard().join("radar.svg"), &radar_from_cards(&cards))?;
    print!("{text}");
    Ok(())
}

pub fn cmd_gen_data(out: &Path, seed: u64, rows: usize) -> Result<()> {
    let corpus = generate(&SynthConfig {
        rows,
        seed,
        ..SynthConfig::default()
    });
    let files = corpus.write(out)?;
    let macro_files: Vec<(String, String)> = corpus.series.iter().map(|m| (m.name().to_string(), macro_file(m.name()))).collect();
    let refs: Vec<(&str, &str)> = macro_files.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let cfg_path = out.join("credx.toml");
    write_text(&cfg_path, &template(seed, &refs))?;
    for f in files.iter().chain(std::iter::once(&cfg_path)) {
        println!("wrote {}", f.display());
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Prepare { run } => cmd_prepare(run),
        Command::Train { run, model, threshold } => cmd_train(run, *model, *threshold),
        Command::Evaluate { run, model, threshold } => cmd_evaluate(run, *model, *threshold),
        Command::Explain {
            run,
            model,
            row,
            threshold,
        } => cmd_explain(run, *model, *row, *threshold),
        Command::Scorecard { run, model } => cmd_scorecard(run, *model),
        Command::GenData { out, seed, rows } => cmd_gen_data(out, *seed, *rows),
    }
}

fn one_line(s: &str) -> String {
    s.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join("; ")
}

/// Parses arguments, runs the command and returns the process exit code.
/// Failures print a single `error: <category>: <message>` line to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                print!("{e}");
                return 0;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {}", e.category(), one_line(&e.to_string()));
            e.exit_code()
        }
    }
}
