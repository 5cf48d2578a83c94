//! Run configuration (TOML). Relative paths resolve against the config
//! file's directory.

use std::path::{Path, PathBuf};

use credx_core::explain::{Method, PerturbConfig};
use credx_core::ingest::PrepareConfig;
use credx_core::models::ModelKind;
use credx_core::scorecard::{ScorecardConfig, Weights};
use serde::{Deserialize, Serialize};

use crate::csv_io::read_text;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroInput {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbSettings {
    pub sample_count: Option<usize>,
    pub kernel_width: Option<f64>,
    pub ridge_lambda: f64,
    pub top_k: usize,
    pub enumerate_limit: usize,
}

impl Default for PerturbSettings {
    fn default() -> Self {
        let p = PerturbConfig::default();
        PerturbSettings {
            sample_count: p.sample_count,
            kernel_width: p.kernel_width,
            ridge_lambda: p.ridge_lambda,
            top_k: p.top_k,
            enumerate_limit: p.enumerate_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScorecardSettings {
    pub weights: [f64; 5],
    pub global_sample: usize,
    pub local_instances: usize,
    pub consistency_instances: usize,
    pub repeats: usize,
}

impl Default for ScorecardSettings {
    fn default() -> Self {
        let s = ScorecardConfig::default();
        ScorecardSettings {
            weights: s.weights.0,
            global_sample: s.global_sample,
            local_instances: s.local_instances,
            consistency_instances: s.consistency_instances,
            repeats: s.repeats,
        }
    }
}

fn default_seed() -> u64 {
    42
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_ratio() -> f64 {
    0.8
}
fn default_collinearity() -> f64 {
    PrepareConfig::default().collinearity_threshold
}
fn default_models() -> Vec<ModelKind> {
    ModelKind::ALL.to_vec()
}
fn default_explainer() -> Method {
    Method::Lime
}
fn default_threshold() -> f64 {
    credx_core::metrics::DEFAULT_THRESHOLD
}
fn default_background() -> usize {
    credx_core::explain::DEFAULT_BACKGROUND
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub data: PathBuf,
    pub schema: PathBuf,
    #[serde(default)]
    pub macro_series: Vec<MacroInput>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_ratio")]
    pub split_ratio: f64,
    #[serde(default = "default_collinearity")]
    pub collinearity_threshold: f64,
    #[serde(default = "default_models")]
    pub models: Vec<ModelKind>,
    #[serde(default = "default_explainer")]
    pub explainer: Method,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_background")]
    pub background_size: usize,
    #[serde(default)]
    pub perturb: PerturbSettings,
    #[serde(default)]
    pub scorecard: ScorecardSettings,
}

impl RunConfig {
    pub fn parse(text: &str, base: &Path) -> std::result::Result<Self, String> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string().trim().replace('\n', " "))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.data);
        resolve(&mut cfg.schema);
        resolve(&mut cfg.output_dir);
        for m in &mut cfg.macro_series {
            resolve(&mut m.path);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; an unreadable or invalid config is a usage error.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::Usage(format!("config file {} does not exist", path.display())));
        }
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        RunConfig::parse(&read_text(path)?, base).map_err(|m| Error::Usage(format!("{}: {m}", path.display())))
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(format!("split_ratio must be in (0, 1), got {}", self.split_ratio));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(format!("threshold must be in [0, 1], got {}", self.threshold));
        }
        if self.models.is_empty() {
            return Err("models must list at least one model".into());
        }
        if self.background_size == 0 {
            return Err("background_size must be at least 1".into());
        }
        Weights(self.scorecard.weights).validate().map_err(|e| e.to_string())?;
        Ok(())
    }

    /// Checks that every input file exists.
    pub fn check_inputs(&self) -> Result<()> {
        let mut inputs = vec![("data", &self.data), ("schema", &self.schema)];
        inputs.extend(self.macro_series.iter().map(|m| ("macro series", &m.path)));
        for (what, p) in inputs {
            if !p.is_file() {
                return Err(Error::Usage(format!("{what} path {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn prepare_config(&self) -> PrepareConfig {
        PrepareConfig {
            split_ratio: self.split_ratio,
            seed: self.seed,
            collinearity_threshold: self.collinearity_threshold,
            ..PrepareConfig::default()
        }
    }

    pub fn perturb_config(&self, seed: u64) -> PerturbConfig {
        PerturbConfig {
            sample_count: self.perturb.sample_count,
            kernel_width: self.perturb.kernel_width,
            ridge_lambda: self.perturb.ridge_lambda,
            top_k: self.perturb.top_k,
            seed,
            enumerate_limit: self.perturb.enumerate_limit,
        }
    }

    pub fn scorecard_config(&self, seed: u64) -> ScorecardConfig {
        ScorecardConfig {
            weights: Weights(self.scorecard.weights),
            global_sample: self.scorecard.global_sample,
            local_instances: self.scorecard.local_instances,
            consistency_instances: self.scorecard.consistency_instances,
            repeats: self.scorecard.repeats,
            seed,
        }
    }
}

/// Config written next to a generated corpus.
pub fn template(seed: u64, synth_files: &[(&str, &str)]) -> String {
    let mut s = format!(
        "# credx run configuration\nseed = {seed}\ndata = \"loans.csv\"\nschema = \"schema.toml\"\noutput_dir = \"out\"\n\
         split_ratio = 0.8\ncollinearity_threshold = 0.85\nmodels = [\"logistic\", \"forest\", \"mlp\"]\n\
         explainer = \"lime\"\nthreshold = 0.5\nbackground_size = 100\n"
    );
    for (name, file) in synth_files {
        s.push_str(&format!("\n[[macro_series]]\nname = \"{name}\"\npath = \"{file}\"\n"));
    }
    s.push_str(
        "\n[perturb]\nsample_count = 5000\nridge_lambda = 1.0\ntop_k = 10\nenumerate_limit = 12\n\
         \n[scorecard]\nweights = [0.175, 0.175, 0.30, 0.175, 0.175]\nglobal_sample = 100\n\
         local_instances = 20\nconsistency_instances = 20\nrepeats = 3\n",
    );
    s
}
