//! Model-agnostic per-instance attribution.
//!
//! Three explainers share one output type, [`Explanation`]:
//!
//! - [`lime_explain`]: Gaussian perturbations around the instance in the
//!   standardized feature space (one-hot groups resampled as a unit from the
//!   background), an exponential locality kernel and a weighted ridge
//!   surrogate.
//! - [`kernel_shap_explain`]: Shapley values as the solution of a weighted
//!   linear regression over coalitions, with the efficiency constraint
//!   eliminated exactly.
//! - [`exact_shapley`]: the classic subset-enumeration formula; the oracle
//!   the other two are checked against.
//!
//! "Absent" features take their values from a background sample of training
//! rows, and the coalition value is the model output averaged over it.

mod exact;
mod global;
mod kernel_shap;
mod lime;
mod ridge;

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::ingest::FeatureMatrix;
use crate::linalg::Matrix;
use crate::models::Predictor;
use crate::rng::{derive_seed, rng_for, stream};
use crate::{Error, Result};

pub use exact::{exact_shapley, shapley_weight, EXACT_LIMIT};
pub use global::{global_importance, Importance};
pub use kernel_shap::{kernel_shap_explain, shap_kernel_weight};
pub use lime::lime_explain;
pub use ridge::{weighted_r2, weighted_ridge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Lime,
    KernelShap,
    ExactShapley,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lime => "lime",
            Method::KernelShap => "kernel-shap",
            Method::ExactShapley => "exact-shapley",
        }
    }
}

impl core::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lime" => Ok(Method::Lime),
            "kernel-shap" => Ok(Method::KernelShap),
            "exact-shapley" => Ok(Method::ExactShapley),
            other => Err(Error::InvalidParameter(alloc::format!("unknown explainer `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub feature: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub method: Method,
    pub seed: u64,
    /// Background-mean output (SHAP) or surrogate intercept (LIME).
    pub base_value: f64,
    /// Model output at the instance.
    pub prediction: f64,
    /// One entry per model feature, in model order.
    pub attributions: Vec<Attribution>,
    /// Weighted R² of the LIME surrogate.
    pub fidelity: Option<f64>,
    /// Set when the surrogate targets had zero variance (fidelity taken as 1).
    pub degenerate: bool,
    pub top_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
}

impl Explanation {
    pub fn weights(&self) -> Vec<f64> {
        self.attributions.iter().map(|a| a.weight).collect()
    }

    /// Feature indices ordered by |weight| descending, ties by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.attributions.len()).collect();
        idx.sort_by(|&a, &b| {
            self.attributions[b]
                .weight
                .abs()
                .total_cmp(&self.attributions[a].weight.abs())
                .then(a.cmp(&b))
        });
        idx
    }

    /// The `top_k` strongest attributions, strongest first.
    pub fn top(&self) -> Vec<&Attribution> {
        self.ranking()
            .into_iter()
            .take(self.top_k)
            .map(|i| &self.attributions[i])
            .collect()
    }

    /// `base + Σφ − f(x)`.
    pub fn additivity_residual(&self) -> f64 {
        self.base_value + self.weights().iter().sum::<f64>() - self.prediction
    }
}

/// Reference rows that stand in for absent features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub rows: Matrix,
    pub names: Vec<String>,
    /// Column index groups perturbed as a unit by LIME (one-hot families).
    pub groups: Vec<Vec<usize>>,
}

pub const DEFAULT_BACKGROUND: usize = 100;

impl Background {
    pub fn new(rows: Matrix, names: Vec<String>) -> Result<Self> {
        if rows.rows() == 0 {
            return Err(Error::EmptyBackground);
        }
        if names.len() != rows.cols() {
            return Err(Error::DimensionMismatch {
                expected: rows.cols(),
                found: names.len(),
            });
        }
        Ok(Background {
            rows,
            names,
            groups: Vec::new(),
        })
    }

    pub fn with_groups(mut self, groups: Vec<Vec<usize>>) -> Result<Self> {
        let m = self.rows.cols();
        let mut seen = alloc::vec![false; m];
        for g in &groups {
            for &j in g {
                if j >= m || seen[j] {
                    return Err(Error::InvalidParameter("background groups must be disjoint column indices".into()));
                }
                seen[j] = true;
            }
        }
        self.groups = groups;
        Ok(self)
    }

    /// Up to `k` rows drawn without replacement (kept in original order),
    /// with the matrix's one-hot groups.
    pub fn sample(matrix: &FeatureMatrix, k: usize, seed: u64) -> Result<Self> {
        use rand::seq::index::sample;
        let n = matrix.n_rows();
        let k = k.min(n);
        let mut idx = sample(&mut rng_for(seed, stream::BACKGROUND, 0), n, k).into_vec();
        idx.sort_unstable();
        Background::new(matrix.values.select_rows(&idx), matrix.names())?
            .with_groups(matrix.indicator_groups())
    }

    pub fn width(&self) -> usize {
        self.rows.cols()
    }

    fn check<P: Predictor + ?Sized>(&self, model: &P, instance: &[f64]) -> Result<()> {
        if model.n_features() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: model.n_features(),
                found: self.width(),
            });
        }
        if instance.len() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                found: instance.len(),
            });
        }
        if instance.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("instance has non-finite entries".into()));
        }
        Ok(())
    }

    fn attributions(&self, weights: &[f64]) -> Vec<Attribution> {
        self.names
            .iter()
            .zip(weights)
            .map(|(n, &w)| Attribution {
                feature: n.clone(),
                weight: w,
            })
            .collect()
    }
}

/// Background-averaged model output with features in `present` taken from
/// the instance and the rest from each background row.
pub(crate) fn coalition_value<P: Predictor + ?Sized>(
    model: &P,
    instance: &[f64],
    bg: &Background,
    present: &[bool],
    buf: &mut Vec<f64>,
) -> f64 {
    let mut total = 0.0;
    for row in bg.rows.iter_rows() {
        buf.clear();
        buf.extend(
            row.iter()
                .zip(instance)
                .zip(present)
                .map(|((&b, &x), &p)| if p { x } else { b }),
        );
        total += model.predict_row(buf);
    }
    total / bg.rows.rows() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbConfig {
    /// LIME perturbations or Kernel SHAP coalitions; `None` picks the
    /// method default (5000, or `min(2^m − 2, 2048)`).
    #[serde(default)]
    pub sample_count: Option<usize>,
    /// LIME locality width; `None` means `0.75 · √m`.
    #[serde(default)]
    pub kernel_width: Option<f64>,
    pub ridge_lambda: f64,
    pub top_k: usize,
    pub seed: u64,
    /// Kernel SHAP enumerates every coalition when `m ≤ enumerate_limit`.
    pub enumerate_limit: usize,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        PerturbConfig {
            sample_count: None,
            kernel_width: None,
            ridge_lambda: 1.0,
            top_k: 10,
            seed: 42,
            enumerate_limit: 12,
        }
    }
}

pub const LIME_DEFAULT_SAMPLES: usize = 5000;
pub const SHAP_MAX_DEFAULT_COALITIONS: usize = 2048;

/// An explainer with its settings, applied to many instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "config", rename_all = "kebab-case")]
pub enum Explainer {
    Lime(PerturbConfig),
    KernelShap(PerturbConfig),
    ExactShapley,
}

impl Explainer {
    pub fn method(&self) -> Method {
        match self {
            Explainer::Lime(_) => Method::Lime,
            Explainer::KernelShap(_) => Method::KernelShap,
            Explainer::ExactShapley => Method::ExactShapley,
        }
    }

    pub fn from_method(method: Method, cfg: PerturbConfig) -> Self {
        match method {
            Method::Lime => Explainer::Lime(cfg),
            Method::KernelShap => Explainer::KernelShap(cfg),
            Method::ExactShapley => Explainer::ExactShapley,
        }
    }

    /// Explains one instance with an explicit seed (replacing the configured one).
    pub fn explain_seeded<P: Predictor + ?Sized>(
        &self,
        model: &P,
        instance: &[f64],
        bg: &Background,
        seed: u64,
    ) -> Result<Explanation> {
        match self {
            Explainer::Lime(cfg) => lime_explain(model, instance, bg, &PerturbConfig { seed, ..cfg.clone() }),
            Explainer::KernelShap(cfg) => {
                kernel_shap_explain(model, instance, bg, &PerturbConfig { seed, ..cfg.clone() })
            }
            Explainer::ExactShapley => exact_shapley(model, instance, bg),
        }
    }

    pub fn explain<P: Predictor + ?Sized>(&self, model: &P, instance: &[f64], bg: &Background) -> Result<Explanation> {
        let seed = match self {
            Explainer::Lime(c) | Explainer::KernelShap(c) => c.seed,
            Explainer::ExactShapley => 0,
        };
        self.explain_seeded(model, instance, bg, seed)
    }

    /// Seed for the `index`-th instance of a batch run.
    pub fn instance_seed(root: u64, index: usize) -> u64 {
        derive_seed(root, stream::SCORECARD, index as u64)
    }
}
