//! The three classifiers behind one probability contract.

pub mod forest;
pub mod logistic;
pub mod mlp;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

use crate::ingest::FeatureMatrix;
use crate::linalg::Matrix;
use crate::{Error, Result};

pub use forest::{train_forest, ForestConfig, ForestModel};
pub use logistic::{train_logistic, LogisticConfig, LogisticModel};
pub use mlp::{train_mlp, MlpConfig, MlpModel};

/// Anything that maps a feature row to a real-valued output.
///
/// Explainers only need this; tests use it with hand-written functions.
pub trait Predictor {
    fn n_features(&self) -> usize;

    fn predict_row(&self, x: &[f64]) -> f64;

    fn predict_rows(&self, rows: &Matrix) -> Vec<f64> {
        rows.iter_rows().map(|r| self.predict_row(r)).collect()
    }
}

impl<P: Predictor + ?Sized> Predictor for &P {
    fn n_features(&self) -> usize {
        (**self).n_features()
    }
    fn predict_row(&self, x: &[f64]) -> f64 {
        (**self).predict_row(x)
    }
}

/// Wraps a closure as a [`Predictor`] of fixed width.
pub struct FnModel<F> {
    width: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnModel<F> {
    pub fn new(width: usize, f: F) -> Self {
        FnModel { width, f }
    }
}

impl<F> fmt::Debug for FnModel<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnModel").field("width", &self.width).finish()
    }
}

impl<F: Fn(&[f64]) -> f64> Predictor for FnModel<F> {
    fn n_features(&self) -> usize {
        self.width
    }
    fn predict_row(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logistic,
    Forest,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Logistic, ModelKind::Forest, ModelKind::Mlp];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::Forest => "forest",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(ModelKind::Logistic),
            "forest" => Ok(ModelKind::Forest),
            "mlp" => Ok(ModelKind::Mlp),
            other => Err(Error::InvalidParameter(alloc::format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub logistic: LogisticConfig,
    pub forest: ForestConfig,
    pub mlp: MlpConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 42,
            logistic: LogisticConfig::default(),
            forest: ForestConfig::default(),
            mlp: MlpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum Model {
    Logistic(LogisticModel),
    Forest(ForestModel),
    Mlp(MlpModel),
}

/// A trained model plus the feature names it was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub feature_names: Vec<String>,
    pub model: Model,
}

impl Classifier {
    pub fn train(kind: ModelKind, train: &FeatureMatrix, cfg: &TrainConfig) -> Result<Self> {
        let model = match kind {
            ModelKind::Logistic => Model::Logistic(train_logistic(train, &cfg.logistic)?),
            ModelKind::Forest => Model::Forest(train_forest(train, &cfg.forest, cfg.seed)?),
            ModelKind::Mlp => Model::Mlp(train_mlp(train, &cfg.mlp, cfg.seed)?),
        };
        Ok(Classifier {
            feature_names: train.names(),
            model,
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            Model::Logistic(_) => ModelKind::Logistic,
            Model::Forest(_) => ModelKind::Forest,
            Model::Mlp(_) => ModelKind::Mlp,
        }
    }

    pub fn parameter_count(&self) -> usize {
        match &self.model {
            Model::Logistic(m) => m.parameter_count(),
            Model::Forest(m) => m.parameter_count(),
            Model::Mlp(m) => m.parameter_count(),
        }
    }

    /// Checks that `names` equals the fit-time feature list, position by position.
    pub fn check_features(&self, names: &[String]) -> Result<()> {
        if names == self.feature_names.as_slice() {
            return Ok(());
        }
        let mut offending: Vec<String> = Vec::new();
        let longest = names.len().max(self.feature_names.len());
        for i in 0..longest {
            match (names.get(i), self.feature_names.get(i)) {
                (Some(a), Some(b)) if a == b => {}
                (Some(a), _) if !self.feature_names.contains(a) => offending.push(a.clone()),
                (_, Some(b)) if !names.contains(b) => offending.push(b.clone()),
                (Some(a), _) => offending.push(a.clone()),
                (None, None) => {}
                (None, Some(b)) => offending.push(b.clone()),
            }
        }
        Err(Error::FeatureMismatch(offending))
    }

    pub fn predict_proba(&self, rows: &FeatureMatrix) -> Result<Vec<f64>> {
        self.check_features(&rows.names())?;
        Ok(self.predict_rows(&rows.values))
    }
}

impl Predictor for Classifier {
    fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn predict_row(&self, x: &[f64]) -> f64 {
        match &self.model {
            Model::Logistic(m) => m.predict_row(x),
            Model::Forest(m) => m.predict_row(x),
            Model::Mlp(m) => m.predict_row(x),
        }
    }
}

pub(crate) fn require_both_classes(target: &[u8]) -> Result<(usize, usize)> {
    let n1 = target.iter().filter(|&&y| y == 1).count();
    let n0 = target.len() - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleClass);
    }
    Ok((n0, n1))
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Binary cross-entropy from a logit: `softplus(z) − y·z`.
#[inline]
pub(crate) fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-z.abs())) - y * z
}
