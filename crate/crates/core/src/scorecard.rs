//! Five-dimension explainability scorecard on a 0–5 scale.
//!
//! Every mapping from measurement to score lives here: the inherent
//! interpretability rubric, rank-stability of global importance, local
//! fidelity, repeat consistency and the parameter-count brackets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::explain::{global_importance, Background, Explainer, Explanation, Method};
use crate::linalg::Matrix;
use crate::models::{Classifier, ModelKind, Predictor};
use crate::rng::derive_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    Inherent,
    Global,
    Local,
    Consistency,
    Complexity,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Inherent,
        Dimension::Global,
        Dimension::Local,
        Dimension::Consistency,
        Dimension::Complexity,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Dimension::Inherent => "Inherent Interpretability",
            Dimension::Global => "Global Explanations",
            Dimension::Local => "Local Explanations",
            Dimension::Consistency => "Consistency",
            Dimension::Complexity => "Complexity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub dimension: Dimension,
    pub score: f64,
    pub evidence: String,
    pub stats: BTreeMap<String, f64>,
    #[serde(default)]
    pub degenerate: bool,
}

impl DimensionScore {
    fn new(dimension: Dimension, score: f64, evidence: String) -> Self {
        DimensionScore {
            dimension,
            score: score.clamp(0.0, 5.0),
            evidence,
            stats: BTreeMap::new(),
            degenerate: false,
        }
    }

    fn stat(mut self, key: &str, value: f64) -> Self {
        self.stats.insert(key.into(), value);
        self
    }
}

/// Dimension weights in [`Dimension::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub [f64; 5]);

impl Default for Weights {
    fn default() -> Self {
        Weights([0.175, 0.175, 0.30, 0.175, 0.175])
    }
}

impl Weights {
    pub fn uniform() -> Self {
        Weights([0.2; 5])
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("scorecard weights must be finite and non-negative".into()));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights(sum));
        }
        Ok(())
    }
}

/// Weighted mean of five scores (in [`Dimension::ALL`] order).
pub fn composite(scores: &[f64; 5], weights: &Weights) -> Result<f64> {
    weights.validate()?;
    Ok(scores.iter().zip(&weights.0).map(|(s, w)| s * w).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub model: ModelKind,
    pub dimensions: Vec<DimensionScore>,
    pub weights: Weights,
    pub composite: f64,
}

impl ScoreCard {
    /// Assembles a card; `dimensions` must hold each dimension once, in order.
    pub fn new(model: ModelKind, dimensions: Vec<DimensionScore>, weights: Weights) -> Result<Self> {
        let order: Vec<Dimension> = dimensions.iter().map(|d| d.dimension).collect();
        if order != Dimension::ALL {
            return Err(Error::InvalidParameter("scorecard needs the five dimensions in order".into()));
        }
        let composite = composite(&Self::scores_of(&dimensions), &weights)?;
        Ok(ScoreCard {
            model,
            dimensions,
            weights,
            composite,
        })
    }

    fn scores_of(d: &[DimensionScore]) -> [f64; 5] {
        core::array::from_fn(|i| d[i].score)
    }

    pub fn scores(&self) -> [f64; 5] {
        Self::scores_of(&self.dimensions)
    }

    pub fn get(&self, dim: Dimension) -> &DimensionScore {
        &self.dimensions[dim as usize]
    }

    /// Recomputes the composite under other weights.
    pub fn reweighted(&self, weights: Weights) -> Result<ScoreCard> {
        ScoreCard::new(self.model, self.dimensions.clone(), weights)
    }
}

pub fn score_inherent(kind: ModelKind) -> DimensionScore {
    let (score, why) = match kind {
        ModelKind::Logistic => (5.0, "coefficients are directly readable log-odds effects"),
        ModelKind::Forest => (3.0, "individual splits are readable but an ensemble of trees is not"),
        ModelKind::Mlp => (1.0, "stacked non-linear layers have no direct reading"),
    };
    DimensionScore::new(Dimension::Inherent, score, format!("{kind}: {why}"))
}

/// Bracket rubric on the trainable parameter count.
pub fn score_complexity(parameters: usize) -> DimensionScore {
    let score = match parameters {
        0..=100 => 5.0,
        101..=1_000 => 4.0,
        1_001..=10_000 => 3.0,
        10_001..=100_000 => 2.0,
        _ => 1.0,
    };
    DimensionScore::new(Dimension::Complexity, score, format!("{parameters} trainable parameters"))
        .stat("parameters", parameters as f64)
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. When either side
/// has constant ranks the result is 1 for identical inputs and 0 otherwise.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Ok(if ra == rb { 1.0 } else { 0.0 });
    }
    Ok((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

/// Jaccard overlap of two index sets.
fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let inter = a.iter().filter(|i| b.contains(i)).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Rank stability of global importance between the first and second half
/// of `sample` (callers pass a randomly drawn sample).
pub fn score_global<P: Predictor + ?Sized>(
    model: &P,
    sample: &Matrix,
    bg: &Background,
    explainer: &Explainer,
    seed: u64,
) -> Result<DimensionScore> {
    let n = sample.rows();
    if n < 2 {
        return Err(Error::SampleTooSmall(n));
    }
    let half = n / 2;
    let first: Vec<usize> = (0..half).collect();
    let second: Vec<usize> = (half..2 * half).collect();
    let by_feature = |rows: &[usize], s: u64| -> Result<Vec<f64>> {
        let imp = global_importance(model, &sample.select_rows(rows), bg, explainer, s)?;
        Ok(bg
            .names
            .iter()
            .map(|f| imp.iter().find(|i| &i.feature == f).map_or(0.0, |i| i.mean_abs))
            .collect())
    };
    let a = by_feature(&first, derive_seed(seed, 0, 0))?;
    let b = by_feature(&second, derive_seed(seed, 0, 1))?;
    let rho = spearman(&a, &b)?;
    Ok(DimensionScore::new(
        Dimension::Global,
        5.0 * rho.max(0.0),
        format!("Spearman rank correlation {rho:.4} of {} importances between two halves of {half} rows", explainer.method().as_str()),
    )
    .stat("spearman", rho)
    .stat("half_size", half as f64))
}

pub const MIN_LOCAL_INSTANCES: usize = 20;
const MAX_FAILURE_RATE: f64 = 0.10;
/// Additivity residual that maps to a zero local score for Shapley methods.
pub const RESIDUAL_SCALE: f64 = 0.05;

/// Explains every row, tolerating up to 10% failures.
fn explain_all<P: Predictor + ?Sized>(
    model: &P,
    instances: &Matrix,
    bg: &Background,
    explainer: &Explainer,
    seed: u64,
) -> Result<Vec<Explanation>> {
    let total = instances.rows();
    let mut out = Vec::with_capacity(total);
    for (i, row) in instances.iter_rows().enumerate() {
        if let Ok(e) = explainer.explain_seeded(model, row, bg, Explainer::instance_seed(seed, i)) {
            out.push(e);
        }
    }
    let failed = total - out.len();
    if failed as f64 > MAX_FAILURE_RATE * total as f64 || out.is_empty() {
        return Err(Error::ExplainerFailures { failed, total });
    }
    Ok(out)
}

/// LIME: `5 · clamp(mean weighted R²)`; Shapley methods:
/// `5 · (1 − clamp(mean |residual| / 0.05))`.
pub fn score_local<P: Predictor + ?Sized>(
    model: &P,
    instances: &Matrix,
    bg: &Background,
    explainer: &Explainer,
    seed: u64,
) -> Result<DimensionScore> {
    let n = instances.rows();
    if n < MIN_LOCAL_INSTANCES {
        return Err(Error::SampleTooSmall(n));
    }
    let exps = explain_all(model, instances, bg, explainer, seed)?;
    let k = exps.len() as f64;
    let failed = (n - exps.len()) as f64;
    let card = match explainer.method() {
        Method::Lime => {
            let degenerate = exps.iter().filter(|e| e.degenerate).count();
            let r2 = exps.iter().map(|e| e.fidelity.unwrap_or(0.0)).sum::<f64>() / k;
            let mut d = DimensionScore::new(
                Dimension::Local,
                5.0 * r2.clamp(0.0, 1.0),
                format!("mean LIME weighted R² {r2:.4} over {} instances", exps.len()),
            )
            .stat("mean_r2", r2)
            .stat("degenerate_instances", degenerate as f64);
            d.degenerate = degenerate > 0;
            d
        }
        Method::KernelShap | Method::ExactShapley => {
            let res = exps.iter().map(|e| e.additivity_residual().abs()).sum::<f64>() / k;
            DimensionScore::new(
                Dimension::Local,
                5.0 * (1.0 - (res / RESIDUAL_SCALE).clamp(0.0, 1.0)),
                format!("mean additivity residual {res:.3e} over {} instances", exps.len()),
            )
            .stat("mean_residual", res)
        }
    };
    Ok(card.stat("failed_instances", failed))
}

const CONSISTENCY_TOP: usize = 5;

/// Per instance: `repeats` explanations under distinct seeds, mean pairwise
/// top-5 Jaccard `J` and mean pairwise Spearman `ρ̄` of |weight|;
/// score `5 · (0.5·J + 0.5·max(0, ρ̄))` averaged over instances.
pub fn score_consistency<P: Predictor + ?Sized>(
    model: &P,
    instances: &Matrix,
    bg: &Background,
    explainer: &Explainer,
    repeats: usize,
    seed: u64,
) -> Result<DimensionScore> {
    if repeats < 2 {
        return Err(Error::InvalidParameter("consistency needs at least 2 repeats".into()));
    }
    let n = instances.rows();
    if n == 0 {
        return Err(Error::SampleTooSmall(0));
    }
    let mut sum_score = 0.0;
    let mut sum_j = 0.0;
    let mut sum_rho = 0.0;
    for (i, row) in instances.iter_rows().enumerate() {
        let base = Explainer::instance_seed(seed, i);
        let runs = (0..repeats)
            .map(|r| explainer.explain_seeded(model, row, bg, derive_seed(base, 0, r as u64)))
            .collect::<Result<Vec<_>>>()?;
        let (j, rho) = pairwise_agreement(&runs)?;
        sum_j += j;
        sum_rho += rho;
        sum_score += 5.0 * (0.5 * j + 0.5 * rho.max(0.0));
    }
    let nf = n as f64;
    Ok(DimensionScore::new(
        Dimension::Consistency,
        sum_score / nf,
        format!("{repeats} repeats per instance over {n} instances"),
    )
    .stat("mean_jaccard_top5", sum_j / nf)
    .stat("mean_spearman", sum_rho / nf)
    .stat("repeats", repeats as f64))
}

/// Mean pairwise (top-5 Jaccard, Spearman of |weight|) across repeats.
pub fn pairwise_agreement(runs: &[Explanation]) -> Result<(f64, f64)> {
    let tops: Vec<Vec<usize>> = runs
        .iter()
        .map(|e| e.ranking().into_iter().take(CONSISTENCY_TOP).collect())
        .collect();
    let mags: Vec<Vec<f64>> = runs.iter().map(|e| e.weights().iter().map(|w| w.abs()).collect()).collect();
    let (mut j, mut rho, mut pairs) = (0.0, 0.0, 0usize);
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            j += jaccard(&tops[a], &tops[b]);
            rho += spearman(&mags[a], &mags[b])?;
            pairs += 1;
        }
    }
    Ok((j / pairs as f64, rho / pairs as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorecardConfig {
    pub weights: Weights,
    /// Rows used for the global half-sample comparison.
    pub global_sample: usize,
    pub local_instances: usize,
    pub consistency_instances: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for ScorecardConfig {
    fn default() -> Self {
        ScorecardConfig {
            weights: Weights::default(),
            global_sample: 100,
            local_instances: 20,
            consistency_instances: 20,
            repeats: 3,
            seed: 42,
        }
    }
}

/// Scores one trained classifier. `rows` are candidate instances (e.g. test
/// rows, already shuffled); the first `global_sample` feed the global
/// dimension and the first `local_instances` / `consistency_instances` the
/// local and consistency dimensions.
pub fn score_model(
    clf: &Classifier,
    rows: &Matrix,
    bg: &Background,
    explainer: &Explainer,
    cfg: &ScorecardConfig,
) -> Result<ScoreCard> {
    let take = |k: usize| -> Matrix {
        let idx: Vec<usize> = (0..k.min(rows.rows())).collect();
        rows.select_rows(&idx)
    };
    let dims = alloc::vec![
        score_inherent(clf.kind()),
        score_global(clf, &take(cfg.global_sample), bg, explainer, derive_seed(cfg.seed, 1, 0))?,
        score_local(clf, &take(cfg.local_instances), bg, explainer, derive_seed(cfg.seed, 2, 0))?,
        score_consistency(
            clf,
            &take(cfg.consistency_instances),
            bg,
            explainer,
            cfg.repeats,
            derive_seed(cfg.seed, 3, 0),
        )?,
        score_complexity(clf.parameter_count()),
    ];
    ScoreCard::new(clf.kind(), dims, cfg.weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::{Attribution, PerturbConfig};
    use crate::models::FnModel;
    use crate::rng::rng_for;
    use alloc::vec;
    use rand::seq::SliceRandom;
    use rand_distr::{Distribution, StandardNormal};

    fn normal(n: usize, m: usize, seed: u64) -> Matrix {
        let mut rng = rng_for(seed, 0, 0);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    fn bg(m: usize) -> Background {
        Background::new(normal(30, m, 99), (0..m).map(|i| format!("x{i}")).collect()).unwrap()
    }

    #[test]
    fn rubric_ordering() {
        assert_eq!(score_inherent(ModelKind::Logistic).score, 5.0);
        assert_eq!(score_inherent(ModelKind::Forest).score, 3.0);
        assert_eq!(score_inherent(ModelKind::Mlp).score, 1.0);
    }

    #[test]
    fn complexity_brackets() {
        assert_eq!(score_complexity(41).score, 5.0);
        assert_eq!(score_complexity(100).score, 5.0);
        assert_eq!(score_complexity(101).score, 4.0);
        assert_eq!(score_complexity(1_000).score, 4.0);
        assert_eq!(score_complexity(5_297).score, 3.0);
        assert_eq!(score_complexity(100_000).score, 2.0);
        assert_eq!(score_complexity(100_001).score, 1.0);
    }

    #[test]
    fn composite_examples() {
        assert_eq!(composite(&[5.0; 5], &Weights::default()).unwrap(), 5.0);
        assert!((composite(&[5.0, 4.0, 3.0, 2.0, 1.0], &Weights::uniform()).unwrap() - 3.0).abs() < 1e-12);
        let c = composite(&[5.0, 5.0, 0.0, 5.0, 5.0], &Weights::default()).unwrap();
        // 0.7 of the weight on scores of 5
        assert!((c - 0.7 * 5.0).abs() < 1e-12);
        assert!(matches!(composite(&[1.0; 5], &Weights([0.3; 5])), Err(Error::InvalidWeights(_))));
        assert!(composite(&[1.0; 5], &Weights([1.2, -0.2, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn spearman_boundaries() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn global_on_linear_model_is_stable() {
        let w = [3.0, -2.0, 1.0, 0.5, 0.0];
        let f = FnModel::new(5, move |x: &[f64]| w.iter().zip(x).map(|(a, b)| a * b).sum());
        let d = score_global(&f, &normal(2000, 5, 7), &bg(5), &Explainer::ExactShapley, 1).unwrap();
        assert!(d.score >= 4.5, "{d:?}");
        assert!(score_global(&f, &normal(1, 5, 7), &bg(5), &Explainer::ExactShapley, 1).is_err());
    }

    #[test]
    fn local_scores() {
        let f = FnModel::new(3, |x: &[f64]| 0.1 * x[0] - 0.05 * x[2] + 0.5);
        let rows = normal(20, 3, 5);
        let lime = Explainer::Lime(PerturbConfig {
            ridge_lambda: 0.0,
            kernel_width: Some(50.0),
            sample_count: Some(500),
            ..PerturbConfig::default()
        });
        let d = score_local(&f, &rows, &bg(3), &lime, 3).unwrap();
        assert!(d.score >= 4.99, "{d:?}");
        let d = score_local(&f, &rows, &bg(3), &Explainer::ExactShapley, 3).unwrap();
        assert_eq!(d.score, 5.0);
        let c = FnModel::new(3, |_: &[f64]| 0.5);
        let d = score_local(&c, &rows, &bg(3), &lime, 3).unwrap();
        assert_eq!(d.score, 5.0);
        assert!(d.degenerate);
        assert!(score_local(&f, &normal(19, 3, 5), &bg(3), &lime, 3).is_err());
    }

    #[test]
    fn deterministic_explainer_is_fully_consistent() {
        let f = FnModel::new(4, |x: &[f64]| x[0] * x[1] + libm::tanh(x[2]) - x[3]);
        let d = score_consistency(&f, &normal(10, 4, 2), &bg(4), &Explainer::ExactShapley, 3, 0).unwrap();
        assert_eq!(d.score, 5.0);
        assert!(score_consistency(&f, &normal(10, 4, 2), &bg(4), &Explainer::ExactShapley, 1, 0).is_err());
    }

    fn random_explanation(m: usize, seed: u64) -> Explanation {
        let mut rng = rng_for(seed, 77, 0);
        let mut mags: Vec<f64> = (1..=m).map(|v| v as f64).collect();
        mags.shuffle(&mut rng);
        Explanation {
            method: Method::Lime,
            seed,
            base_value: 0.0,
            prediction: 0.0,
            attributions: mags
                .into_iter()
                .enumerate()
                .map(|(i, w)| Attribution {
                    feature: format!("x{i}"),
                    weight: w,
                })
                .collect(),
            fidelity: Some(1.0),
            degenerate: false,
            top_k: m,
            instance: None,
        }
    }

    #[test]
    fn random_rankings_score_near_baseline() {
        // exact top-5-of-10 Jaccard expectation from the hypergeometric overlap
        let choose = |n: u64, k: u64| -> f64 { (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64) };
        let j_rand: f64 = (0..=5u64)
            .map(|k| choose(5, k) * choose(5, 5 - k) / 252.0 * k as f64 / (10 - k) as f64)
            .sum();
        assert!((j_rand - 0.3504).abs() < 1e-3);
        let mut total = 0.0;
        let mut sum_j = 0.0;
        for inst in 0..100u64 {
            let runs: Vec<Explanation> = (0..3).map(|r| random_explanation(10, inst * 10 + r)).collect();
            let (j, rho) = pairwise_agreement(&runs).unwrap();
            sum_j += j;
            total += 5.0 * (0.5 * j + 0.5 * rho.max(0.0));
        }
        let score = total / 100.0;
        assert!((sum_j / 100.0 - j_rand).abs() < 0.05);
        assert!((1.0..=2.2).contains(&score), "{score}");
    }

    #[test]
    fn composite_monotone_and_bounded() {
        let mut rng = rng_for(5, 0, 0);
        use rand::Rng as _;
        for _ in 0..200 {
            let s: [f64; 5] = core::array::from_fn(|_| rng.random_range(0.0..=5.0));
            let raw: [f64; 5] = core::array::from_fn(|_| rng.random::<f64>());
            let t: f64 = raw.iter().sum();
            let w = Weights(core::array::from_fn(|i| raw[i] / t));
            if w.validate().is_err() {
                continue;
            }
            let c = composite(&s, &w).unwrap();
            let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(c >= lo - 1e-12 && c <= hi + 1e-12);
            for i in 0..5 {
                let mut up = s;
                up[i] = (up[i] + 1.0).min(5.0);
                assert!(composite(&up, &w).unwrap() >= c - 1e-12);
            }
        }
    }

    #[test]
    fn card_composite_matches_weights() {
        let dims: Vec<DimensionScore> = Dimension::ALL
            .iter()
            .zip([5.0, 5.0, 0.0, 5.0, 5.0])
            .map(|(&d, s)| DimensionScore::new(d, s, String::new()))
            .collect();
        let card = ScoreCard::new(ModelKind::Logistic, dims.clone(), Weights::default()).unwrap();
        assert!((card.composite - 3.5).abs() < 1e-12);
        let mut bad = dims;
        bad.swap(0, 1);
        assert!(ScoreCard::new(ModelKind::Logistic, bad, Weights::default()).is_err());
    }
}
