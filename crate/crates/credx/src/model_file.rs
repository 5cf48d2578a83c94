//! Model container: a JSON object with `format`, `version`, `kind`,
//! `feature_names` and the kind-specific `params`. Floats are written in
//! shortest round-trip form, so a reloaded model predicts bit-identically.

use std::path::Path;

use credx_core::models::{Classifier, Model};
use serde::{Deserialize, Serialize};

use crate::csv_io::{read_text, write_text};
use crate::error::{Error, Result};

pub const FORMAT: &str = "credx-model";
pub const VERSION: u32 = 1;

#[derive(Serialize)]
struct Out<'a> {
    format: &'a str,
    version: u32,
    feature_names: &'a [String],
    #[serde(flatten)]
    model: &'a Model,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Deserialize)]
struct In {
    feature_names: Vec<String>,
    #[serde(flatten)]
    model: Model,
}

pub fn model_to_string(clf: &Classifier) -> String {
    serde_json::to_string(&Out {
        format: FORMAT,
        version: VERSION,
        feature_names: &clf.feature_names,
        model: &clf.model,
    })
    .expect("models serialize to JSON")
        + "\n"
}

pub fn model_from_str(text: &str) -> std::result::Result<Classifier, String> {
    let header: Header = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if header.format != FORMAT {
        return Err(format!("not a {FORMAT} file (format `{}`)", header.format));
    }
    if header.version != VERSION {
        return Err(format!("unsupported model version {} (expected {VERSION})", header.version));
    }
    let body: In = serde_json::from_str(text).map_err(|e| e.to_string())?;
    Ok(Classifier {
        feature_names: body.feature_names,
        model: body.model,
    })
}

pub fn save_model(path: &Path, clf: &Classifier) -> Result<()> {
    write_text(path, &model_to_string(clf))
}

pub fn load_model(path: &Path) -> Result<Classifier> {
    model_from_str(&read_text(path)?).map_err(|m| Error::format(path, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use credx_core::ingest::FeatureMatrix;
    use credx_core::models::{ModelKind, Predictor, TrainConfig};
    use credx_core::rng::rng_for;
    use credx_core::Matrix;
    use rand::Rng as _;

    fn data(n: usize) -> FeatureMatrix {
        let mut rng = rng_for(3, 0, 0);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let r: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            y.push(((r[0] * r[1] + 0.3 * r[2]) > 0.0) as u8);
            rows.push(r);
        }
        FeatureMatrix::from_continuous(Matrix::from_rows(&rows).unwrap(), &["a", "b", "c"], y).unwrap()
    }

    fn quick() -> TrainConfig {
        let mut cfg = TrainConfig::default();
        cfg.forest.n_trees = 10;
        cfg.mlp.max_epochs = 5;
        cfg
    }

    #[test]
    fn round_trip_predicts_identically() {
        let train = data(300);
        let probe = data(100);
        for kind in ModelKind::ALL {
            let clf = Classifier::train(kind, &train, &quick()).unwrap();
            let back = model_from_str(&model_to_string(&clf)).unwrap();
            assert_eq!(back, clf, "{kind}");
            for r in probe.values.iter_rows() {
                assert_eq!(back.predict_row(r).to_bits(), clf.predict_row(r).to_bits());
            }
        }
    }

    #[test]
    fn truncated_and_foreign_files_rejected() {
        let clf = Classifier::train(ModelKind::Logistic, &data(100), &quick()).unwrap();
        let text = model_to_string(&clf);
        for cut in [0, 10, text.len() / 2, text.len() - 3] {
            assert!(model_from_str(&text[..cut]).is_err());
        }
        assert!(model_from_str(&text.replace("\"version\":1", "\"version\":2")).unwrap_err().contains("version"));
        assert!(model_from_str(&text.replace("credx-model", "other")).is_err());
    }
}
