use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{Background, Explainer};
use crate::linalg::Matrix;
use crate::models::Predictor;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub feature: String,
    pub mean_abs: f64,
}

/// Mean |attribution| per feature over the rows of `sample`, descending,
/// ties alphabetical. Row `i` is explained with
/// `Explainer::instance_seed(seed, i)`.
pub fn global_importance<P: Predictor + ?Sized>(
    model: &P,
    sample: &Matrix,
    bg: &Background,
    explainer: &Explainer,
    seed: u64,
) -> Result<Vec<Importance>> {
    if sample.rows() == 0 {
        return Err(Error::SampleTooSmall(0));
    }
    let m = bg.width();
    let mut totals = vec![0.0; m];
    for (i, row) in sample.iter_rows().enumerate() {
        let e = explainer.explain_seeded(model, row, bg, Explainer::instance_seed(seed, i))?;
        for (t, a) in totals.iter_mut().zip(&e.attributions) {
            *t += a.weight.abs();
        }
    }
    let n = sample.rows() as f64;
    let mut out: Vec<Importance> = bg
        .names
        .iter()
        .zip(totals)
        .map(|(f, t)| Importance {
            feature: f.clone(),
            mean_abs: t / n,
        })
        .collect();
    out.sort_by(|a, b| b.mean_abs.total_cmp(&a.mean_abs).then_with(|| a.feature.cmp(&b.feature)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::exact_shapley;
    use crate::models::FnModel;
    use crate::rng::rng_for;
    use rand_distr::{Distribution, StandardNormal};

    fn names() -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }

    fn normal_rows(n: usize, seed: u64) -> Matrix {
        let mut rng = rng_for(seed, 0, 0);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn linear_weights_order_features() {
        let f = FnModel::new(3, |x: &[f64]| 1.0 * x[0] + 3.0 * x[1]);
        let bg = Background::new(normal_rows(20, 1), names()).unwrap();
        let sample = normal_rows(50, 2);
        let imp = global_importance(&f, &sample, &bg, &Explainer::ExactShapley, 0).unwrap();
        assert_eq!(imp[0].feature, "b");
        assert_eq!(imp[1].feature, "a");
        assert_eq!(imp[2].feature, "c");
        assert!(imp[2].mean_abs.abs() < 1e-12);
        // oracle: for a linear model φ_j = w_j (x_j − mean_bg_j)
        let means: Vec<f64> = (0..3).map(|j| bg.rows.column(j).iter().sum::<f64>() / 20.0).collect();
        let oracle: f64 = sample.iter_rows().map(|r| (3.0 * (r[1] - means[1])).abs()).sum::<f64>() / 50.0;
        assert!((imp[0].mean_abs - oracle).abs() < 1e-9);
    }

    #[test]
    fn single_row_equals_its_attributions() {
        let f = FnModel::new(3, |x: &[f64]| x[0] * x[2] - x[1]);
        let bg = Background::new(normal_rows(5, 3), names()).unwrap();
        let sample = normal_rows(1, 4);
        let imp = global_importance(&f, &sample, &bg, &Explainer::ExactShapley, 0).unwrap();
        let e = exact_shapley(&f, sample.row(0), &bg).unwrap();
        for a in &e.attributions {
            let g = imp.iter().find(|i| i.feature == a.feature).unwrap();
            assert_eq!(g.mean_abs, a.weight.abs());
        }
    }

    #[test]
    fn ties_alphabetical() {
        let f = FnModel::new(3, |_: &[f64]| 0.5);
        let bg = Background::new(normal_rows(5, 3), vec!["z".into(), "m".into(), "a".into()]).unwrap();
        let imp = global_importance(&f, &normal_rows(3, 9), &bg, &Explainer::ExactShapley, 0).unwrap();
        let order: Vec<&str> = imp.iter().map(|i| i.feature.as_str()).collect();
        assert_eq!(order, vec!["a", "m", "z"]);
    }

    #[test]
    fn empty_sample_rejected() {
        let f = FnModel::new(3, |_: &[f64]| 0.5);
        let bg = Background::new(normal_rows(5, 3), names()).unwrap();
        assert!(global_importance(&f, &Matrix::zeros(0, 3), &bg, &Explainer::ExactShapley, 0).is_err());
    }
}
