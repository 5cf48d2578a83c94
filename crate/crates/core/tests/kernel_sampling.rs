use credx_core::explain::{exact_shapley, kernel_shap_explain, Background, PerturbConfig};
use credx_core::models::FnModel;
use credx_core::rng::rng_for;
use credx_core::Matrix;
use rand_distr::{Distribution, StandardNormal};

fn normal(n: usize, m: usize, seed: u64) -> Matrix {
    let mut rng = rng_for(seed, 0, 0);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..m).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

#[test]
fn error_shrinks_as_coalition_budget_grows() {
    let m = 10;
    let model = FnModel::new(m, |x: &[f64]| {
        let z = 0.8 * x[0] - 0.6 * x[1] + 0.5 * x[2] * x[3] + 0.4 * x[4].tanh() * x[5] + 0.3 * x[6] - 0.2 * x[7] * x[8] + 0.1 * x[9];
        1.0 / (1.0 + (-z).exp())
    });
    let names: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    let bg = Background::new(normal(20, m, 1), names).unwrap();
    let instances = normal(4, m, 2);
    let exact: Vec<Vec<f64>> = instances
        .iter_rows()
        .map(|x| exact_shapley(&model, x, &bg).unwrap().weights())
        .collect();
    let budgets = [256, 512, 1024, 2048];
    let seeds = [3u64, 5, 8, 13, 21];
    let errors: Vec<f64> = budgets
        .iter()
        .map(|&budget| {
            let mut total = 0.0;
            for &seed in &seeds {
                for (x, phi) in instances.iter_rows().zip(&exact) {
                    let cfg = PerturbConfig {
                        sample_count: Some(budget),
                        enumerate_limit: 0,
                        ridge_lambda: 0.0,
                        seed,
                        ..PerturbConfig::default()
                    };
                    let e = kernel_shap_explain(&model, x, &bg, &cfg).unwrap();
                    total += e.weights().iter().zip(phi).map(|(a, b)| (a - b).abs()).sum::<f64>() / m as f64;
                }
            }
            total / (seeds.len() * instances.rows()) as f64
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] <= w[0], "mean error by budget {budgets:?}: {errors:?}");
    }
}
