use alloc::vec::Vec;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::rng::{rng_for, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPair {
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub seed: u64,
    pub ratio: f64,
}

/// Stratified shuffle split of row indices. Each class contributes
/// `round(ratio · n_c)` rows to train (at least one row to each side).
/// Returned index lists are sorted.
pub fn stratified_indices(target: &[u8], ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "split ratio {ratio} not in (0, 1)"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..=1u8 {
        let mut idx: Vec<usize> = (0..target.len()).filter(|&i| target[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::TooFewInClass {
                class,
                count: idx.len(),
                needed: 2,
            });
        }
        idx.shuffle(&mut rng_for(seed, stream::SPLIT, class as u64));
        let n_train = libm::round(ratio * idx.len() as f64) as usize;
        let n_train = n_train.clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split(matrix: &FeatureMatrix, ratio: f64, seed: u64) -> Result<SplitPair> {
    let (train_rows, test_rows) = stratified_indices(&matrix.target, ratio, seed)?;
    Ok(SplitPair {
        train: matrix.select_rows(&train_rows),
        test: matrix.select_rows(&test_rows),
        train_rows,
        test_rows,
        seed,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn toy(n: usize, positives: usize) -> FeatureMatrix {
        let values = Matrix::from_vec(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        let target = (0..n).map(|i| (i < positives) as u8).collect();
        FeatureMatrix::from_continuous(values, &["x"], target).unwrap()
    }

    #[test]
    fn stratification_arithmetic() {
        let p = split(&toy(100, 20), 0.8, 42).unwrap();
        assert_eq!(p.train.n_rows(), 80);
        assert_eq!(p.train.target.iter().filter(|&&y| y == 1).count(), 16);
        assert_eq!(p.test.n_rows(), 20);
        let mut all = p.train_rows.clone();
        all.extend(&p.test_rows);
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_under_seed() {
        let a = split(&toy(100, 20), 0.8, 42).unwrap();
        let b = split(&toy(100, 20), 0.8, 42).unwrap();
        let c = split(&toy(100, 20), 0.8, 43).unwrap();
        assert_eq!(a.train_rows, b.train_rows);
        assert_ne!(a.train_rows, c.train_rows);
    }

    #[test]
    fn bad_ratio_and_small_class() {
        assert!(split(&toy(10, 5), 0.0, 1).is_err());
        assert!(split(&toy(10, 5), 1.0, 1).is_err());
        assert!(matches!(
            split(&toy(10, 1), 0.5, 1),
            Err(Error::TooFewInClass { class: 1, .. })
        ));
    }
}
