use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::train::train_with;
use super::{BoostError, BoostParams, FeatureMatrix};
use crate::exec::Execution;

/// Optional grid search over depth, rounds and learning rate, scored by
/// inner stratified cross-validation accuracy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningGrid {
    pub max_depth: Vec<usize>,
    pub rounds: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub inner_folds: usize,
}

impl Default for TuningGrid {
    fn default() -> Self {
        TuningGrid {
            max_depth: vec![2, 4, 6],
            rounds: vec![50, 200],
            learning_rate: vec![0.05, 0.1, 0.3],
            inner_folds: 3,
        }
    }
}

impl TuningGrid {
    fn candidates(&self, base: &BoostParams) -> Vec<BoostParams> {
        let mut out = Vec::new();
        for &max_depth in &self.max_depth {
            for &rounds in &self.rounds {
                for &learning_rate in &self.learning_rate {
                    out.push(BoostParams {
                        max_depth,
                        rounds,
                        learning_rate,
                        ..base.clone()
                    });
                }
            }
        }
        out
    }
}

fn stratified_folds(y: &[bool], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; y.len()];
    let mut next = 0;
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            fold[i] = next % k;
            next += 1;
        }
    }
    fold
}

/// Picks the grid point with the best mean inner-fold accuracy.
///
/// Ties go to the earliest point in (max_depth, rounds, learning_rate)
/// order. Returns `base` unchanged if the grid is empty.
pub fn tune(
    x: &FeatureMatrix,
    y: &[bool],
    base: &BoostParams,
    grid: &TuningGrid,
    seed: u64,
    exec: Execution,
) -> Result<BoostParams, BoostError> {
    if grid.inner_folds < 2 {
        return Err(BoostError::InvalidParam {
            name: "inner_folds",
            message: format!("{} < 2", grid.inner_folds),
        });
    }
    let folds = stratified_folds(y, grid.inner_folds, seed);
    let mut best: Option<(f64, BoostParams)> = None;
    for params in grid.candidates(base) {
        params.validate()?;
        let mut correct = 0usize;
        let mut total = 0usize;
        for f in 0..grid.inner_folds {
            let train_idx: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != f).collect();
            let test_idx: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == f).collect();
            if train_idx.is_empty() || test_idx.is_empty() {
                continue;
            }
            let y_train: Vec<bool> = train_idx.iter().map(|&i| y[i]).collect();
            let model = train_with(&x.select_rows(&train_idx), &y_train, &params, exec)?;
            for &i in &test_idx {
                if model.classify(x.row(i))? == y[i] {
                    correct += 1;
                }
                total += 1;
            }
        }
        let acc = if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        };
        if best.as_ref().is_none_or(|(b, _)| acc > *b) {
            best = Some((acc, params));
        }
    }
    Ok(best.map_or_else(|| base.clone(), |(_, p)| p))
}
