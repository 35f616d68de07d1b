//! Randomized hyperparameter search scored by k-fold cross-validated MSE.

use moorcast_core::rng::{derive_seed, rng_from_seed};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{MlError, Result};
use crate::model::fit;
use crate::params::{EarlyStopping, ForestParams, GbmParams, Params};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmSpace {
    /// Upper bound on rounds; early stopping picks the count.
    pub n_rounds: usize,
    pub learning_rate: (f64, f64),
    pub max_depth: (usize, usize),
    pub min_samples_leaf: (usize, usize),
    pub l1_alpha: (f64, f64),
    pub l2_lambda: (f64, f64),
    pub row_subsample: (f64, f64),
    pub col_subsample: (f64, f64),
    pub validation_fraction: (f64, f64),
    pub patience: (usize, usize),
    pub n_bins: usize,
}

impl Default for GbmSpace {
    fn default() -> Self {
        Self {
            n_rounds: 1000,
            learning_rate: (1e-3, 0.5),
            max_depth: (4, 20),
            min_samples_leaf: (20, 20),
            l1_alpha: (1e-8, 10.0),
            l2_lambda: (1e-8, 10.0),
            row_subsample: (0.6, 1.0),
            col_subsample: (0.6, 1.0),
            validation_fraction: (0.1, 0.2),
            patience: (10, 30),
            n_bins: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestSpace {
    pub n_trees: (usize, usize),
    pub max_depth: (usize, usize),
    pub col_subsample: (f64, f64),
    pub min_samples_leaf: (usize, usize),
}

impl Default for ForestSpace {
    fn default() -> Self {
        Self {
            n_trees: (100, 300),
            max_depth: (10, 30),
            col_subsample: (0.6, 1.0),
            min_samples_leaf: (1, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchSpace {
    Gbm(GbmSpace),
    Forest(ForestSpace),
}

fn check_range<T: PartialOrd + std::fmt::Debug>(name: &str, r: (T, T)) -> Result<()> {
    if r.0 > r.1 {
        return Err(MlError::InvalidParams(format!("{name} range {r:?} has min > max")));
    }
    Ok(())
}

fn check_unit(name: &str, r: (f64, f64)) -> Result<()> {
    check_range(name, r)?;
    if !(r.0 > 0.0 && r.1 <= 1.0) {
        return Err(MlError::InvalidParams(format!("{name} range {r:?} outside (0, 1]")));
    }
    Ok(())
}

fn check_log(name: &str, r: (f64, f64)) -> Result<()> {
    check_range(name, r)?;
    if !(r.0 > 0.0 && r.1.is_finite()) {
        return Err(MlError::InvalidParams(format!("{name} log range {r:?} must be positive")));
    }
    Ok(())
}

fn log_uniform(rng: &mut impl Rng, r: (f64, f64)) -> f64 {
    if r.0 == r.1 {
        return r.0;
    }
    rng.random_range(r.0.ln()..=r.1.ln()).exp()
}

fn uniform(rng: &mut impl Rng, r: (f64, f64)) -> f64 {
    if r.0 == r.1 {
        return r.0;
    }
    rng.random_range(r.0..=r.1)
}

fn int(rng: &mut impl Rng, r: (usize, usize)) -> usize {
    rng.random_range(r.0..=r.1)
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        match self {
            SearchSpace::Gbm(s) => {
                check_log("learning_rate", s.learning_rate)?;
                check_range("max_depth", s.max_depth)?;
                check_range("min_samples_leaf", s.min_samples_leaf)?;
                check_log("l1_alpha", s.l1_alpha)?;
                check_log("l2_lambda", s.l2_lambda)?;
                check_unit("row_subsample", s.row_subsample)?;
                check_unit("col_subsample", s.col_subsample)?;
                check_unit("validation_fraction", s.validation_fraction)?;
                check_range("patience", s.patience)?;
                if s.patience.0 == 0 || s.min_samples_leaf.0 == 0 || s.n_rounds == 0 {
                    return Err(MlError::InvalidParams("patience, min_samples_leaf and n_rounds must be ≥ 1".into()));
                }
            }
            SearchSpace::Forest(s) => {
                check_range("n_trees", s.n_trees)?;
                check_range("max_depth", s.max_depth)?;
                check_range("min_samples_leaf", s.min_samples_leaf)?;
                check_unit("col_subsample", s.col_subsample)?;
                if s.n_trees.0 == 0 || s.min_samples_leaf.0 == 0 {
                    return Err(MlError::InvalidParams("n_trees and min_samples_leaf must be ≥ 1".into()));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut impl Rng, seed: u64) -> Params {
        match self {
            SearchSpace::Gbm(s) => Params::Gbm(GbmParams {
                n_rounds: s.n_rounds,
                learning_rate: log_uniform(rng, s.learning_rate),
                max_depth: int(rng, s.max_depth),
                min_samples_leaf: int(rng, s.min_samples_leaf),
                l1_alpha: log_uniform(rng, s.l1_alpha),
                l2_lambda: log_uniform(rng, s.l2_lambda),
                row_subsample: uniform(rng, s.row_subsample),
                col_subsample: uniform(rng, s.col_subsample),
                n_bins: s.n_bins,
                early_stopping: Some(EarlyStopping {
                    validation_fraction: uniform(rng, s.validation_fraction),
                    patience: int(rng, s.patience),
                }),
                seed,
            }),
            SearchSpace::Forest(s) => Params::Forest(ForestParams {
                n_trees: int(rng, s.n_trees),
                max_depth: int(rng, s.max_depth),
                min_samples_leaf: int(rng, s.min_samples_leaf),
                col_subsample: uniform(rng, s.col_subsample),
                n_bins: 256,
                seed,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub params: Params,
    pub cv_mse: f64,
    pub fold_mse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: Params,
    pub best_cv_mse: f64,
    pub history: Vec<Trial>,
}

/// Shuffled k-fold partition of `0..n`.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || n < k {
        return Err(MlError::InvalidParams(format!("{k}-fold CV on {n} rows")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from_seed(seed));
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in idx.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Mean held-out MSE over the folds, with the per-fold values.
pub fn cv_mse(d: &Dataset, params: &Params, folds: &[Vec<usize>]) -> Result<(f64, Vec<f64>)> {
    let per_fold: Vec<f64> = folds
        .par_iter()
        .enumerate()
        .map(|(k, test)| {
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            let mut train = train;
            train.sort_unstable();
            let model = fit(&d.subset(&train), params)?;
            let held = d.subset(test);
            let pred = model.predict_dataset(&held)?;
            let sse: f64 = pred.iter().zip(&held.y).map(|(p, y)| (p - y).powi(2)).sum();
            Ok(sse / held.n_rows() as f64)
        })
        .collect::<Result<_>>()?;
    Ok((per_fold.iter().sum::<f64>() / per_fold.len() as f64, per_fold))
}

/// `n_trials` configurations drawn from `space`, scored by `cv_folds`-fold
/// MSE; returns the lowest-scoring one (first on ties) and the history in
/// trial order.
pub fn random_search(d: &Dataset, space: &SearchSpace, n_trials: usize, seed: u64, cv_folds: usize) -> Result<SearchResult> {
    space.validate()?;
    if n_trials == 0 {
        return Err(MlError::InvalidParams("n_trials must be ≥ 1".into()));
    }
    let folds = kfold(d.n_rows(), cv_folds, derive_seed(seed, u64::MAX))?;
    let mut rng = rng_from_seed(seed);
    let candidates: Vec<Params> = (0..n_trials)
        .map(|t| space.sample(&mut rng, derive_seed(seed, t as u64)))
        .collect();
    let history: Vec<Trial> = candidates
        .into_par_iter()
        .enumerate()
        .map(|(index, params)| {
            let (cv, fold_mse) = cv_mse(d, &params, &folds)?;
            Ok(Trial { index, params, cv_mse: cv, fold_mse })
        })
        .collect::<Result<_>>()?;
    let best = history
        .iter()
        .fold(None::<&Trial>, |b, t| match b {
            Some(b) if b.cv_mse <= t.cv_mse => Some(b),
            _ => Some(t),
        })
        .expect("at least one trial");
    Ok(SearchResult {
        best: best.params,
        best_cv_mse: best.cv_mse,
        history,
    })
}
