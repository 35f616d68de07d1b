//! Single tree, bagged forest and regularized gradient boosting.

use moorcast_core::rng::{derive_seed, rng_from_seed};
use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::BinMapper;
use crate::data::Dataset;
use crate::error::{MlError, Result};
use crate::params::{ForestParams, GbmParams, TreeParams};
use crate::tree::{grow_tree, GrowParams, HistPool, Tree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub tree: Tree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub y_min: f64,
    pub y_max: f64,
}

impl ForestModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let s: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        (s / self.trees.len() as f64).clamp(self.y_min, self.y_max)
    }
}

/// Boosted trees; leaf values already include the learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub base_score: f64,
    pub trees: Vec<Tree>,
}

impl GbmModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

/// Per-round diagnostics from boosting.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GbmTrace {
    /// Training MSE after 0, 1, 2, … rounds on the rows used for fitting.
    pub train_mse: Vec<f64>,
    /// Held-out MSE per round when early stopping is on.
    pub val_mse: Vec<f64>,
    pub rounds_run: usize,
    /// Number of trees kept.
    pub best_round: usize,
}

fn check_rows(d: &Dataset, min_samples_leaf: usize) -> Result<()> {
    if d.is_empty() {
        return Err(MlError::Empty);
    }
    if d.n_rows() < 2 * min_samples_leaf {
        return Err(MlError::TooFewRows {
            need: 2 * min_samples_leaf,
            have: d.n_rows(),
        });
    }
    Ok(())
}

fn y_range(y: &[f64]) -> (f64, f64) {
    y.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
}

pub fn fit_tree_model(d: &Dataset, p: &TreeParams) -> Result<TreeModel> {
    p.validate()?;
    check_rows(d, p.min_samples_leaf)?;
    let mapper = BinMapper::fit(d, p.n_bins);
    let binned = mapper.transform(d);
    let mut rows: Vec<u32> = (0..d.n_rows() as u32).collect();
    let features: Vec<usize> = (0..d.n_cols()).collect();
    let gp = GrowParams {
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf,
        l1: 0.0,
        l2: 0.0,
        clamp_leaves: true,
    };
    Ok(TreeModel {
        tree: grow_tree(&binned, &mapper, &d.y, &mut rows, &features, gp, &mut HistPool::default()),
    })
}

fn choose_features(rng: &mut impl Rng, p: usize, fraction: f64) -> Vec<usize> {
    if fraction >= 1.0 {
        return (0..p).collect();
    }
    let k = ((p as f64 * fraction).round() as usize).clamp(1, p);
    let mut f = index::sample(rng, p, k).into_vec();
    f.sort_unstable();
    f
}

pub fn fit_forest_model(d: &Dataset, p: &ForestParams) -> Result<ForestModel> {
    p.validate()?;
    check_rows(d, p.min_samples_leaf)?;
    let mapper = BinMapper::fit(d, p.n_bins);
    let binned = mapper.transform(d);
    let n = d.n_rows();
    let gp = GrowParams {
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf,
        l1: 0.0,
        l2: 0.0,
        clamp_leaves: true,
    };
    let trees = (0..p.n_trees as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(p.seed, t));
            let mut rows: Vec<u32> = (0..n).map(|_| rng.random_range(0..n as u32)).collect();
            let features = choose_features(&mut rng, d.n_cols(), p.col_subsample);
            grow_tree(&binned, &mapper, &d.y, &mut rows, &features, gp, &mut HistPool::default())
        })
        .collect();
    let (y_min, y_max) = y_range(&d.y);
    Ok(ForestModel { trees, y_min, y_max })
}

fn mse(pred: &[f64], y: &[f64], rows: &[usize]) -> f64 {
    rows.iter().map(|&i| (pred[i] - y[i]).powi(2)).sum::<f64>() / rows.len() as f64
}

pub fn fit_gbm_model(d: &Dataset, p: &GbmParams) -> Result<(GbmModel, GbmTrace)> {
    p.validate()?;
    check_rows(d, p.min_samples_leaf)?;
    let n = d.n_rows();
    let mut rng = rng_from_seed(p.seed);

    let (fit_rows, val_rows): (Vec<usize>, Vec<usize>) = match p.early_stopping {
        Some(es) => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let n_val = ((n as f64 * es.validation_fraction).round() as usize).clamp(1, n - 1);
            let (v, f) = idx.split_at(n_val);
            let (mut f, mut v) = (f.to_vec(), v.to_vec());
            f.sort_unstable();
            v.sort_unstable();
            (f, v)
        }
        None => ((0..n).collect(), Vec::new()),
    };
    if fit_rows.len() < 2 * p.min_samples_leaf {
        return Err(MlError::TooFewRows {
            need: 2 * p.min_samples_leaf,
            have: fit_rows.len(),
        });
    }
    let fit = d.subset(&fit_rows);
    let mapper = BinMapper::fit(&fit, p.n_bins);
    let binned = mapper.transform(&fit);
    let base_score = fit.y.iter().sum::<f64>() / fit.n_rows() as f64;

    let gp = GrowParams {
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf,
        l1: p.l1_alpha,
        l2: p.l2_lambda,
        clamp_leaves: false,
    };
    let nf = fit.n_rows();
    let all_fit: Vec<usize> = (0..nf).collect();
    let mut pred_fit = vec![base_score; nf];
    let mut pred_val = vec![base_score; n];
    let mut residual = vec![0.0; nf];
    let mut trees = Vec::with_capacity(p.n_rounds);
    let mut trace = GbmTrace {
        train_mse: vec![mse(&pred_fit, &fit.y, &all_fit)],
        ..GbmTrace::default()
    };
    let early = p.early_stopping.filter(|_| !val_rows.is_empty());
    if early.is_some() {
        trace.val_mse.push(mse(&pred_val, &d.y, &val_rows));
    }
    let mut best = (trace.val_mse.first().copied().unwrap_or(f64::INFINITY), 0usize);
    let n_sub = ((nf as f64 * p.row_subsample).round() as usize).clamp(1, nf);

    let mut pool = HistPool::default();
    for round in 1..=p.n_rounds {
        for i in 0..nf {
            residual[i] = fit.y[i] - pred_fit[i];
        }
        let mut rows: Vec<u32> = if n_sub < nf {
            let mut r: Vec<u32> = index::sample(&mut rng, nf, n_sub).into_iter().map(|i| i as u32).collect();
            r.sort_unstable();
            r
        } else {
            (0..nf as u32).collect()
        };
        let features = choose_features(&mut rng, d.n_cols(), p.col_subsample);
        let mut tree = grow_tree(&binned, &mapper, &residual, &mut rows, &features, gp, &mut pool);
        tree.scale(p.learning_rate);
        for (i, pr) in pred_fit.iter_mut().enumerate() {
            *pr += tree.predict(fit.row(i));
        }
        trace.train_mse.push(mse(&pred_fit, &fit.y, &all_fit));
        for &i in &val_rows {
            pred_val[i] += tree.predict(d.row(i));
        }
        trees.push(tree);
        trace.rounds_run = round;
        if let Some(es) = early {
            let v = mse(&pred_val, &d.y, &val_rows);
            trace.val_mse.push(v);
            if v < best.0 {
                best = (v, round);
            } else if round - best.1 >= es.patience {
                break;
            }
        }
    }
    if early.is_some() {
        trees.truncate(best.1);
        trace.best_round = best.1;
    } else {
        trace.best_round = trees.len();
    }
    Ok((GbmModel { base_score, trees }, trace))
}
