use moorcast_core::rng::{derive_seed, rng_from_seed};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{MlError, Result};
use crate::model::Model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: String,
    /// Mean increase in MSE after shuffling the column.
    pub mean: f64,
    pub std: f64,
    /// Share of the summed positive importances.
    pub share: f64,
}

fn mse_with_column(model: &Model, d: &Dataset, j: usize, column: &[f64]) -> f64 {
    let mut row = vec![0.0; d.n_cols()];
    let mut sse = 0.0;
    for (i, v) in column.iter().enumerate() {
        row.copy_from_slice(d.row(i));
        row[j] = *v;
        let e = model.predict(&row).expect("row length checked") - d.y[i];
        sse += e * e;
    }
    sse / d.n_rows() as f64
}

/// Importances in feature order.
pub fn permutation_importance(model: &Model, d: &Dataset, n_repeats: usize, seed: u64) -> Result<Vec<FeatureImportance>> {
    if d.is_empty() {
        return Err(MlError::Empty);
    }
    if n_repeats < 2 {
        return Err(MlError::InvalidParams("permutation importance needs n_repeats ≥ 2".into()));
    }
    model.check_features(&d.feature_names)?;
    let raw: Vec<(f64, f64)> = (0..d.n_cols())
        .into_par_iter()
        .map(|j| {
            let original = d.column(j);
            let base = mse_with_column(model, d, j, &original);
            let incs: Vec<f64> = (0..n_repeats as u64)
                .map(|r| {
                    let mut rng = rng_from_seed(derive_seed(derive_seed(seed, j as u64), r));
                    let mut col = original.clone();
                    col.shuffle(&mut rng);
                    mse_with_column(model, d, j, &col) - base
                })
                .collect();
            let k = incs.len() as f64;
            let mean = incs.iter().sum::<f64>() / k;
            let var = incs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (mean, var.sqrt())
        })
        .collect();
    let total: f64 = raw.iter().map(|(m, _)| m.max(0.0)).sum();
    Ok(raw
        .into_iter()
        .zip(&d.feature_names)
        .map(|((mean, std), name)| FeatureImportance {
            feature: name.clone(),
            mean,
            std,
            share: if total > 0.0 { mean.max(0.0) / total } else { 0.0 },
        })
        .collect())
}

/// Indices sorted by decreasing mean importance.
pub fn ranking(imp: &[FeatureImportance]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..imp.len()).collect();
    idx.sort_by(|&a, &b| imp[b].mean.total_cmp(&imp[a].mean).then(a.cmp(&b)));
    idx
}
