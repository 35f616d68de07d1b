use serde::{Deserialize, Serialize};

use crate::error::{MlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Linear,
    Tree,
    Forest,
    Gbm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub n_bins: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 30,
            min_samples_leaf: 1,
            n_bins: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Fraction of features offered to each tree.
    pub col_subsample: f64,
    pub n_bins: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 30,
            min_samples_leaf: 1,
            col_subsample: 1.0,
            n_bins: 256,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopping {
    /// Share of the training rows held out to monitor validation MSE.
    pub validation_fraction: f64,
    /// Rounds without improvement before stopping.
    pub patience: usize,
}

impl Default for EarlyStopping {
    fn default() -> Self {
        Self {
            validation_fraction: 0.1,
            patience: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub l1_alpha: f64,
    pub l2_lambda: f64,
    pub row_subsample: f64,
    pub col_subsample: f64,
    pub n_bins: usize,
    pub early_stopping: Option<EarlyStopping>,
    pub seed: u64,
}

impl Default for GbmParams {
    fn default() -> Self {
        Self {
            n_rounds: 100,
            learning_rate: 0.1,
            max_depth: 30,
            min_samples_leaf: 20,
            l1_alpha: 0.0,
            l2_lambda: 0.0,
            row_subsample: 1.0,
            col_subsample: 1.0,
            n_bins: 256,
            early_stopping: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Params {
    Linear,
    Tree(TreeParams),
    Forest(ForestParams),
    Gbm(GbmParams),
}

impl Params {
    pub fn kind(&self) -> ModelKind {
        match self {
            Params::Linear => ModelKind::Linear,
            Params::Tree(_) => ModelKind::Tree,
            Params::Forest(_) => ModelKind::Forest,
            Params::Gbm(_) => ModelKind::Gbm,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            Params::Forest(p) => Params::Forest(ForestParams { seed, ..p }),
            Params::Gbm(p) => Params::Gbm(GbmParams { seed, ..p }),
            other => other,
        }
    }
}

/// Untuned defaults: 100 trees, learning rate 0.1, depth 30.
pub fn baseline_params(kind: ModelKind) -> Params {
    match kind {
        ModelKind::Linear => Params::Linear,
        ModelKind::Tree => Params::Tree(TreeParams::default()),
        ModelKind::Forest => Params::Forest(ForestParams::default()),
        ModelKind::Gbm => Params::Gbm(GbmParams::default()),
    }
}

fn fraction_ok(x: f64) -> bool {
    x > 0.0 && x <= 1.0
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 || self.n_bins < 2 {
            return Err(MlError::InvalidParams("min_samples_leaf ≥ 1 and n_bins ≥ 2 required".into()));
        }
        Ok(())
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.min_samples_leaf == 0 || self.n_bins < 2 || !fraction_ok(self.col_subsample) {
            return Err(MlError::InvalidParams(format!("{self:?}")));
        }
        Ok(())
    }
}

impl GbmParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate >= 0.0
            && self.learning_rate.is_finite()
            && self.min_samples_leaf > 0
            && self.n_bins >= 2
            && self.l1_alpha >= 0.0
            && self.l2_lambda >= 0.0
            && fraction_ok(self.row_subsample)
            && fraction_ok(self.col_subsample)
            && self
                .early_stopping
                .is_none_or(|e| e.patience >= 1 && e.validation_fraction > 0.0 && e.validation_fraction < 1.0);
        if ok {
            Ok(())
        } else {
            Err(MlError::InvalidParams(format!("{self:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baselines() {
        let Params::Gbm(g) = baseline_params(ModelKind::Gbm) else { panic!() };
        assert_eq!((g.n_rounds, g.learning_rate, g.max_depth), (100, 0.1, 30));
        let Params::Forest(f) = baseline_params(ModelKind::Forest) else { panic!() };
        assert_eq!((f.n_trees, f.max_depth), (100, 30));
        assert_eq!(baseline_params(ModelKind::Linear), Params::Linear);
    }
}
