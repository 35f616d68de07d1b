use moorcast_core::dataset::angular_reconstruct;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::ensemble::{fit_forest_model, fit_gbm_model, fit_tree_model, ForestModel, GbmModel, GbmTrace, TreeModel};
use crate::error::{MlError, Result};
use crate::linear::{fit_linear_model, LinearModel};
use crate::params::{ForestParams, GbmParams, ModelKind, Params, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    Linear(LinearModel),
    Tree(TreeModel),
    Forest(ForestModel),
    Gbm(GbmModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainInfo {
    pub params: Params,
    pub n_train: usize,
    /// Boosting rounds run and kept; zero for other kinds.
    pub rounds_run: usize,
    pub final_round: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub feature_names: Vec<String>,
    pub estimator: Estimator,
    pub info: TrainInfo,
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self.estimator {
            Estimator::Linear(_) => ModelKind::Linear,
            Estimator::Tree(_) => ModelKind::Tree,
            Estimator::Forest(_) => ModelKind::Forest,
            Estimator::Gbm(_) => ModelKind::Gbm,
        }
    }

    fn raw(&self, x: &[f64]) -> f64 {
        match &self.estimator {
            Estimator::Linear(m) => m.predict(x),
            Estimator::Tree(m) => m.tree.predict(x),
            Estimator::Forest(m) => m.predict(x),
            Estimator::Gbm(m) => m.predict(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_names.len() {
            return Err(MlError::Shape(format!(
                "{} features given, model expects {}",
                x.len(),
                self.feature_names.len()
            )));
        }
        Ok(self.raw(x))
    }

    pub fn check_features(&self, names: &[String]) -> Result<()> {
        if names != self.feature_names.as_slice() {
            return Err(MlError::FeatureMismatch {
                expected: self.feature_names.clone(),
                got: names.to_vec(),
            });
        }
        Ok(())
    }

    pub fn predict_dataset(&self, d: &Dataset) -> Result<Vec<f64>> {
        self.check_features(&d.feature_names)?;
        Ok((0..d.n_rows()).map(|i| self.raw(d.row(i))).collect())
    }
}

fn info(params: Params, d: &Dataset) -> TrainInfo {
    TrainInfo {
        params,
        n_train: d.n_rows(),
        rounds_run: 0,
        final_round: 0,
    }
}

pub fn fit_linear(d: &Dataset) -> Result<Model> {
    Ok(Model {
        feature_names: d.feature_names.clone(),
        estimator: Estimator::Linear(fit_linear_model(d)?),
        info: info(Params::Linear, d),
    })
}

pub fn fit_tree(d: &Dataset, p: &TreeParams) -> Result<Model> {
    Ok(Model {
        feature_names: d.feature_names.clone(),
        estimator: Estimator::Tree(fit_tree_model(d, p)?),
        info: info(Params::Tree(*p), d),
    })
}

pub fn fit_forest(d: &Dataset, p: &ForestParams) -> Result<Model> {
    Ok(Model {
        feature_names: d.feature_names.clone(),
        estimator: Estimator::Forest(fit_forest_model(d, p)?),
        info: info(Params::Forest(*p), d),
    })
}

pub fn fit_gbm(d: &Dataset, p: &GbmParams) -> Result<Model> {
    fit_gbm_traced(d, p).map(|(m, _)| m)
}

pub fn fit_gbm_traced(d: &Dataset, p: &GbmParams) -> Result<(Model, GbmTrace)> {
    let (m, trace) = fit_gbm_model(d, p)?;
    let model = Model {
        feature_names: d.feature_names.clone(),
        estimator: Estimator::Gbm(m),
        info: TrainInfo {
            rounds_run: trace.rounds_run,
            final_round: trace.best_round,
            ..info(Params::Gbm(*p), d)
        },
    };
    Ok((model, trace))
}

pub fn fit(d: &Dataset, params: &Params) -> Result<Model> {
    match params {
        Params::Linear => fit_linear(d),
        Params::Tree(p) => fit_tree(d, p),
        Params::Forest(p) => fit_forest(d, p),
        Params::Gbm(p) => fit_gbm(d, p),
    }
}

/// Direction target predicted through independent east and north models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularModel {
    pub east: Model,
    pub north: Model,
}

impl AngularModel {
    pub fn new(east: Model, north: Model) -> Result<Self> {
        east.check_features(&north.feature_names)?;
        Ok(Self { east, north })
    }

    /// Fit both components on `d`, whose own target is ignored.
    pub fn fit(d: &Dataset, east_y: Vec<f64>, north_y: Vec<f64>, params: &Params) -> Result<Self> {
        let east = fit(&d.with_target(east_y)?, params)?;
        let north = fit(&d.with_target(north_y)?, params)?;
        Self::new(east, north)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.east.feature_names
    }

    pub fn predict_components(&self, x: &[f64]) -> Result<(f64, f64)> {
        Ok((self.east.predict(x)?, self.north.predict(x)?))
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let (e, n) = self.predict_components(x)?;
        let norm = e.hypot(n);
        if !(norm >= 1e-6) {
            return Err(MlError::DegenerateAngle(norm));
        }
        Ok(angular_reconstruct(e, n)?)
    }

    pub fn predict_dataset(&self, d: &Dataset) -> Result<Vec<f64>> {
        self.east.check_features(&d.feature_names)?;
        (0..d.n_rows()).map(|i| self.predict(d.row(i))).collect()
    }
}

pub fn predict_angular(am: &AngularModel, x: &[f64]) -> Result<f64> {
    am.predict(x)
}
