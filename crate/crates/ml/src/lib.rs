//! Regression models for mooring response surrogates: least squares,
//! histogram trees, bagged forests and regularized gradient boosting, with
//! metrics, permutation importance and randomized search.

pub mod binning;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod importance;
pub mod linear;
pub mod metrics;
pub mod model;
pub mod params;
pub mod search;
pub mod tree;

pub use data::Dataset;
pub use error::{MlError, Result};
pub use metrics::{evaluate, evaluate_angular, Metrics};
pub use model::{fit, fit_forest, fit_gbm, fit_linear, fit_tree, predict_angular, AngularModel, Model};
pub use params::{baseline_params, EarlyStopping, ForestParams, GbmParams, ModelKind, Params, TreeParams};
