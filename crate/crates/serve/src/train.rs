//! Fit the per-target surrogates on a training table and package a bundle.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use moorcast_core::config::Config;
use moorcast_core::dataset::{angular_reconstruct, Split, TrainingTable, FEATURE_NAMES, FEATURE_SCHEMA_VERSION};
use moorcast_core::rng::derive_seed;
use moorcast_core::CoreError;
use moorcast_ml::metrics::evaluate_angles;
use moorcast_ml::search::{random_search, GbmSpace, SearchSpace, Trial};
use moorcast_ml::{baseline_params, evaluate, evaluate_angular, fit, fit_linear, AngularModel, Dataset, Metrics, Model, ModelKind, Params};
use serde::{Deserialize, Serialize};

use crate::bundle::{BundleMeta, Limits, ModelBundle, TargetModels, BUNDLE_SCHEMA_VERSION};
use crate::error::Result;

/// Scalar targets fitted directly, in bundle order.
pub const SCALAR_TARGETS: [&str; 3] = ["mpm_offset", "mpm_t_fair", "mpm_t_anchor"];
pub const DIRECTION_TARGET: &str = "offset_dir";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainOptions {
    /// Random-search trials per target; 0 fits the baseline parameters.
    pub n_trials: usize,
    pub cv_folds: usize,
    pub seed: u64,
    pub space: GbmSpace,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            n_trials: 50,
            cv_folds: 3,
            seed: 0,
            space: GbmSpace::default(),
        }
    }
}

/// Validation metrics of the three model stages for one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub target: String,
    pub linear: Metrics,
    pub baseline: Metrics,
    pub tuned: Metrics,
    pub params: Params,
    /// Search history; empty when no search ran.
    pub trials: Vec<Trial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub targets: Vec<TargetReport>,
}

impl TrainReport {
    pub fn target(&self, name: &str) -> Option<&TargetReport> {
        self.targets.iter().find(|t| t.target == name)
    }
}

/// Allowables from the screening criteria: η·MBL for tension, the
/// offset fraction of water depth for offset.
pub fn limits_from_config(cfg: &Config) -> Result<Limits> {
    let sys = cfg.mooring_system()?;
    Ok(Limits {
        tension_n: cfg.fd.screening.eta * sys.min_mbl(),
        offset_m: cfg.fd.screening.offset_fraction * sys.depth,
    })
}

fn target(name: &str) -> Result<usize> {
    TrainingTable::target_index(name).ok_or_else(|| CoreError::InvalidInput(format!("no target `{name}`")).into())
}

fn column(t: &TrainingTable, split: Split, name: &str) -> Result<Vec<f64>> {
    let j = target(name)?;
    Ok(t.rows(split).into_iter().map(|i| t.targets[i][j]).collect())
}

/// Offset direction in degrees compass, rebuilt from the unit components.
fn direction_deg(t: &TrainingTable, split: Split) -> Result<Vec<f64>> {
    column(t, split, "offset_dir_e")?
        .iter()
        .zip(column(t, split, "offset_dir_n")?)
        .map(|(&e, n)| Ok(angular_reconstruct(e, n)?))
        .collect()
}

fn tuned_params(train: &Dataset, opts: &TrainOptions, seed: u64) -> Result<(Params, Vec<Trial>)> {
    if opts.n_trials == 0 {
        return Ok((baseline_params(ModelKind::Gbm).with_seed(seed), Vec::new()));
    }
    let space = SearchSpace::Gbm(opts.space.clone());
    let res = random_search(train, &space, opts.n_trials, seed, opts.cv_folds)?;
    Ok((res.best.clone(), res.history))
}

/// Linear, baseline GBM and tuned GBM for one scalar target; returns the
/// tuned model.
fn train_scalar(t: &TrainingTable, name: &str, opts: &TrainOptions, seed: u64) -> Result<(Model, TargetReport)> {
    let j = target(name)?;
    let train = Dataset::from_table(t, j, Split::Train)?;
    let val = Dataset::from_table(t, j, Split::Validation)?;
    let linear = evaluate(&fit_linear(&train)?, &val)?;
    let baseline = evaluate(&fit(&train, &baseline_params(ModelKind::Gbm).with_seed(seed))?, &val)?;
    let (params, trials) = tuned_params(&train, opts, seed)?;
    let model = fit(&train, &params)?;
    let tuned = evaluate(&model, &val)?;
    tracing::info!(target = name, linear_rmse = linear.rmse, tuned_rmse = tuned.rmse, r2 = tuned.r2, "target trained");
    Ok((
        model,
        TargetReport {
            target: name.to_owned(),
            linear,
            baseline,
            tuned,
            params,
            trials,
        },
    ))
}

/// East and north unit components fitted separately, then recombined.
/// Components are tuned independently with their own searches.
fn train_direction(t: &TrainingTable, opts: &TrainOptions, seed: u64) -> Result<(AngularModel, TargetReport)> {
    let je = target("offset_dir_e")?;
    let jn = target("offset_dir_n")?;
    let train_e = Dataset::from_table(t, je, Split::Train)?;
    let train_n = Dataset::from_table(t, jn, Split::Train)?;
    let val = Dataset::from_table(t, je, Split::Validation)?;
    let y = direction_deg(t, Split::Validation)?;

    let stage = |east: &Model, north: &Model| -> Result<Metrics> {
        let am = AngularModel::new(east.clone(), north.clone())?;
        Ok(evaluate_angles(&y, &am.predict_dataset(&val)?)?)
    };
    let linear = stage(&fit_linear(&train_e)?, &fit_linear(&train_n)?)?;
    let base = baseline_params(ModelKind::Gbm).with_seed(seed);
    let baseline = stage(&fit(&train_e, &base)?, &fit(&train_n, &base)?)?;
    let (pe, mut trials) = tuned_params(&train_e, opts, derive_seed(seed, 0))?;
    let (pn, trials_n) = tuned_params(&train_n, opts, derive_seed(seed, 1))?;
    trials.extend(trials_n);
    let east = fit(&train_e, &pe)?;
    let north = fit(&train_n, &pn)?;
    let tuned = stage(&east, &north)?;
    tracing::info!(linear_mae = linear.mae, tuned_mae = tuned.mae, "direction trained");
    Ok((
        AngularModel::new(east, north)?,
        TargetReport {
            target: DIRECTION_TARGET.to_owned(),
            linear,
            baseline,
            tuned,
            params: pe,
            trials,
        },
    ))
}

/// Train every target and package the bundle with training-split bounds,
/// limits from `cfg` and validation metrics of the tuned models.
pub fn train_bundle(t: &TrainingTable, cfg: &Config, opts: &TrainOptions) -> Result<(ModelBundle, TrainReport)> {
    let mut reports = Vec::new();
    let mut scalars = Vec::new();
    for (k, name) in SCALAR_TARGETS.iter().enumerate() {
        let (m, r) = train_scalar(t, name, opts, derive_seed(opts.seed, k as u64))?;
        scalars.push(m);
        reports.push(r);
    }
    let (dir, r) = train_direction(t, opts, derive_seed(opts.seed, SCALAR_TARGETS.len() as u64))?;
    reports.push(r);

    let mut it = scalars.into_iter();
    let (mpm_offset, mpm_t_fair, mpm_t_anchor) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    let metrics: BTreeMap<String, Metrics> = reports.iter().map(|r| (r.target.clone(), r.tuned.clone())).collect();
    let bundle = ModelBundle {
        schema_version: BUNDLE_SCHEMA_VERSION,
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        models: TargetModels {
            mpm_offset,
            offset_dir: dir,
            mpm_t_fair,
            mpm_t_anchor,
        },
        bounds: t.bounds.clone(),
        limits: limits_from_config(cfg)?,
        metrics,
        vessel: cfg.vessel.clone(),
        heading: cfg.heading,
        meta: BundleMeta {
            bundle_id: String::new(),
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            feature_schema_version: FEATURE_SCHEMA_VERSION,
            n_train: t.rows(Split::Train).len(),
            n_validation: t.rows(Split::Validation).len(),
            split_seed: t.split_seed,
            train_seed: opts.seed,
        },
    };
    bundle.validate()?;
    Ok((bundle, TrainReport { targets: reports }))
}

/// Metrics of every bundle model on one split of `t`; the same prediction
/// path as serving.
pub fn evaluate_bundle(b: &ModelBundle, t: &TrainingTable, split: Split) -> Result<BTreeMap<String, Metrics>> {
    let mut out = BTreeMap::new();
    let m = &b.models;
    for (name, model) in SCALAR_TARGETS.iter().zip([&m.mpm_offset, &m.mpm_t_fair, &m.mpm_t_anchor]) {
        let d = Dataset::from_table(t, target(name)?, split)?;
        out.insert(name.to_string(), evaluate(model, &d)?);
    }
    let d = Dataset::from_table(t, target("offset_dir_e")?, split)?;
    out.insert(
        DIRECTION_TARGET.to_owned(),
        evaluate_angular(&m.offset_dir, &d, &direction_deg(t, split)?)?,
    );
    Ok(out)
}
