use std::time::Instant;

use moorcast_core::dataset::{build_feature_row, FeatureVector};
use moorcast_core::heading::{HeadingSolution, HeadingSolver};
use moorcast_core::metocean::MetoceanState;
use serde::{Deserialize, Serialize};

use crate::bundle::ModelBundle;
use crate::domain::{domain_check, DomainViolation};
use crate::error::{Result, ServeError};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PredictOptions {
    /// Relative margin on the training box, as a fraction of each span.
    pub margin: f64,
    /// Return numbers even when the state is outside the training box.
    pub allow_extrapolation: bool,
}

/// Surrogate predictions. Tensions in N, offset in m, angles in degrees
/// compass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedStatistics {
    pub phi_eq: f64,
    pub mpm_offset: f64,
    pub offset_dir: f64,
    pub mpm_t_fair: f64,
    pub mpm_t_anchor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Utilization {
    pub mpm_offset: f64,
    pub mpm_t_fair: f64,
    pub mpm_t_anchor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub id: String,
    pub statistics: PredictedStatistics,
    pub utilization: Utilization,
    pub domain_ok: bool,
    pub violations: Vec<DomainViolation>,
    /// Set when the numbers were produced outside the training domain.
    pub extrapolation_override: bool,
    pub bundle_version: String,
    pub inference_ms: f64,
}

pub fn features_for(bundle: &ModelBundle, s: &MetoceanState) -> Result<(HeadingSolution, FeatureVector)> {
    let h = HeadingSolver::new(bundle.heading).solve(&bundle.vessel, s)?;
    let f = build_feature_row(s, &h);
    Ok((h, f))
}

/// Heading solve, feature row, domain guard, then every surrogate.
pub fn predict_responses(bundle: &ModelBundle, s: &MetoceanState, opts: &PredictOptions) -> Result<PredictionReport> {
    let start = Instant::now();
    s.ensure_valid()?;
    let (h, f) = features_for(bundle, s)?;
    let x = f.as_slice();
    let domain = domain_check(&bundle.bounds, x, opts.margin);
    if !domain.ok && !opts.allow_extrapolation {
        return Err(ServeError::Domain {
            violations: domain.violations,
        });
    }
    let m = &bundle.models;
    // a negative regression output is clipped: these are magnitudes
    let statistics = PredictedStatistics {
        phi_eq: h.phi_eq,
        mpm_offset: m.mpm_offset.predict(x)?.max(0.0),
        offset_dir: m.offset_dir.predict(x)?,
        mpm_t_fair: m.mpm_t_fair.predict(x)?.max(0.0),
        mpm_t_anchor: m.mpm_t_anchor.predict(x)?.max(0.0),
    };
    let lim = &bundle.limits;
    let utilization = Utilization {
        mpm_offset: statistics.mpm_offset / lim.offset_m,
        mpm_t_fair: statistics.mpm_t_fair / lim.tension_n,
        mpm_t_anchor: statistics.mpm_t_anchor / lim.tension_n,
    };
    Ok(PredictionReport {
        id: s.id.clone(),
        statistics,
        utilization,
        extrapolation_override: !domain.ok,
        domain_ok: domain.ok,
        violations: domain.violations,
        bundle_version: bundle.version(),
        inference_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
