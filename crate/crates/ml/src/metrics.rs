use moorcast_core::metocean::angle_diff_deg;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{MlError, Result};
use crate::model::{AngularModel, Model};

/// Error statistics with residuals `e = ŷ − y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
    pub residual_mean: f64,
    pub residual_min: f64,
    pub residual_max: f64,
    pub n: usize,
}

fn summarize(residuals: &[f64], sst: f64) -> Result<Metrics> {
    let n = residuals.len();
    if n == 0 {
        return Err(MlError::Empty);
    }
    if sst <= 0.0 {
        return Err(MlError::UndefinedR2);
    }
    let nf = n as f64;
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    Ok(Metrics {
        rmse: (sse / nf).sqrt(),
        mae: residuals.iter().map(|e| e.abs()).sum::<f64>() / nf,
        r2: 1.0 - sse / sst,
        residual_mean: residuals.iter().sum::<f64>() / nf,
        residual_min: residuals.iter().copied().fold(f64::INFINITY, f64::min),
        residual_max: residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        n,
    })
}

fn check_len(y: &[f64], pred: &[f64]) -> Result<()> {
    if y.len() != pred.len() {
        return Err(MlError::Shape(format!("{} targets vs {} predictions", y.len(), pred.len())));
    }
    Ok(())
}

pub fn evaluate_values(y: &[f64], pred: &[f64]) -> Result<Metrics> {
    check_len(y, pred)?;
    let mean = y.iter().sum::<f64>() / y.len().max(1) as f64;
    let sst = y.iter().map(|v| (v - mean).powi(2)).sum();
    let e: Vec<f64> = pred.iter().zip(y).map(|(p, t)| p - t).collect();
    summarize(&e, sst)
}

/// Angular metrics in degrees. Residuals are wrapped to (−180, 180] and the
/// total sum of squares is taken about the circular mean.
pub fn evaluate_angles(y: &[f64], pred: &[f64]) -> Result<Metrics> {
    check_len(y, pred)?;
    let (se, sn) = y.iter().fold((0.0, 0.0), |(e, n), t| {
        let a = t.to_radians();
        (e + a.sin(), n + a.cos())
    });
    let centre = se.atan2(sn).to_degrees();
    let sst = y.iter().map(|t| angle_diff_deg(*t, centre).powi(2)).sum();
    let e: Vec<f64> = pred.iter().zip(y).map(|(p, t)| angle_diff_deg(*p, *t)).collect();
    summarize(&e, sst)
}

pub fn evaluate(model: &Model, d: &Dataset) -> Result<Metrics> {
    evaluate_values(&d.y, &model.predict_dataset(d)?)
}

/// Wrapped-residual metrics of a direction model against `y_deg`.
pub fn evaluate_angular(am: &AngularModel, d: &Dataset, y_deg: &[f64]) -> Result<Metrics> {
    evaluate_angles(y_deg, &am.predict_dataset(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_mean_and_shifted_predictions() {
        let y = [1.0, 2.0, 4.0, 8.0];
        let m = evaluate_values(&y, &y).unwrap();
        assert_eq!((m.rmse, m.mae, m.r2, m.residual_min, m.residual_max), (0.0, 0.0, 1.0, 0.0, 0.0));
        let mean = [3.75; 4];
        assert!(evaluate_values(&y, &mean).unwrap().r2.abs() < 1e-15);
        let shifted: Vec<f64> = y.iter().map(|v| v + 2.0).collect();
        let m = evaluate_values(&y, &shifted).unwrap();
        assert_eq!((m.mae, m.residual_mean), (2.0, 2.0));
        assert!(matches!(evaluate_values(&[1.0, 1.0], &[1.0, 2.0]), Err(MlError::UndefinedR2)));
    }

    #[test]
    fn angular_residuals_wrap() {
        let y = [10.0, 350.0, 180.0];
        let p = [370.0, -10.0, 540.0];
        let m = evaluate_angles(&y, &p).unwrap();
        assert!(m.mae < 1e-12 && m.rmse < 1e-12);
        let m = evaluate_angles(&[359.0, 90.0], &[1.0, 90.0]).unwrap();
        assert!((m.residual_max - 2.0).abs() < 1e-12);
    }
}
