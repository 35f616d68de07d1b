//! Least squares with intercept by modified Gram–Schmidt QR.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{MlError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coef: Vec<f64>,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.coef.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

const RANK_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn fit_linear_model(d: &Dataset) -> Result<LinearModel> {
    let (n, p) = (d.n_rows(), d.n_cols());
    if n == 0 {
        return Err(MlError::Empty);
    }
    if n <= p {
        return Err(MlError::TooFewRows { need: p + 1, have: n });
    }
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(p + 1);
    let mut r = vec![vec![0.0; p + 1]; p + 1];
    let mut deficient = Vec::new();
    for k in 0..=p {
        let mut v = if k == 0 { vec![1.0; n] } else { d.column(k - 1) };
        let norm0 = dot(&v, &v).sqrt();
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let c = dot(qj, &v);
                r[j][k] += c;
                for (vi, qi) in v.iter_mut().zip(qj) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm <= RANK_TOL * norm0 || norm == 0.0 {
            deficient.push(if k == 0 { "intercept".to_owned() } else { d.feature_names[k - 1].clone() });
            q.push(vec![0.0; n]);
            continue;
        }
        r[k][k] = norm;
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    if !deficient.is_empty() {
        return Err(MlError::RankDeficient { columns: deficient });
    }
    let qty: Vec<f64> = q.iter().map(|qk| dot(qk, &d.y)).collect();
    let mut beta = vec![0.0; p + 1];
    for k in (0..=p).rev() {
        let s: f64 = ((k + 1)..=p).map(|j| r[k][j] * beta[j]).sum();
        beta[k] = (qty[k] - s) / r[k][k];
    }
    Ok(LinearModel {
        intercept: beta[0],
        coef: beta[1..].to_vec(),
    })
}
