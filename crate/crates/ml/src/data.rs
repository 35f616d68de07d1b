use moorcast_core::dataset::{Split, TrainingTable, FEATURE_NAMES};

use crate::error::{MlError, Result};

/// Dense row-major feature matrix with one regression target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    x: Vec<f64>,
    pub y: Vec<f64>,
    n_cols: usize,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let n_cols = feature_names.len();
        if rows.len() != y.len() {
            return Err(MlError::Shape(format!("{} rows but {} targets", rows.len(), y.len())));
        }
        let mut x = Vec::with_capacity(rows.len() * n_cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(MlError::Shape(format!("row {i} has {} values, expected {n_cols}", r.len())));
            }
            x.extend_from_slice(r);
        }
        Self::from_flat(feature_names, x, y)
    }

    pub fn from_flat(feature_names: Vec<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n_cols = feature_names.len();
        if n_cols == 0 || x.len() != y.len() * n_cols {
            return Err(MlError::Shape(format!(
                "{} values for {} rows of {n_cols} features",
                x.len(),
                y.len()
            )));
        }
        if let Some(i) = x.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(MlError::Shape(format!("non-finite value at flat index {i}")));
        }
        Ok(Self { feature_names, x, y, n_cols })
    }

    /// One target column of a training table restricted to one split.
    pub fn from_table(t: &TrainingTable, target: usize, split: Split) -> Result<Self> {
        let rows = t.rows(split);
        let mut x = Vec::with_capacity(rows.len() * FEATURE_NAMES.len());
        let mut y = Vec::with_capacity(rows.len());
        for &i in &rows {
            x.extend_from_slice(t.features[i].as_slice());
            y.push(t.targets[i][target]);
        }
        Self::from_flat(FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), x, y)
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n_cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.value(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        assert_eq!(values.len(), self.n_rows());
        for (i, v) in values.iter().enumerate() {
            self.x[i * self.n_cols + j] = *v;
        }
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut x = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            x.extend_from_slice(self.row(i));
        }
        Self {
            feature_names: self.feature_names.clone(),
            x,
            y: idx.iter().map(|&i| self.y[i]).collect(),
            n_cols: self.n_cols,
        }
    }

    pub fn with_target(&self, y: Vec<f64>) -> Result<Self> {
        Self::from_flat(self.feature_names.clone(), self.x.clone(), y)
    }

    /// Append a feature column.
    pub fn with_column(&self, name: &str, values: &[f64]) -> Result<Self> {
        if values.len() != self.n_rows() {
            return Err(MlError::Shape(format!("column {name} has {} values", values.len())));
        }
        let mut names = self.feature_names.clone();
        names.push(name.to_owned());
        let mut x = Vec::with_capacity(self.x.len() + values.len());
        for (i, v) in values.iter().enumerate() {
            x.extend_from_slice(self.row(i));
            x.push(*v);
        }
        Self::from_flat(names, x, self.y.clone())
    }
}
