//! Equal-frequency feature binning. A value `x` falls in bin
//! `#{edges < x}`, so `bin(x) <= b` exactly when `x <= edges[b]` and trees
//! grown on bins can be evaluated on raw values with the edge as threshold.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;

pub const MAX_BINS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMapper {
    /// Strictly increasing cut points per feature.
    pub edges: Vec<Vec<f64>>,
}

fn cut_between(a: f64, b: f64) -> f64 {
    let mid = a + 0.5 * (b - a);
    if mid < b {
        mid
    } else {
        a
    }
}

fn feature_edges(mut values: Vec<f64>, n_bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut distinct = values.clone();
    distinct.dedup();
    if distinct.len() <= n_bins {
        return distinct.windows(2).map(|w| cut_between(w[0], w[1])).collect();
    }
    let n = values.len();
    let mut edges: Vec<f64> = Vec::with_capacity(n_bins - 1);
    for k in 1..n_bins {
        let q = values[k * n / n_bins];
        // cut above every copy of q
        let next = distinct.partition_point(|v| *v <= q);
        if next == distinct.len() {
            break;
        }
        let e = cut_between(q, distinct[next]);
        if edges.last().is_none_or(|last| e > *last) {
            edges.push(e);
        }
    }
    edges
}

impl BinMapper {
    pub fn fit(data: &Dataset, n_bins: usize) -> Self {
        let n_bins = n_bins.clamp(2, MAX_BINS);
        let edges = (0..data.n_cols())
            .map(|j| feature_edges(data.column(j), n_bins))
            .collect();
        Self { edges }
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.edges[feature].len() + 1
    }

    pub fn bin(&self, feature: usize, x: f64) -> u8 {
        self.edges[feature].partition_point(|e| *e < x) as u8
    }

    pub fn threshold(&self, feature: usize, bin: usize) -> f64 {
        self.edges[feature][bin]
    }

    pub fn transform(&self, data: &Dataset) -> BinnedMatrix {
        let n_cols = data.n_cols();
        let mut bins = Vec::with_capacity(data.n_rows() * n_cols);
        for i in 0..data.n_rows() {
            for (j, x) in data.row(i).iter().enumerate() {
                bins.push(self.bin(j, *x));
            }
        }
        BinnedMatrix { bins, n_cols }
    }
}

/// Row-major bin indices.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    bins: Vec<u8>,
    n_cols: usize,
}

impl BinnedMatrix {
    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.bins[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }
}
