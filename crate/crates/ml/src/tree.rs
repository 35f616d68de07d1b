//! Histogram regression tree shared by the single tree, the forest and the
//! boosting rounds.

use serde::{Deserialize, Serialize};

use crate::binning::{BinMapper, BinnedMatrix, MAX_BINS};

/// Flat preorder node arrays. `feature[i] < 0` marks a leaf; internal
/// nodes send `x[feature] <= threshold` to `left`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub feature: Vec<i32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub value: Vec<f64>,
}

impl Tree {
    pub fn leaf(value: f64) -> Self {
        Self {
            feature: vec![-1],
            threshold: vec![0.0],
            left: vec![0],
            right: vec![0],
            value: vec![value],
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            let f = self.feature[i];
            if f < 0 {
                return self.value[i];
            }
            i = if x[f as usize] <= self.threshold[i] {
                self.left[i]
            } else {
                self.right[i]
            } as usize;
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.feature.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.feature.iter().filter(|f| **f < 0).count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            if t.feature[i] < 0 {
                0
            } else {
                1 + go(t, t.left[i] as usize).max(go(t, t.right[i] as usize))
            }
        }
        go(self, 0)
    }

    pub fn uses_feature(&self, j: usize) -> bool {
        self.feature.iter().any(|f| *f == j as i32)
    }

    pub fn scale(&mut self, k: f64) {
        for v in &mut self.value {
            *v *= k;
        }
    }

    fn push(&mut self, feature: i32, threshold: f64, value: f64) -> usize {
        self.feature.push(feature);
        self.threshold.push(threshold);
        self.left.push(0);
        self.right.push(0);
        self.value.push(value);
        self.feature.len() - 1
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub l1: f64,
    pub l2: f64,
    /// Clamp leaf values to the range of the targets in the leaf.
    pub clamp_leaves: bool,
}

fn soft_threshold(g: f64, alpha: f64) -> f64 {
    if g > alpha {
        g - alpha
    } else if g < -alpha {
        g + alpha
    } else {
        0.0
    }
}

/// Per-feature (sum, count) pairs with stride `2 * MAX_BINS`; only bins in
/// `lo[k]..=hi[k]` are meaningful.
struct Hist {
    sums: Vec<f64>,
    lo: Vec<u8>,
    hi: Vec<u8>,
}

/// Histogram buffers reused across the trees of one ensemble.
#[derive(Default)]
pub(crate) struct HistPool(Vec<Hist>);

impl Hist {
    fn new(nf: usize) -> Self {
        Self {
            sums: vec![0.0; nf * 2 * MAX_BINS],
            lo: vec![0; nf],
            hi: vec![0; nf],
        }
    }
}

struct Grower<'a> {
    binned: &'a BinnedMatrix,
    mapper: &'a BinMapper,
    target: &'a [f64],
    features: &'a [usize],
    p: GrowParams,
    /// A node at depth `d` owns a buffer with index at most `d` and builds
    /// its smaller child's histogram into buffer `d + 1`.
    hists: &'a mut Vec<Hist>,
    tree: Tree,
}

struct Split {
    feature: usize,
    bin: usize,
    gain: f64,
}

impl Grower<'_> {
    fn score(&self, s: f64, n: f64) -> f64 {
        let t = soft_threshold(s, self.p.l1);
        t * t / (n + self.p.l2)
    }

    fn leaf_value(&self, rows: &[u32], s: f64) -> f64 {
        let n = rows.len() as f64;
        let mut v = soft_threshold(s, self.p.l1) / (n + self.p.l2);
        if self.p.clamp_leaves {
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                let t = self.target[r as usize];
                (lo.min(t), hi.max(t))
            });
            v = v.clamp(lo, hi);
        }
        v
    }

    fn can_split(&self, n: usize, depth: usize) -> bool {
        depth < self.p.max_depth && n >= 2 * self.p.min_samples_leaf.max(1)
    }

    fn slot(&mut self, i: usize) -> &mut Hist {
        let nf = self.features.len();
        while self.hists.len() <= i {
            self.hists.push(Hist::new(nf));
        }
        if self.hists[i].lo.len() < nf {
            self.hists[i] = Hist::new(nf);
        }
        &mut self.hists[i]
    }

    fn build(&mut self, rows: &[u32], i: usize) {
        let (binned, target, features) = (self.binned, self.target, self.features);
        let h = self.slot(i);
        h.lo.fill(u8::MAX);
        h.hi.fill(0);
        for &r in rows {
            let b = binned.row(r as usize);
            for (k, &f) in features.iter().enumerate() {
                h.lo[k] = h.lo[k].min(b[f]);
                h.hi[k] = h.hi[k].max(b[f]);
            }
        }
        for k in 0..features.len() {
            let base = k * 2 * MAX_BINS;
            h.sums[base + 2 * h.lo[k] as usize..base + 2 * (h.hi[k] as usize + 1)].fill(0.0);
        }
        for &r in rows {
            let b = binned.row(r as usize);
            let t = target[r as usize];
            for (k, &f) in features.iter().enumerate() {
                let j = k * 2 * MAX_BINS + 2 * b[f] as usize;
                h.sums[j] += t;
                h.sums[j + 1] += 1.0;
            }
        }
    }

    /// `hists[to] -= hists[small]`, then shrink the bin ranges of `to` to
    /// its non-empty bins.
    fn subtract(&mut self, to: usize, small: usize) {
        debug_assert!(small > to);
        let (head, tail) = self.hists.split_at_mut(small);
        let (p, s) = (&mut head[to], &tail[0]);
        for k in 0..self.features.len() {
            let base = k * 2 * MAX_BINS;
            let (slo, shi) = (s.lo[k], s.hi[k]);
            let (mut lo, mut hi) = (u8::MAX, 0u8);
            for b in p.lo[k]..=p.hi[k] {
                let j = base + 2 * b as usize;
                if b >= slo && b <= shi {
                    p.sums[j] -= s.sums[j];
                    p.sums[j + 1] -= s.sums[j + 1];
                }
                if p.sums[j + 1] > 0.5 {
                    lo = lo.min(b);
                    hi = hi.max(b);
                } else {
                    p.sums[j] = 0.0;
                    p.sums[j + 1] = 0.0;
                }
            }
            p.lo[k] = lo;
            p.hi[k] = hi;
        }
    }

    fn best_split(&self, i: usize, n: usize, s: f64, ss: f64) -> Option<Split> {
        let msl = self.p.min_samples_leaf.max(1) as f64;
        let h = &self.hists[i];
        let parent = self.score(s, n as f64);
        let tol = 1e-10 * ss.max(f64::MIN_POSITIVE);
        let mut best: Option<Split> = None;
        for (k, &f) in self.features.iter().enumerate() {
            let base = k * 2 * MAX_BINS;
            let (mut sl, mut nl) = (0.0, 0.0);
            for b in h.lo[k] as usize..h.hi[k] as usize {
                sl += h.sums[base + 2 * b];
                nl += h.sums[base + 2 * b + 1];
                let nr = n as f64 - nl;
                if nl < msl {
                    continue;
                }
                if nr < msl {
                    break;
                }
                let gain = self.score(sl, nl) + self.score(s - sl, nr) - parent;
                if gain > tol && best.as_ref().is_none_or(|bs| gain > bs.gain) {
                    best = Some(Split { feature: f, bin: b, gain });
                }
            }
        }
        best
    }

    /// `hist` holds this node's histogram buffer when the node may split.
    fn grow(&mut self, rows: &mut [u32], depth: usize, hist: Option<usize>) -> usize {
        let (s, ss) = rows.iter().fold((0.0, 0.0), |(s, ss), &r| {
            let t = self.target[r as usize];
            (s + t, ss + t * t)
        });
        let split = hist.and_then(|i| self.best_split(i, rows.len(), s, ss));
        let Some(sp) = split else {
            let v = self.leaf_value(rows, s);
            return self.tree.push(-1, 0.0, v);
        };
        let node = self.tree.push(sp.feature as i32, self.mapper.threshold(sp.feature, sp.bin), 0.0);
        let mut mid = 0;
        for i in 0..rows.len() {
            if (self.binned.row(rows[i] as usize)[sp.feature] as usize) <= sp.bin {
                rows.swap(i, mid);
                mid += 1;
            }
        }
        let (l, r) = rows.split_at_mut(mid);
        let own = hist.expect("split nodes carry a histogram");
        let (lh, rh) = match (self.can_split(l.len(), depth + 1), self.can_split(r.len(), depth + 1)) {
            (true, true) => {
                let fresh = depth + 1;
                if l.len() <= r.len() {
                    self.build(l, fresh);
                    self.subtract(own, fresh);
                    (Some(fresh), Some(own))
                } else {
                    self.build(r, fresh);
                    self.subtract(own, fresh);
                    (Some(own), Some(fresh))
                }
            }
            (true, false) => {
                self.build(l, own);
                (Some(own), None)
            }
            (false, true) => {
                self.build(r, own);
                (None, Some(own))
            }
            (false, false) => (None, None),
        };
        let li = self.grow(l, depth + 1, lh);
        let ri = self.grow(r, depth + 1, rh);
        self.tree.left[node] = li as u32;
        self.tree.right[node] = ri as u32;
        node
    }
}

/// Grow one tree on `rows` (indices into `binned`/`target`, repeats
/// allowed), splitting only on `features`.
pub(crate) fn grow_tree(
    binned: &BinnedMatrix,
    mapper: &BinMapper,
    target: &[f64],
    rows: &mut [u32],
    features: &[usize],
    p: GrowParams,
    pool: &mut HistPool,
) -> Tree {
    let mut features = features.to_vec();
    features.sort_unstable();
    let mut g = Grower {
        binned,
        mapper,
        target,
        features: &features,
        p,
        hists: &mut pool.0,
        tree: Tree {
            feature: Vec::new(),
            threshold: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            value: Vec::new(),
        },
    };
    if rows.is_empty() {
        return Tree::leaf(0.0);
    }
    let root = if g.can_split(rows.len(), 0) {
        g.build(rows, 0);
        Some(0)
    } else {
        None
    };
    g.grow(rows, 0, root);
    g.tree
}
