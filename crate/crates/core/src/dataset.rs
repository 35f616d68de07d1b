//! Training corpus assembly: features with east/north angle components,
//! FD rows overridden by QD for critical states, and a stratified
//! train/validation split.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::heading::HeadingSolution;
use crate::metocean::{wrap_deg, MetoceanState};
use crate::response::{ResponseRecord, Source};
use crate::rng::rng_from_seed;

/// Bumped whenever the feature or target layout changes.
pub const FEATURE_SCHEMA_VERSION: u32 = 1;

pub const N_FEATURES: usize = 16;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "hs1", "tp1", "hs2", "tp2", "uw", "uc", "thp1_e", "thp1_n", "thp2_e", "thp2_n", "thw_e", "thw_n", "thc_e",
    "thc_n", "phi_eq_e", "phi_eq_n",
];

pub const N_TARGETS: usize = 5;

pub const TARGET_NAMES: [&str; N_TARGETS] = [
    "mpm_offset",
    "offset_dir_e",
    "offset_dir_n",
    "mpm_t_fair",
    "mpm_t_anchor",
];

/// `(east, north) = (sin θ, cos θ)` for a compass angle in degrees.
pub fn angular_decompose(theta: f64) -> (f64, f64) {
    let (s, c) = theta.to_radians().sin_cos();
    (s, c)
}

/// Compass angle in `[0, 360)` from an (east, north) pair.
pub fn angular_reconstruct(east: f64, north: f64) -> Result<f64> {
    if !(east.is_finite() && north.is_finite()) || (east == 0.0 && north == 0.0) {
        return Err(CoreError::NoDirection);
    }
    Ok(wrap_deg(east.atan2(north).to_degrees()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Index pairs of the (east, north) columns.
    pub const ANGULAR_PAIRS: [(usize, usize); 5] = [(6, 7), (8, 9), (10, 11), (12, 13), (14, 15)];
}

pub fn feature_row(s: &MetoceanState, phi_eq: f64) -> FeatureVector {
    let pair = |theta: f64| angular_decompose(theta);
    let (p1e, p1n) = pair(s.wave1.theta_p);
    // an absent swell has no direction
    let (p2e, p2n) = if s.wave2.hs == 0.0 { (0.0, 0.0) } else { pair(s.wave2.theta_p) };
    let (we, wn) = pair(s.wind.theta_w);
    let (ce, cn) = pair(s.current.theta_c);
    let (he, hn) = pair(phi_eq);
    FeatureVector([
        s.wave1.hs,
        s.wave1.tp,
        s.wave2.hs,
        s.wave2.tp,
        s.wind.uw,
        s.current.uc,
        p1e,
        p1n,
        p2e,
        p2n,
        we,
        wn,
        ce,
        cn,
        he,
        hn,
    ])
}

pub fn build_feature_row(s: &MetoceanState, h: &HeadingSolution) -> FeatureVector {
    feature_row(s, h.phi_eq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBound {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTable {
    pub ids: Vec<String>,
    pub features: Vec<FeatureVector>,
    pub targets: Vec<[f64; N_TARGETS]>,
    pub split: Vec<Split>,
    pub source: Vec<Source>,
    /// Per-feature min/max over the training rows.
    pub bounds: Vec<FeatureBound>,
    pub split_seed: u64,
    pub split_fraction: f64,
}

impl TrainingTable {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn rows(&self, which: Split) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.split[i] == which).collect()
    }

    pub fn target_index(name: &str) -> Option<usize> {
        TARGET_NAMES.iter().position(|n| *n == name)
    }

    pub fn count_source(&self, src: Source) -> usize {
        self.source.iter().filter(|s| **s == src).count()
    }
}

fn targets_of(r: &ResponseRecord) -> [f64; N_TARGETS] {
    let (e, n) = angular_decompose(r.stats.offset_dir);
    [r.stats.mpm_offset, e, n, r.stats.mpm_t_fair, r.stats.mpm_t_anchor]
}

fn index_by_id<'a>(records: &'a [ResponseRecord], what: &str) -> Result<HashMap<&'a str, &'a ResponseRecord>> {
    let mut map = HashMap::with_capacity(records.len());
    for r in records {
        if map.insert(r.id.as_str(), r).is_some() {
            return Err(CoreError::DuplicateId(format!("{} ({what})", r.id)));
        }
    }
    Ok(map)
}

/// Decile index of each value (ties share a decile).
fn deciles(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let n = values.len();
    let mut out = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = (rank * 10 / n).min(9);
    }
    out
}

/// Merge FD and QD results into a training table. `screened` lists the
/// critical ids; each must have exactly one QD record and no other id may.
pub fn assemble_dataset(
    states: &[MetoceanState],
    fd_results: &[ResponseRecord],
    qd_results: &[ResponseRecord],
    screened: &[String],
    split_fraction: f64,
    seed: u64,
) -> Result<TrainingTable> {
    if !(0.0..1.0).contains(&split_fraction) {
        return Err(CoreError::InvalidInput(format!(
            "split fraction {split_fraction} outside [0, 1)"
        )));
    }
    let fd = index_by_id(fd_results, "FD results")?;
    let qd = index_by_id(qd_results, "QD results")?;
    let flagged: HashSet<&str> = screened.iter().map(String::as_str).collect();
    for id in &flagged {
        if !qd.contains_key(id) {
            return Err(CoreError::MissingQd(id.to_string()));
        }
    }
    if let Some(extra) = qd.keys().find(|id| !flagged.contains(*id)) {
        return Err(CoreError::InvalidInput(format!(
            "QD result for {extra}, which was not screened as critical"
        )));
    }

    let mut seen = HashSet::with_capacity(states.len());
    let mut ids = Vec::with_capacity(states.len());
    let mut features = Vec::with_capacity(states.len());
    let mut targets = Vec::with_capacity(states.len());
    let mut source = Vec::with_capacity(states.len());
    for s in states {
        if !seen.insert(s.id.as_str()) {
            return Err(CoreError::DuplicateId(s.id.clone()));
        }
        let rec = match qd.get(s.id.as_str()) {
            Some(r) => *r,
            None => *fd.get(s.id.as_str()).ok_or_else(|| {
                CoreError::InvalidInput(format!("no FD result for state {}", s.id))
            })?,
        };
        ids.push(s.id.clone());
        features.push(feature_row(s, rec.stats.phi_eq));
        targets.push(targets_of(rec));
        source.push(rec.stats.source);
    }

    let split = stratified_split(&targets.iter().map(|t| t[0]).collect::<Vec<_>>(), split_fraction, seed);
    let bounds = feature_bounds(&features, &split);
    Ok(TrainingTable {
        ids,
        features,
        targets,
        split,
        source,
        bounds,
        split_seed: seed,
        split_fraction,
    })
}

/// Validation rows drawn per decile of `strat` so each decile contributes
/// `round(fraction · size)` rows.
pub fn stratified_split(strat: &[f64], fraction: f64, seed: u64) -> Vec<Split> {
    let mut split = vec![Split::Train; strat.len()];
    if strat.is_empty() {
        return split;
    }
    let dec = deciles(strat);
    let mut rng = rng_from_seed(seed);
    for d in 0..10 {
        let mut members: Vec<usize> = (0..strat.len()).filter(|&i| dec[i] == d).collect();
        members.shuffle(&mut rng);
        let take = (fraction * members.len() as f64).round() as usize;
        for &i in &members[..take] {
            split[i] = Split::Validation;
        }
    }
    split
}

fn feature_bounds(features: &[FeatureVector], split: &[Split]) -> Vec<FeatureBound> {
    FEATURE_NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let (min, max) = features
                .iter()
                .zip(split)
                .filter(|(_, s)| **s == Split::Train)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (f, _)| {
                    (lo.min(f.0[j]), hi.max(f.0[j]))
                });
            FeatureBound {
                name: name.to_string(),
                min,
                max,
            }
        })
        .collect()
}

/// Sidecar metadata written next to the table CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    pub target_names: Vec<String>,
    pub bounds: Vec<FeatureBound>,
    pub split_seed: u64,
    pub split_fraction: f64,
    pub n_train: usize,
    pub n_validation: usize,
    pub n_fd: usize,
    pub n_qd: usize,
}

fn table_header() -> Vec<String> {
    ["id", "split", "source"]
        .into_iter()
        .chain(FEATURE_NAMES)
        .chain(TARGET_NAMES)
        .map(str::to_owned)
        .collect()
}

fn split_str(s: Split) -> &'static str {
    match s {
        Split::Train => "train",
        Split::Validation => "validation",
    }
}

/// Write `<path>` (CSV) and `<path>.meta.json`.
pub fn save_table(path: &Path, t: &TrainingTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(table_header())?;
    for i in 0..t.len() {
        let mut rec = vec![t.ids[i].clone(), split_str(t.split[i]).into(), t.source[i].as_str().into()];
        rec.extend(t.features[i].0.iter().map(|v| v.to_string()));
        rec.extend(t.targets[i].iter().map(|v| v.to_string()));
        w.write_record(rec)?;
    }
    w.flush()?;
    let meta = TableMetadata {
        schema_version: FEATURE_SCHEMA_VERSION,
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        target_names: TARGET_NAMES.iter().map(|s| s.to_string()).collect(),
        bounds: t.bounds.clone(),
        split_seed: t.split_seed,
        split_fraction: t.split_fraction,
        n_train: t.rows(Split::Train).len(),
        n_validation: t.rows(Split::Validation).len(),
        n_fd: t.count_source(Source::Fd),
        n_qd: t.count_source(Source::Qd),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| CoreError::InvalidInput(e.to_string()))?;
    std::fs::write(meta_path(path), json)?;
    Ok(())
}

pub fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta.json");
    p.into()
}

pub fn load_table(path: &Path) -> Result<TrainingTable> {
    let meta: TableMetadata = serde_json::from_str(&std::fs::read_to_string(meta_path(path))?)
        .map_err(|e| CoreError::InvalidInput(format!("table metadata: {e}")))?;
    if meta.schema_version != FEATURE_SCHEMA_VERSION {
        return Err(CoreError::InvalidInput(format!(
            "table schema version {} is not supported (expected {FEATURE_SCHEMA_VERSION})",
            meta.schema_version
        )));
    }
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != table_header() {
        return Err(CoreError::InvalidInput("training table header mismatch".into()));
    }
    let mut t = TrainingTable {
        ids: Vec::new(),
        features: Vec::new(),
        targets: Vec::new(),
        split: Vec::new(),
        source: Vec::new(),
        bounds: meta.bounds,
        split_seed: meta.split_seed,
        split_fraction: meta.split_fraction,
    };
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| CoreError::InvalidInput(format!("bad number `{s}` in training table")))
    };
    for rec in r.records() {
        let rec = rec?;
        t.ids.push(rec[0].to_owned());
        t.split.push(match &rec[1] {
            "train" => Split::Train,
            "validation" => Split::Validation,
            other => return Err(CoreError::InvalidInput(format!("bad split `{other}`"))),
        });
        t.source.push(match &rec[2] {
            "FD" => Source::Fd,
            "QD" => Source::Qd,
            other => return Err(CoreError::InvalidInput(format!("bad source `{other}`"))),
        });
        let mut f = [0.0; N_FEATURES];
        for (j, v) in f.iter_mut().enumerate() {
            *v = num(&rec[3 + j])?;
        }
        let mut y = [0.0; N_TARGETS];
        for (j, v) in y.iter_mut().enumerate() {
            *v = num(&rec[3 + N_FEATURES + j])?;
        }
        t.features.push(FeatureVector(f));
        t.targets.push(y);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metocean::{Current, WaveSystem, Wind};
    use crate::response::ResponseStatistics;

    #[test]
    fn decompose_reference_angles() {
        let (e, n) = angular_decompose(0.0);
        assert!(e.abs() < 1e-15 && (n - 1.0).abs() < 1e-15);
        let (e, n) = angular_decompose(90.0);
        assert!((e - 1.0).abs() < 1e-15 && n.abs() < 1e-15);
        let (e, n) = angular_decompose(223.61);
        assert!((e + 0.690).abs() < 1e-3 && (n + 0.724).abs() < 1e-3);
    }

    #[test]
    fn reconstruct_reference_vectors() {
        assert!((angular_reconstruct(0.5, 0.5).unwrap() - 45.0).abs() < 1e-12);
        assert!((angular_reconstruct(0.0, -1.0).unwrap() - 180.0).abs() < 1e-12);
        assert!(matches!(angular_reconstruct(0.0, 0.0), Err(CoreError::NoDirection)));
        let worst = (0..3600)
            .map(|k| {
                let th = k as f64 * 0.1;
                let (e, n) = angular_decompose(th);
                crate::metocean::angle_diff_deg(angular_reconstruct(e, n).unwrap(), th).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-9);
    }

    #[test]
    fn calm_feature_row() {
        let f = feature_row(&MetoceanState::calm("c"), 0.0);
        for name in ["hs1", "hs2", "uw", "uc", "thp2_e", "thp2_n"] {
            assert_eq!(f.get(name), Some(0.0), "{name}");
        }
        assert_eq!((f.get("phi_eq_e"), f.get("phi_eq_n")), (Some(0.0), Some(1.0)));
    }

    fn record(id: &str, offset: f64, source: Source) -> ResponseRecord {
        ResponseRecord {
            id: id.into(),
            stats: ResponseStatistics {
                phi_eq: 10.0,
                mean_offset: [0.0, offset * 0.5],
                mpm_offset: offset,
                offset_dir: 30.0,
                mpm_t_fair: 2e6,
                mpm_t_anchor: 1.5e6,
                sigma_lf: 1.0,
                sigma_wf: 0.1,
                source,
                daf_applied: true,
            },
        }
    }

    fn states(n: usize) -> Vec<MetoceanState> {
        (0..n)
            .map(|i| MetoceanState {
                id: format!("s{i}"),
                wave1: WaveSystem::new(1.0 + (i % 7) as f64, 9.0, (i * 37 % 360) as f64),
                wave2: WaveSystem::new(1.0, 13.0, 100.0),
                wind: Wind { uw: 10.0, theta_w: 20.0 },
                current: Current { uc: 0.5, theta_c: 40.0 },
            })
            .collect()
    }

    #[test]
    fn split_sizes_and_determinism() {
        let st = states(1000);
        let fd: Vec<_> = st.iter().enumerate().map(|(i, s)| record(&s.id, i as f64 * 0.37 % 50.0, Source::Fd)).collect();
        let a = assemble_dataset(&st, &fd, &[], &[], 0.2, 9).unwrap();
        let nv = a.rows(Split::Validation).len();
        assert!((nv as i64 - 200).abs() <= 10, "{nv}");
        let b = assemble_dataset(&st, &fd, &[], &[], 0.2, 9).unwrap();
        assert_eq!(a.split, b.split);
        assert_eq!(a.count_source(Source::Qd), 0);
        for (j, b) in a.bounds.iter().enumerate() {
            for i in a.rows(Split::Train) {
                assert!(a.features[i].0[j] >= b.min && a.features[i].0[j] <= b.max);
            }
        }
    }

    #[test]
    fn qd_overrides_and_errors() {
        let st = states(10);
        let fd: Vec<_> = st.iter().map(|s| record(&s.id, 5.0, Source::Fd)).collect();
        let qd = vec![record("s3", 9.0, Source::Qd)];
        let t = assemble_dataset(&st, &fd, &qd, &["s3".into()], 0.2, 1).unwrap();
        assert_eq!(t.count_source(Source::Qd), 1);
        assert_eq!(t.targets[3][0], 9.0);
        assert!(matches!(
            assemble_dataset(&st, &fd, &[], &["s3".into()], 0.2, 1),
            Err(CoreError::MissingQd(_))
        ));
        let mut dup = st.clone();
        dup.push(st[0].clone());
        assert!(matches!(
            assemble_dataset(&dup, &fd, &[], &[], 0.2, 1),
            Err(CoreError::DuplicateId(_))
        ));
    }

    #[test]
    fn table_file_round_trip() {
        let st = states(30);
        let fd: Vec<_> = st.iter().enumerate().map(|(i, s)| record(&s.id, i as f64, Source::Fd)).collect();
        let t = assemble_dataset(&st, &fd, &[], &[], 0.2, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("table.csv");
        save_table(&p, &t).unwrap();
        assert_eq!(load_table(&p).unwrap(), t);
    }
}
