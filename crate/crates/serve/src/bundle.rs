//! Model bundle container: magic, schema version, payload length,
//! SHA-256 of the payload, then the JSON payload. See
//! `docs/bundle-format.md`.

use std::collections::BTreeMap;
use std::path::Path;

use moorcast_core::dataset::{FeatureBound, FEATURE_NAMES, FEATURE_SCHEMA_VERSION};
use moorcast_core::heading::HeadingConfig;
use moorcast_core::vessel::VesselModel;
use moorcast_ml::{AngularModel, Metrics, Model};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ServeError};

pub const MAGIC: &[u8; 8] = b"MOORCAST";
pub const BUNDLE_SCHEMA_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Allowable line tension, N.
    pub tension_n: f64,
    /// Allowable turret offset, m.
    pub offset_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetModels {
    pub mpm_offset: Model,
    pub offset_dir: AngularModel,
    pub mpm_t_fair: Model,
    pub mpm_t_anchor: Model,
}

impl TargetModels {
    fn all(&self) -> [&Model; 5] {
        [
            &self.mpm_offset,
            &self.offset_dir.east,
            &self.offset_dir.north,
            &self.mpm_t_fair,
            &self.mpm_t_anchor,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    /// Content id: first 16 hex digits of the payload SHA-256, filled on save.
    pub bundle_id: String,
    pub created_unix: u64,
    pub feature_schema_version: u32,
    pub n_train: usize,
    pub n_validation: usize,
    pub split_seed: u64,
    pub train_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    pub models: TargetModels,
    pub bounds: Vec<FeatureBound>,
    pub limits: Limits,
    /// Validation metrics per target name.
    pub metrics: BTreeMap<String, Metrics>,
    /// Physics used for the heading solve at prediction time.
    pub vessel: VesselModel,
    pub heading: HeadingConfig,
    pub meta: BundleMeta,
}

impl ModelBundle {
    pub fn validate(&self) -> Result<()> {
        let expected: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
        if self.feature_names != expected {
            return Err(ServeError::Incompatible(format!(
                "bundle features {:?} differ from feature schema v{FEATURE_SCHEMA_VERSION}",
                self.feature_names
            )));
        }
        for m in self.models.all() {
            m.check_features(&self.feature_names)?;
        }
        if self.bounds.len() != self.feature_names.len()
            || self.bounds.iter().zip(&self.feature_names).any(|(b, n)| &b.name != n || !(b.min <= b.max))
        {
            return Err(ServeError::Incompatible("bounds do not match the feature list".into()));
        }
        if !(self.limits.tension_n > 0.0 && self.limits.offset_m > 0.0) {
            return Err(ServeError::Incompatible("limits must be positive".into()));
        }
        Ok(())
    }

    pub fn version(&self) -> String {
        format!("v{}-{}", self.schema_version, self.meta.bundle_id)
    }
}

fn payload_digest(payload: &[u8]) -> [u8; 32] {
    Sha256::digest(payload).into()
}

fn hex16(d: &[u8; 32]) -> String {
    d[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Serialize with `meta.bundle_id` left empty, hash, then stamp the id.
pub fn encode_bundle(bundle: &ModelBundle) -> Result<(Vec<u8>, String)> {
    bundle.validate()?;
    let mut b = bundle.clone();
    b.meta.bundle_id.clear();
    let unstamped = serde_json::to_vec(&b)?;
    b.meta.bundle_id = hex16(&payload_digest(&unstamped));
    let payload = serde_json::to_vec(&b)?;
    let digest = payload_digest(&payload);
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&b.schema_version.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&digest);
    out.extend_from_slice(&payload);
    Ok((out, b.meta.bundle_id))
}

pub fn decode_bundle(bytes: &[u8]) -> Result<ModelBundle> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(ServeError::Corrupt("missing bundle header".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != BUNDLE_SCHEMA_VERSION {
        return Err(ServeError::Incompatible(format!(
            "bundle schema_version {version}, this build reads {BUNDLE_SCHEMA_VERSION}"
        )));
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
    let payload = &bytes[HEADER_LEN..];
    let stored: [u8; 32] = bytes[20..52].try_into().expect("32 bytes");
    if payload.len() != len || payload_digest(payload) != stored {
        return Err(ServeError::Corrupt(format!(
            "checksum mismatch (payload {} of {len} bytes)",
            payload.len()
        )));
    }
    let b: ModelBundle = serde_json::from_slice(payload)?;
    if b.schema_version != version {
        return Err(ServeError::Corrupt("header and payload schema versions differ".into()));
    }
    b.validate()?;
    Ok(b)
}

/// Write atomically through a temporary file. Returns the bundle id.
pub fn save_bundle(bundle: &ModelBundle, path: &Path) -> Result<String> {
    let (bytes, id) = encode_bundle(bundle)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(id)
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle> {
    decode_bundle(&std::fs::read(path)?)
}
