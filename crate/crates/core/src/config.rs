//! Vessel, mooring and workflow configuration read from TOML.
//!
//! Every section is optional; omitted keys take the built-in defaults. The
//! mooring line properties and vessel coefficients are synthetic values
//! sized for a 335 m hull in 400 m of water, not data for a real unit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::heading::HeadingConfig;
use crate::metocean::DatasetBounds;
use crate::mooring::{MooringSystem, SpreadLayout};
use crate::qd::QdConfig;
use crate::response::FdConfig;
use crate::vessel::VesselModel;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    pub n_states: usize,
    pub seed: u64,
    pub bounds: DatasetBounds,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            n_states: 20_000,
            seed: 7,
            bounds: DatasetBounds::reference(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            validation_fraction: 0.2,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub schema_version: u32,
    pub vessel: VesselModel,
    pub mooring: SpreadLayout,
    pub heading: HeadingConfig,
    pub fd: FdConfig,
    pub qd: QdConfig,
    pub sampling: SamplingConfig,
    pub split: SplitConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            vessel: VesselModel::default(),
            mooring: SpreadLayout::default(),
            heading: HeadingConfig::default(),
            fd: FdConfig::default(),
            qd: QdConfig::default(),
            sampling: SamplingConfig::default(),
            split: SplitConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| CoreError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            CoreError::Config(msg) => CoreError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(CoreError::Config(format!(
                "schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.vessel.validate().map_err(CoreError::Config)?;
        self.mooring.build()?;
        self.fd.validate()?;
        self.qd.validate()?;
        self.sampling.bounds.check()?;
        if !(0.0..1.0).contains(&self.split.validation_fraction) {
            return Err(CoreError::Config("split.validation_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn mooring_system(&self) -> Result<MooringSystem> {
        self.mooring.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn partial_section_keeps_other_defaults() {
        let cfg = Config::from_toml("[mooring]\ndepth = 400.0\n[qd]\nn_realizations = 4\n").unwrap();
        assert_eq!(cfg.qd.n_realizations, 4);
        assert_eq!(cfg.qd.dt, QdConfig::default().dt);
        assert_eq!(cfg.mooring, SpreadLayout::default());
    }

    #[test]
    fn round_trip_and_version_check() {
        let cfg = Config::default();
        assert_eq!(Config::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert!(matches!(Config::from_toml("schema_version = 2"), Err(CoreError::Config(_))));
        assert!(matches!(Config::from_toml("[qd]\ndt = -1.0"), Err(_)));
    }
}
