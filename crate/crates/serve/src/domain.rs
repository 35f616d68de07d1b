//! Axis-aligned interpolation guard over the training feature box.

use moorcast_core::dataset::FeatureBound;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainViolation {
    pub feature: String,
    pub value: f64,
    pub side: BoundSide,
    /// The admitted limit, margin included.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub ok: bool,
    pub violations: Vec<DomainViolation>,
}

/// Check each feature against `[min − m·span, max + m·span]` where `m` is
/// the relative margin and `span = max − min`.
pub fn domain_check(bounds: &[FeatureBound], features: &[f64], margin: f64) -> DomainReport {
    let mut violations = Vec::new();
    for (b, &x) in bounds.iter().zip(features) {
        let pad = margin.max(0.0) * (b.max - b.min);
        let (lo, hi) = (b.min - pad, b.max + pad);
        if !(x >= lo) {
            violations.push(DomainViolation {
                feature: b.name.clone(),
                value: x,
                side: BoundSide::Min,
                bound: lo,
            });
        } else if x > hi {
            violations.push(DomainViolation {
                feature: b.name.clone(),
                value: x,
                side: BoundSide::Max,
                bound: hi,
            });
        }
    }
    DomainReport {
        ok: violations.is_empty(),
        violations,
    }
}
