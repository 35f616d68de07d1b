//! Planar environmental loads on a turret-moored hull.
//!
//! Loads use low-order harmonics of the relative incidence
//! `α = θ_env − φ` (compass degrees, `α = 0` on the bow):
//!
//! ```text
//! fx = −A_x cos α          (surge, +toward bow)
//! fy =  A_y sin α          (sway, +to port)
//! mz = −A_m sin 2α − ℓ fy  (yaw about the turret, +counterclockwise)
//! ```
//!
//! `ℓ` is the distance from the turret back to the hull's lateral load
//! centre. With `ℓ A_y > 2 A_m` each component alone has exactly one stable
//! (bow-on) and one unstable (stern-on) heading.

use serde::{Deserialize, Serialize};

use crate::metocean::{Current, MetoceanState, WaveSystem, Wind, GRAVITY, RHO_AIR, RHO_WATER};

/// Body-axis load. `fx` toward the bow, `fy` to port, `mz` counterclockwise
/// seen from above, about the turret.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanarLoad {
    pub fx: f64,
    pub fy: f64,
    pub mz: f64,
}

impl PlanarLoad {
    pub const ZERO: PlanarLoad = PlanarLoad { fx: 0.0, fy: 0.0, mz: 0.0 };

    /// Horizontal force in global (east, north) axes for heading `phi` deg.
    pub fn to_global(&self, phi: f64) -> [f64; 2] {
        let (s, c) = phi.to_radians().sin_cos();
        // bow = (sin φ, cos φ), port = (−cos φ, sin φ)
        [self.fx * s - self.fy * c, self.fx * c + self.fy * s]
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            fx: self.fx * k,
            fy: self.fy * k,
            mz: self.mz * k,
        }
    }
}

impl std::ops::Add for PlanarLoad {
    type Output = PlanarLoad;
    fn add(self, o: PlanarLoad) -> PlanarLoad {
        PlanarLoad {
            fx: self.fx + o.fx,
            fy: self.fy + o.fy,
            mz: self.mz + o.mz,
        }
    }
}

impl std::iter::Sum for PlanarLoad {
    fn sum<I: Iterator<Item = PlanarLoad>>(iter: I) -> Self {
        iter.fold(PlanarLoad::ZERO, |a, b| a + b)
    }
}

/// Period dependence of the mean drift force: unit response up to
/// `tp_ref`, decaying as `(tp_ref/tp)^exponent` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriftShape {
    pub tp_ref: f64,
    pub exponent: f64,
}

impl Default for DriftShape {
    fn default() -> Self {
        Self {
            tp_ref: 8.0,
            exponent: 2.0,
        }
    }
}

impl DriftShape {
    pub fn response(&self, tp: f64) -> f64 {
        if tp <= self.tp_ref {
            1.0
        } else {
            (self.tp_ref / tp).powf(self.exponent)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VesselModel {
    pub loa: f64,
    pub beam: f64,
    pub draft: f64,
    pub wind_area_frontal: f64,
    pub wind_area_lateral: f64,
    pub current_area_frontal: f64,
    pub current_area_lateral: f64,
    pub cxw: f64,
    pub cyw: f64,
    pub cmw: f64,
    pub cxc: f64,
    pub cyc: f64,
    pub cmc: f64,
    pub cdx: f64,
    pub cdy: f64,
    pub cdm: f64,
    /// Turret to lateral load centre, m (turret forward of the centre).
    pub turret_lever: f64,
    pub drift_shape: DriftShape,
}

impl Default for VesselModel {
    /// VLCC-class hull, 335 m × 58 m. Coefficients are synthetic.
    fn default() -> Self {
        Self {
            loa: 335.0,
            beam: 58.0,
            draft: 22.0,
            wind_area_frontal: 1500.0,
            wind_area_lateral: 7000.0,
            current_area_frontal: 1276.0,
            current_area_lateral: 7370.0,
            cxw: 0.85,
            cyw: 0.90,
            cmw: 0.010,
            cxc: 0.60,
            cyc: 0.80,
            cmc: 0.008,
            cdx: 0.45,
            cdy: 0.25,
            cdm: 0.004,
            turret_lever: 120.0,
            drift_shape: DriftShape::default(),
        }
    }
}

impl VesselModel {
    pub fn validate(&self) -> Result<(), String> {
        let areas = [
            ("wind_area_frontal", self.wind_area_frontal),
            ("wind_area_lateral", self.wind_area_lateral),
            ("current_area_frontal", self.current_area_frontal),
            ("current_area_lateral", self.current_area_lateral),
            ("loa", self.loa),
            ("beam", self.beam),
            ("draft", self.draft),
        ];
        for (name, v) in areas {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be > 0"));
            }
        }
        let coeffs = [
            self.cxw, self.cyw, self.cmw, self.cxc, self.cyc, self.cmc, self.cdx, self.cdy,
            self.cdm, self.turret_lever,
        ];
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err("coefficient amplitudes must be finite".into());
        }
        if !(self.drift_shape.tp_ref > 0.0 && self.drift_shape.exponent >= 0.0) {
            return Err("drift shape needs tp_ref > 0 and exponent >= 0".into());
        }
        Ok(())
    }
}

/// Harmonic amplitudes of one environment component.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Harmonic {
    theta: f64,
    ax: f64,
    ay: f64,
    am: f64,
}

impl Harmonic {
    fn load(&self, lever: f64, phi: f64) -> PlanarLoad {
        let a = (self.theta - phi).rem_euclid(360.0).to_radians();
        let (s, c) = a.sin_cos();
        let fy = self.ay * s;
        PlanarLoad {
            fx: -self.ax * c,
            fy,
            mz: -self.am * (2.0 * s * c) - lever * fy,
        }
    }
}

fn wind_harmonic(v: &VesselModel, w: &Wind) -> Harmonic {
    let q = 0.5 * RHO_AIR * w.uw * w.uw;
    Harmonic {
        theta: w.theta_w,
        ax: q * v.wind_area_frontal * v.cxw,
        ay: q * v.wind_area_lateral * v.cyw,
        am: q * v.wind_area_lateral * v.loa * v.cmw,
    }
}

fn current_harmonic(v: &VesselModel, c: &Current) -> Harmonic {
    let q = 0.5 * RHO_WATER * c.uc * c.uc;
    Harmonic {
        theta: c.theta_c,
        ax: q * v.current_area_frontal * v.cxc,
        ay: q * v.current_area_lateral * v.cyc,
        am: q * v.current_area_lateral * v.loa * v.cmc,
    }
}

fn drift_harmonic(v: &VesselModel, wave: &WaveSystem) -> Harmonic {
    let f0 = 0.125 * RHO_WATER * GRAVITY * wave.hs * wave.hs * v.drift_shape.response(wave.tp);
    Harmonic {
        theta: wave.theta_p,
        ax: f0 * v.beam * v.cdx,
        ay: f0 * v.loa * v.cdy,
        am: f0 * v.loa * v.loa * v.cdm,
    }
}

fn harmonics(v: &VesselModel, s: &MetoceanState) -> [Harmonic; 4] {
    [
        wind_harmonic(v, &s.wind),
        current_harmonic(v, &s.current),
        drift_harmonic(v, &s.wave1),
        drift_harmonic(v, &s.wave2),
    ]
}

pub fn wind_load(v: &VesselModel, w: &Wind, phi: f64) -> PlanarLoad {
    wind_harmonic(v, w).load(v.turret_lever, phi)
}

pub fn current_load(v: &VesselModel, c: &Current, phi: f64) -> PlanarLoad {
    current_harmonic(v, c).load(v.turret_lever, phi)
}

/// Mean second-order drift load, `∝ hs² D(tp)`.
pub fn mean_wave_drift_load(v: &VesselModel, wave: &WaveSystem, phi: f64) -> PlanarLoad {
    if wave.hs == 0.0 {
        return PlanarLoad::ZERO;
    }
    drift_harmonic(v, wave).load(v.turret_lever, phi)
}

/// Per-component loads in the fixed order wind, current, wave1, wave2.
pub fn component_loads(v: &VesselModel, s: &MetoceanState, phi: f64) -> [PlanarLoad; 4] {
    [
        wind_load(v, &s.wind, phi),
        current_load(v, &s.current, phi),
        mean_wave_drift_load(v, &s.wave1, phi),
        mean_wave_drift_load(v, &s.wave2, phi),
    ]
}

pub fn total_mean_load(v: &VesselModel, s: &MetoceanState, phi: f64) -> PlanarLoad {
    component_loads(v, s, phi).into_iter().sum()
}

/// Net environmental yaw moment about the turret in the sense of increasing
/// compass heading (clockwise seen from above), N·m. This is the negative of
/// the summed counterclockwise `mz`, so stable headings have `dM/dφ < 0`.
pub fn net_yaw_moment(v: &VesselModel, s: &MetoceanState, phi: f64) -> f64 {
    -component_loads(v, s, phi).iter().map(|l| l.mz).sum::<f64>()
}

/// Precomputed harmonic amplitudes of the yaw moment for one state, so the
/// heading solver can evaluate `M(φ)` without recomputing dynamic pressures.
#[derive(Debug, Clone)]
pub struct YawMomentProfile {
    // (theta_env rad, A_y·ℓ, A_m) per component
    terms: Vec<(f64, f64, f64)>,
}

impl YawMomentProfile {
    pub fn new(v: &VesselModel, s: &MetoceanState) -> Self {
        let terms = harmonics(v, s)
            .iter()
            .filter(|h| h.ay != 0.0 || h.am != 0.0)
            .map(|h| (h.theta.to_radians(), h.ay * v.turret_lever, h.am))
            .collect();
        Self { terms }
    }

    /// `M(φ)` with φ in radians.
    pub fn moment(&self, phi_rad: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(th, a1, a2)| {
                let a = th - phi_rad;
                a1 * a.sin() + a2 * (2.0 * a).sin()
            })
            .sum()
    }

    /// `dM/dφ` with φ in radians.
    pub fn moment_slope(&self, phi_rad: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(th, a1, a2)| {
                let a = th - phi_rad;
                -a1 * a.cos() - 2.0 * a2 * (2.0 * a).cos()
            })
            .sum()
    }

    /// Exact antiderivative-based potential `V(φ) − V(0)` (φ radians).
    pub fn potential(&self, phi_rad: f64) -> f64 {
        // V = −∫₀^φ M dφ', with ∫ sin(θ−φ) dφ = cos(θ−φ)
        -self
            .terms
            .iter()
            .map(|&(th, a1, a2)| {
                a1 * ((th - phi_rad).cos() - th.cos())
                    + 0.5 * a2 * ((2.0 * (th - phi_rad)).cos() - (2.0 * th).cos())
            })
            .sum::<f64>()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|&(_, a1, a2)| a1 == 0.0 && a2 == 0.0)
    }
}
