//! Metocean states: two JONSWAP wave systems, wind and a surface current.
//!
//! Directions are compass degrees, clockwise from North, and always give the
//! direction the environment comes *from*.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result, Violation};
use crate::rng::rng_from_seed;

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.80665;
/// Sea water density, kg/m³.
pub const RHO_WATER: f64 = 1025.0;
/// Air density, kg/m³.
pub const RHO_AIR: f64 = 1.225;

/// Lower edge of the wave frequency band, rad/s.
pub const OMEGA_MIN: f64 = 0.05;
/// Upper edge of the wave frequency band, rad/s.
pub const OMEGA_MAX: f64 = 2.0;

const NORMALIZATION_INTERVALS: usize = 4096;

/// Wrap an angle in degrees into `[0, 360)`.
pub fn wrap_deg(theta: f64) -> f64 {
    let w = theta.rem_euclid(360.0);
    // rem_euclid can return 360.0 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Signed smallest difference `a - b` in `(-180, 180]` degrees.
pub fn angle_diff_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSystem {
    /// Significant wave height, m.
    pub hs: f64,
    /// Peak period, s.
    pub tp: f64,
    /// Peak direction ("from"), deg.
    pub theta_p: f64,
    pub gamma: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
}

impl WaveSystem {
    pub fn new(hs: f64, tp: f64, theta_p: f64) -> Self {
        Self {
            hs,
            tp,
            theta_p,
            gamma: 3.3,
            sigma_a: 0.07,
            sigma_b: 0.09,
        }
    }

    pub fn calm() -> Self {
        Self::new(0.0, 8.0, 0.0)
    }

    fn validate_into(&self, prefix: &str, out: &mut Vec<Violation>) {
        let f = |name: &str| format!("{prefix}.{name}");
        if !(self.hs >= 0.0 && self.hs.is_finite()) {
            out.push(Violation::new(f("hs"), format!("must be finite and >= 0, got {}", self.hs)));
        }
        if !self.tp.is_finite() || (self.hs > 0.0 && self.tp <= 0.0) || self.tp < 0.0 {
            out.push(Violation::new(f("tp"), format!("must be > 0 when hs > 0, got {}", self.tp)));
        }
        check_direction(self.theta_p, &f("theta_p"), out);
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            out.push(Violation::new(f("gamma"), format!("must be >= 1, got {}", self.gamma)));
        }
        for (name, v) in [("sigma_a", self.sigma_a), ("sigma_b", self.sigma_b)] {
            if !(v > 0.0 && v < 1.0) {
                out.push(Violation::new(f(name), format!("must lie in (0, 1), got {v}")));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wind {
    /// 1-hour mean speed at 10 m, m/s.
    pub uw: f64,
    pub theta_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Current {
    /// Surface speed, m/s.
    pub uc: f64,
    pub theta_c: f64,
}

fn check_direction(theta: f64, field: &str, out: &mut Vec<Violation>) {
    if !(theta >= 0.0 && theta < 360.0) {
        out.push(Violation::new(field, format!("must lie in [0, 360), got {theta}")));
    }
}

fn check_speed(u: f64, field: &str, out: &mut Vec<Violation>) {
    if !(u >= 0.0 && u.is_finite()) {
        out.push(Violation::new(field, format!("must be finite and >= 0, got {u}")));
    }
}

/// One 3-hour environmental combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetoceanState {
    pub id: String,
    /// Wind sea.
    pub wave1: WaveSystem,
    /// Swell.
    pub wave2: WaveSystem,
    pub wind: Wind,
    pub current: Current,
}

impl MetoceanState {
    pub fn calm(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            wave1: WaveSystem::calm(),
            wave2: WaveSystem::calm(),
            wind: Wind { uw: 0.0, theta_w: 0.0 },
            current: Current { uc: 0.0, theta_c: 0.0 },
        }
    }

    pub fn waves(&self) -> [&WaveSystem; 2] {
        [&self.wave1, &self.wave2]
    }

    /// Rotate every environment direction by `delta` degrees.
    pub fn rotated(&self, delta: f64) -> Self {
        let mut s = self.clone();
        s.wave1.theta_p = wrap_deg(s.wave1.theta_p + delta);
        s.wave2.theta_p = wrap_deg(s.wave2.theta_p + delta);
        s.wind.theta_w = wrap_deg(s.wind.theta_w + delta);
        s.current.theta_c = wrap_deg(s.current.theta_c + delta);
        s
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate_state(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(CoreError::InvalidState {
                id: self.id.clone(),
                violations,
            })
        }
    }
}

/// Every violated type invariant of `s`, named by field path. Empty when valid.
pub fn validate_state(s: &MetoceanState) -> Vec<Violation> {
    let mut out = Vec::new();
    if s.id.is_empty() {
        out.push(Violation::new("id", "must not be empty"));
    }
    s.wave1.validate_into("wave1", &mut out);
    s.wave2.validate_into("wave2", &mut out);
    check_speed(s.wind.uw, "wind.uw", &mut out);
    check_direction(s.wind.theta_w, "wind.theta_w", &mut out);
    check_speed(s.current.uc, "current.uc", &mut out);
    check_direction(s.current.theta_c, "current.theta_c", &mut out);
    out
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// A JONSWAP spectrum normalized so that its zeroth moment over the wave
/// band `(OMEGA_MIN, OMEGA_MAX]` equals `(hs/4)²`.
#[derive(Debug, Clone, Copy)]
pub struct JonswapSpectrum {
    wp: f64,
    gamma: f64,
    sigma_a: f64,
    sigma_b: f64,
    scale: f64,
}

impl JonswapSpectrum {
    pub fn new(wave: &WaveSystem) -> Result<Self> {
        let params = [wave.hs, wave.tp, wave.gamma, wave.sigma_a, wave.sigma_b];
        if params.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput(format!(
                "non-finite JONSWAP parameters {params:?}"
            )));
        }
        if wave.hs < 0.0 {
            return Err(CoreError::InvalidInput(format!("hs = {} < 0", wave.hs)));
        }
        let mut spec = Self {
            wp: if wave.tp > 0.0 { 2.0 * PI / wave.tp } else { 1.0 },
            gamma: wave.gamma,
            sigma_a: wave.sigma_a,
            sigma_b: wave.sigma_b,
            scale: 0.0,
        };
        if wave.hs == 0.0 {
            return Ok(spec);
        }
        if wave.tp <= 0.0 {
            return Err(CoreError::InvalidInput(format!("tp = {} with hs > 0", wave.tp)));
        }
        let m0_shape = simpson(|w| spec.shape(w), OMEGA_MIN, OMEGA_MAX, NORMALIZATION_INTERVALS);
        if !(m0_shape > 0.0 && m0_shape.is_finite()) {
            return Err(CoreError::InvalidInput(format!(
                "JONSWAP peak at {:.3} rad/s carries no energy inside the wave band",
                spec.wp
            )));
        }
        spec.scale = wave.hs * wave.hs / 16.0 / m0_shape;
        Ok(spec)
    }

    fn shape(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let sigma = if w <= self.wp { self.sigma_a } else { self.sigma_b };
        let r = (-(w - self.wp).powi(2) / (2.0 * sigma * sigma * self.wp * self.wp)).exp();
        let ratio = self.wp / w;
        w.powi(-5) * (-1.25 * ratio.powi(4)).exp() * self.gamma.powf(r)
    }

    /// Spectral density at `w` rad/s, m²·s/rad.
    pub fn density(&self, w: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * self.shape(w)
        }
    }

    pub fn peak_frequency(&self) -> f64 {
        self.wp
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
    }
}

/// Composite Simpson rule with `n` (even) intervals.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(CoreError::InvalidInput(format!("empty {what} grid")));
    }
    if grid.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(CoreError::InvalidInput(format!("{what} grid must be finite and > 0")));
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(CoreError::InvalidInput(format!("{what} grid must be strictly ascending")));
    }
    Ok(())
}

/// JONSWAP spectral density of `wave` on `omega_grid` (rad/s), in m²·s/rad.
pub fn jonswap_spectrum(wave: &WaveSystem, omega_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(omega_grid, "frequency")?;
    let spec = JonswapSpectrum::new(wave)?;
    Ok(omega_grid.iter().map(|&w| spec.density(w)).collect())
}

/// Evenly spaced angular frequency grid over the wave band.
pub fn default_omega_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    let dw = (OMEGA_MAX - OMEGA_MIN) / (n - 1) as f64;
    (0..n).map(|i| OMEGA_MIN + i as f64 * dw).collect()
}

const NPD_EXPONENT: f64 = 0.468;

/// NPD (ISO 19901-1) wind gust spectrum in (m/s)²/Hz for a 1-hour mean speed
/// `uw` at 10 m, evaluated at height `z` on `f_grid` (Hz).
pub fn npd_wind_spectrum(uw: f64, z: f64, f_grid: &[f64]) -> Result<Vec<f64>> {
    if !(uw.is_finite() && uw >= 0.0) || !(z.is_finite() && z > 0.0) {
        return Err(CoreError::InvalidInput(format!(
            "NPD spectrum needs uw >= 0 and z > 0, got uw={uw}, z={z}"
        )));
    }
    check_grid(f_grid, "frequency")?;
    if uw == 0.0 {
        return Ok(vec![0.0; f_grid.len()]);
    }
    let u = uw / 10.0;
    let zr = z / 10.0;
    let amplitude = 320.0 * u * u * zr.powf(0.45);
    Ok(f_grid
        .iter()
        .map(|&f| {
            let ft = npd_scaled_frequency(uw, z, f);
            amplitude / (1.0 + ft.powf(NPD_EXPONENT)).powf(5.0 / (3.0 * NPD_EXPONENT))
        })
        .collect())
}

/// Dimensionless NPD frequency `f̃ = 172 f (z/10)^(2/3) (uw/10)^(-3/4)`.
pub fn npd_scaled_frequency(uw: f64, z: f64, f: f64) -> f64 {
    172.0 * f * (z / 10.0).powf(2.0 / 3.0) * (uw / 10.0).powf(-0.75)
}

// ---------------------------------------------------------------------------
// Steepness
// ---------------------------------------------------------------------------

/// Period-dependent steepness cap: `sp_short` up to `tp_short`, `sp_long`
/// from `tp_long`, linear in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteepnessLimit {
    pub sp_short: f64,
    pub sp_long: f64,
    pub tp_short: f64,
    pub tp_long: f64,
}

impl Default for SteepnessLimit {
    fn default() -> Self {
        Self {
            sp_short: 1.0 / 15.0,
            sp_long: 1.0 / 25.0,
            tp_short: 8.0,
            tp_long: 15.0,
        }
    }
}

impl SteepnessLimit {
    pub fn max_steepness(&self, tp: f64) -> f64 {
        if tp <= self.tp_short {
            self.sp_short
        } else if tp >= self.tp_long {
            self.sp_long
        } else {
            let t = (tp - self.tp_short) / (self.tp_long - self.tp_short);
            self.sp_short + t * (self.sp_long - self.sp_short)
        }
    }

    /// Clamp `hs` to the steepness cap. Returns the clamped height and
    /// whether clamping happened.
    pub fn enforce(&self, hs: f64, tp: f64) -> (f64, bool) {
        if tp <= 0.0 {
            return (hs, false);
        }
        let hs_max = self.max_steepness(tp) * GRAVITY * tp * tp / (2.0 * PI);
        if hs > hs_max {
            (hs_max, true)
        } else {
            (hs, false)
        }
    }
}

pub fn steepness(hs: f64, tp: f64) -> f64 {
    2.0 * PI * hs / (GRAVITY * tp * tp)
}

/// Clamp `hs` with the default steepness limit.
pub fn enforce_steepness_limit(hs: f64, tp: f64) -> (f64, bool) {
    SteepnessLimit::default().enforce(hs, tp)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Marginal distribution for one sampled parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamDist {
    Fixed { value: f64 },
    Uniform { min: f64, max: f64 },
    /// Log-normal with the given arithmetic mean and std, truncated to [min, max].
    TruncLogNormal { mean: f64, std: f64, min: f64, max: f64 },
    /// Piecewise-linear inverse CDF through min, Q25, Q50, Q75 and max.
    Quartiles { q: [f64; 5] },
}

impl ParamDist {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            ParamDist::Fixed { value } => (value, value),
            ParamDist::Uniform { min, max } | ParamDist::TruncLogNormal { min, max, .. } => {
                (min, max)
            }
            ParamDist::Quartiles { q } => (q[0], q[4]),
        }
    }

    fn check(&self, name: &str) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(CoreError::InvalidInput(format!(
                "degenerate bounds for {name}: min {lo} > max {hi}"
            )));
        }
        if let ParamDist::Quartiles { q } = self {
            if q.windows(2).any(|w| !(w[0] <= w[1])) {
                return Err(CoreError::InvalidInput(format!("quartiles for {name} must be non-decreasing")));
            }
        }
        if let ParamDist::TruncLogNormal { mean, std, .. } = *self {
            if !(mean > 0.0 && std > 0.0) || hi <= 0.0 {
                return Err(CoreError::InvalidInput(format!(
                    "log-normal for {name} needs mean > 0, std > 0 and max > 0"
                )));
            }
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            ParamDist::Fixed { value } => value,
            ParamDist::Uniform { min, max } => {
                if min == max {
                    min
                } else {
                    min + (max - min) * rng.random::<f64>()
                }
            }
            ParamDist::TruncLogNormal { mean, std, min, max } => {
                let s2 = (1.0 + (std / mean).powi(2)).ln();
                let mu = mean.ln() - 0.5 * s2;
                let dist = LogNormal::new(mu, s2.sqrt()).expect("validated log-normal");
                loop {
                    let x = dist.sample(rng);
                    if x >= min && x <= max {
                        return x;
                    }
                }
            }
            ParamDist::Quartiles { q } => {
                let u = 4.0 * rng.random::<f64>();
                let k = (u as usize).min(3);
                q[k] + (q[k + 1] - q[k]) * (u - k as f64)
            }
        }
    }
}

/// Parameter ranges and marginals for the synthetic metocean sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetBounds {
    pub hs1: ParamDist,
    pub tp1: ParamDist,
    pub theta_p1: ParamDist,
    pub gamma1: ParamDist,
    pub hs2: ParamDist,
    pub tp2: ParamDist,
    pub theta_p2: ParamDist,
    pub gamma2: ParamDist,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub uw: ParamDist,
    pub theta_w: ParamDist,
    pub uc: ParamDist,
    pub theta_c: ParamDist,
    pub steepness: Option<SteepnessLimit>,
}

// Directions are drawn on [0, 360); the upper end is excluded by the sampler.
const FULL_CIRCLE: ParamDist = ParamDist::Uniform { min: 0.0, max: 360.0 };
const GAMMA_RANGE: ParamDist = ParamDist::Uniform { min: 1.0, max: 5.0 };

impl DatasetBounds {
    /// Truncated log-normal magnitudes matching the mean/std and min/max of
    /// the reference metocean summary table; directions follow its quartiles.
    pub fn reference() -> Self {
        Self {
            hs1: ParamDist::TruncLogNormal { mean: 2.60, std: 2.05, min: 0.26, max: 8.00 },
            tp1: ParamDist::TruncLogNormal { mean: 8.44, std: 1.87, min: 2.85, max: 17.00 },
            theta_p1: ParamDist::Quartiles { q: [0.0, 209.50, 223.14, 237.25, 359.93] },
            gamma1: GAMMA_RANGE,
            hs2: ParamDist::TruncLogNormal { mean: 1.79, std: 0.72, min: 0.0, max: 8.95 },
            tp2: ParamDist::TruncLogNormal { mean: 13.08, std: 2.87, min: 3.0, max: 40.00 },
            theta_p2: ParamDist::Quartiles { q: [0.0, 223.25, 225.00, 232.74, 359.89] },
            gamma2: GAMMA_RANGE,
            sigma_a: 0.07,
            sigma_b: 0.09,
            uw: ParamDist::TruncLogNormal { mean: 9.93, std: 7.73, min: 0.0, max: 41.76 },
            theta_w: ParamDist::Quartiles { q: [0.0, 120.00, 192.37, 233.87, 359.98] },
            uc: ParamDist::TruncLogNormal { mean: 0.51, std: 0.56, min: 0.0, max: 4.65 },
            theta_c: ParamDist::Quartiles { q: [0.0, 57.30, 110.70, 213.84, 360.00] },
            steepness: Some(SteepnessLimit::default()),
        }
    }

    /// Uniform marginals over the same min/max box, directions over the full
    /// circle, no steepness clamp.
    pub fn reference_uniform() -> Self {
        let u = |d: ParamDist| {
            let (min, max) = d.bounds();
            ParamDist::Uniform { min, max }
        };
        let t = Self::reference();
        Self {
            hs1: u(t.hs1),
            tp1: u(t.tp1),
            hs2: u(t.hs2),
            tp2: u(t.tp2),
            uw: u(t.uw),
            uc: u(t.uc),
            theta_p1: FULL_CIRCLE,
            theta_p2: FULL_CIRCLE,
            theta_w: FULL_CIRCLE,
            theta_c: FULL_CIRCLE,
            steepness: None,
            ..t
        }
    }

    fn named(&self) -> [(&'static str, &ParamDist); 12] {
        [
            ("hs1", &self.hs1),
            ("tp1", &self.tp1),
            ("theta_p1", &self.theta_p1),
            ("gamma1", &self.gamma1),
            ("hs2", &self.hs2),
            ("tp2", &self.tp2),
            ("theta_p2", &self.theta_p2),
            ("gamma2", &self.gamma2),
            ("uw", &self.uw),
            ("theta_w", &self.theta_w),
            ("uc", &self.uc),
            ("theta_c", &self.theta_c),
        ]
    }

    pub fn check(&self) -> Result<()> {
        for (name, d) in self.named() {
            d.check(name)?;
        }
        for (name, d) in [
            ("theta_p1", &self.theta_p1),
            ("theta_p2", &self.theta_p2),
            ("theta_w", &self.theta_w),
            ("theta_c", &self.theta_c),
        ] {
            let (lo, hi) = d.bounds();
            if lo < 0.0 || hi > 360.0 {
                return Err(CoreError::InvalidInput(format!("{name} bounds outside [0, 360]")));
            }
        }
        for (name, d) in [("hs1", &self.hs1), ("hs2", &self.hs2), ("uw", &self.uw), ("uc", &self.uc)] {
            if d.bounds().0 < 0.0 {
                return Err(CoreError::InvalidInput(format!("{name} lower bound is negative")));
            }
        }
        for (name, d) in [("tp1", &self.tp1), ("tp2", &self.tp2)] {
            if d.bounds().0 <= 0.0 {
                return Err(CoreError::InvalidInput(format!("{name} lower bound must be > 0")));
            }
        }
        for (name, d) in [("gamma1", &self.gamma1), ("gamma2", &self.gamma2)] {
            if d.bounds().0 < 1.0 {
                return Err(CoreError::InvalidInput(format!("{name} lower bound must be >= 1")));
            }
        }
        if !(self.sigma_a > 0.0 && self.sigma_a < 1.0 && self.sigma_b > 0.0 && self.sigma_b < 1.0) {
            return Err(CoreError::InvalidInput("sigma_a/sigma_b must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

fn sample_direction<R: Rng>(d: &ParamDist, rng: &mut R) -> f64 {
    // keep directions inside [0, 360) even when a bound touches 360
    let v = d.sample(rng);
    if v >= 360.0 {
        0.0
    } else {
        v
    }
}

/// Draw `n` metocean states. Deterministic in `(n, seed, bounds)`.
pub fn sample_metocean(n: usize, seed: u64, bounds: &DatasetBounds) -> Result<Vec<MetoceanState>> {
    if n == 0 {
        return Err(CoreError::InvalidInput("sample count must be > 0".into()));
    }
    bounds.check()?;
    let mut rng = rng_from_seed(seed);
    let width = n.to_string().len().max(6);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut wave = |hs: &ParamDist, tp: &ParamDist, th: &ParamDist, g: &ParamDist| {
            let hs_raw = hs.sample(&mut rng);
            let tp = tp.sample(&mut rng);
            let theta_p = sample_direction(th, &mut rng);
            let gamma = g.sample(&mut rng);
            let hs = match &bounds.steepness {
                Some(lim) => lim.enforce(hs_raw, tp).0,
                None => hs_raw,
            };
            WaveSystem {
                hs,
                tp,
                theta_p,
                gamma,
                sigma_a: bounds.sigma_a,
                sigma_b: bounds.sigma_b,
            }
        };
        let wave1 = wave(&bounds.hs1, &bounds.tp1, &bounds.theta_p1, &bounds.gamma1);
        let wave2 = wave(&bounds.hs2, &bounds.tp2, &bounds.theta_p2, &bounds.gamma2);
        let uw = bounds.uw.sample(&mut rng);
        let theta_w = sample_direction(&bounds.theta_w, &mut rng);
        let uc = bounds.uc.sample(&mut rng);
        let theta_c = sample_direction(&bounds.theta_c, &mut rng);
        out.push(MetoceanState {
            id: format!("s{i:0width$}"),
            wave1,
            wave2,
            wind: Wind { uw, theta_w },
            current: Current { uc, theta_c },
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

pub const METOCEAN_CSV_HEADER: [&str; 17] = [
    "id", "hs1", "tp1", "thp1", "gamma1", "siga1", "sigb1", "hs2", "tp2", "thp2", "gamma2",
    "siga2", "sigb2", "uw", "thw", "uc", "thc",
];

/// Flat CSV row for a metocean state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetoceanRow {
    pub id: String,
    pub hs1: f64,
    pub tp1: f64,
    pub thp1: f64,
    pub gamma1: f64,
    pub siga1: f64,
    pub sigb1: f64,
    pub hs2: f64,
    pub tp2: f64,
    pub thp2: f64,
    pub gamma2: f64,
    pub siga2: f64,
    pub sigb2: f64,
    pub uw: f64,
    pub thw: f64,
    pub uc: f64,
    pub thc: f64,
}

impl From<&MetoceanState> for MetoceanRow {
    fn from(s: &MetoceanState) -> Self {
        Self {
            id: s.id.clone(),
            hs1: s.wave1.hs,
            tp1: s.wave1.tp,
            thp1: s.wave1.theta_p,
            gamma1: s.wave1.gamma,
            siga1: s.wave1.sigma_a,
            sigb1: s.wave1.sigma_b,
            hs2: s.wave2.hs,
            tp2: s.wave2.tp,
            thp2: s.wave2.theta_p,
            gamma2: s.wave2.gamma,
            siga2: s.wave2.sigma_a,
            sigb2: s.wave2.sigma_b,
            uw: s.wind.uw,
            thw: s.wind.theta_w,
            uc: s.current.uc,
            thc: s.current.theta_c,
        }
    }
}

impl From<MetoceanRow> for MetoceanState {
    fn from(r: MetoceanRow) -> Self {
        Self {
            id: r.id,
            wave1: WaveSystem {
                hs: r.hs1,
                tp: r.tp1,
                theta_p: r.thp1,
                gamma: r.gamma1,
                sigma_a: r.siga1,
                sigma_b: r.sigb1,
            },
            wave2: WaveSystem {
                hs: r.hs2,
                tp: r.tp2,
                theta_p: r.thp2,
                gamma: r.gamma2,
                sigma_a: r.siga2,
                sigma_b: r.sigb2,
            },
            wind: Wind { uw: r.uw, theta_w: r.thw },
            current: Current { uc: r.uc, theta_c: r.thc },
        }
    }
}

pub fn write_metocean_csv<W: std::io::Write>(w: W, states: &[MetoceanState]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for s in states {
        wtr.serialize(MetoceanRow::from(s))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Read a metocean CSV. The header must match [`METOCEAN_CSV_HEADER`]
/// exactly; every row is validated.
pub fn read_metocean_csv<R: std::io::Read>(r: R) -> Result<Vec<MetoceanState>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != METOCEAN_CSV_HEADER {
        return Err(CoreError::InvalidInput(format!(
            "metocean CSV header mismatch: expected `{}`",
            METOCEAN_CSV_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<MetoceanRow>() {
        let state = MetoceanState::from(row?);
        state.ensure_valid()?;
        out.push(state);
    }
    Ok(out)
}

pub fn save_metocean_csv(path: &Path, states: &[MetoceanState]) -> Result<()> {
    write_metocean_csv(std::fs::File::create(path)?, states)
}

pub fn load_metocean_csv(path: &Path) -> Result<Vec<MetoceanState>> {
    read_metocean_csv(std::fs::File::open(path)?)
}

/// Parse a single metocean CSV data line (no header).
pub fn parse_metocean_row(line: &str) -> Result<MetoceanState> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(line.trim().as_bytes());
    let mut it = rdr.deserialize::<MetoceanRow>();
    let row = it
        .next()
        .ok_or_else(|| CoreError::InvalidInput("empty metocean row".into()))??;
    let state = MetoceanState::from(row);
    state.ensure_valid()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
        x.windows(2)
            .zip(y.windows(2))
            .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
            .sum()
    }

    #[test]
    fn zero_height_gives_zero_spectrum() {
        let grid = default_omega_grid(100);
        let s = jonswap_spectrum(&WaveSystem::new(0.0, 9.0, 0.0), &grid).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalization_matches_trapezoid_oracle() {
        let wave = WaveSystem {
            hs: 2.0,
            tp: 8.0,
            theta_p: 0.0,
            gamma: 3.3,
            sigma_a: 0.07,
            sigma_b: 0.09,
        };
        let grid = default_omega_grid(2048);
        let s = jonswap_spectrum(&wave, &grid).unwrap();
        let m0 = trapezoid(&grid, &s);
        assert!((m0 - 0.25).abs() / 0.25 < 0.01, "m0 = {m0}");
    }

    #[test]
    fn peak_sits_at_dataset_mean_period() {
        let wave = WaveSystem::new(2.60, 8.44, 0.0);
        let grid = default_omega_grid(2048);
        let s = jonswap_spectrum(&wave, &grid).unwrap();
        let (imax, _) = s
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let step = grid[1] - grid[0];
        assert!((grid[imax] - 2.0 * PI / 8.44).abs() <= step, "peak at {}", grid[imax]);
        assert!((2.0 * PI / 8.44 - 0.7444).abs() < 1e-4);
    }

    #[test]
    fn spectrum_rejects_bad_grids_and_parameters() {
        let w = WaveSystem::new(1.0, 8.0, 0.0);
        assert!(jonswap_spectrum(&w, &[]).is_err());
        assert!(jonswap_spectrum(&w, &[0.5, 0.4]).is_err());
        let bad = WaveSystem { gamma: f64::NAN, ..w };
        assert!(jonswap_spectrum(&bad, &[0.5]).is_err());
    }

    #[test]
    fn npd_zero_wind_and_monotone_tail() {
        let f = [0.01, 0.1, 1.0];
        assert!(npd_wind_spectrum(0.0, 10.0, &f).unwrap().iter().all(|&v| v == 0.0));
        let s = npd_wind_spectrum(10.0, 10.0, &f).unwrap();
        assert!(s[0] > s[1] && s[1] > s[2]);
    }

    #[test]
    fn npd_scales_with_speed_squared_at_fixed_scaled_frequency() {
        // f̃ ∝ f·uw^(-3/4), so matching f̃ needs f2 = f1·(20/10)^(3/4)
        for f1 in [0.005, 0.05, 0.3] {
            let f2 = f1 * 2f64.powf(0.75);
            assert!(
                (npd_scaled_frequency(10.0, 10.0, f1) - npd_scaled_frequency(20.0, 10.0, f2)).abs()
                    < 1e-12
            );
            let s1 = npd_wind_spectrum(10.0, 10.0, &[f1]).unwrap()[0];
            let s2 = npd_wind_spectrum(20.0, 10.0, &[f2]).unwrap()[0];
            assert!((s2 / s1 - 4.0).abs() < 1e-9, "ratio {}", s2 / s1);
        }
    }

    #[test]
    fn steepness_examples() {
        assert_eq!(enforce_steepness_limit(0.1, 10.0), (0.1, false));
        let (hs, clamped) = enforce_steepness_limit(8.0, 5.0);
        assert!(clamped);
        let expected = (1.0 / 15.0) * GRAVITY * 25.0 / (2.0 * PI);
        assert!((hs - expected).abs() < 1e-12);
        assert!((hs - 2.60).abs() < 0.005);
        assert_eq!(enforce_steepness_limit(hs, 5.0).0, hs);
        let lim = SteepnessLimit::default();
        assert!((lim.max_steepness(11.5) - (1.0 / 15.0 + 0.5 * (1.0 / 25.0 - 1.0 / 15.0))).abs() < 1e-15);
    }

    #[test]
    fn validation_names_fields() {
        let mut s = MetoceanState::calm("a");
        assert!(validate_state(&s).is_empty());
        s.wind.theta_w = 361.0;
        let v = validate_state(&s);
        assert_eq!(v.len(), 1);
        assert!(v[0].field.contains("theta_w"));
        let mut s = MetoceanState::calm("b");
        s.wave1.hs = -1.0;
        let v = validate_state(&s);
        assert!(v.iter().any(|v| v.field.ends_with("hs")));
    }

    #[test]
    fn sampler_rejects_degenerate_bounds() {
        let mut b = DatasetBounds::reference();
        b.uc = ParamDist::Uniform { min: 2.0, max: 1.0 };
        assert!(sample_metocean(10, 1, &b).is_err());
        assert!(sample_metocean(0, 1, &DatasetBounds::reference()).is_err());
    }

    #[test]
    fn csv_row_parses() {
        let line = "x1,2.0,8.0,10.0,3.3,0.07,0.09,1.0,13.0,200.0,2.0,0.07,0.09,10.0,30.0,0.5,90.0";
        let s = parse_metocean_row(line).unwrap();
        assert_eq!(s.id, "x1");
        assert_eq!(s.current.theta_c, 90.0);
        let mut buf = Vec::new();
        write_metocean_csv(&mut buf, &[s.clone()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&METOCEAN_CSV_HEADER.join(",")));
        assert_eq!(read_metocean_csv(text.as_bytes()).unwrap(), vec![s]);
    }

    #[test]
    fn angle_helpers() {
        assert_eq!(wrap_deg(-1e-18), 0.0);
        assert_eq!(wrap_deg(725.0), 5.0);
        assert!((angle_diff_deg(10.0, 350.0) - 20.0).abs() < 1e-12);
        assert!((angle_diff_deg(0.0, 180.0) - 180.0).abs() < 1e-12);
    }
}
