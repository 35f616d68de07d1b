//! Frequency-domain response screening.
//!
//! The mean offset balances the total mean environmental force against the
//! mooring. Slow drift about it is treated per principal stiffness axis as a
//! linear oscillator driven by the Newman envelope force (white-noise
//! approximation at the natural frequency), and wave-frequency motion via a
//! parametric transfer function. Extremes use the narrow-band factor
//! `√(2 ln N)`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::metocean::{simpson, wrap_deg, JonswapSpectrum, MetoceanState, WaveSystem, OMEGA_MAX, OMEGA_MIN};
use crate::mooring::{extreme_line_tensions, linearized_stiffness, system_restoring, MooringSystem};
use crate::vessel::{mean_wave_drift_load, total_mean_load, VesselModel};

const QUAD_INTERVALS: usize = 1024;

/// Isotropic low-frequency dynamics of the moored hull in the horizontal plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LfDynamics {
    /// Mass including added mass, kg.
    pub mass: f64,
    /// Linear damping, N·s/m.
    pub b_lin: f64,
    /// Quadratic damping, N·s²/m².
    pub bq: f64,
}

impl Default for LfDynamics {
    fn default() -> Self {
        Self {
            mass: 3.2e8,
            b_lin: 3.0e5,
            bq: 1.5e6,
        }
    }
}

/// Wave-frequency surge/sway transfer function: unit response below the
/// corner frequency, `(ω_c/ω)²` above, weighted by incidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WfRao {
    pub corner_omega: f64,
    pub surge_gain: f64,
    pub sway_gain: f64,
}

impl Default for WfRao {
    fn default() -> Self {
        Self {
            corner_omega: 0.6,
            surge_gain: 0.7,
            sway_gain: 1.0,
        }
    }
}

impl WfRao {
    /// Identity transfer function, mainly for checks.
    pub fn unit() -> Self {
        Self {
            corner_omega: f64::INFINITY,
            surge_gain: 1.0,
            sway_gain: 1.0,
        }
    }

    /// `|RAO(ω, α)|²` with `α` the incidence in degrees relative to the bow.
    pub fn gain2(&self, omega: f64, alpha_deg: f64) -> f64 {
        let (s, c) = alpha_deg.to_radians().sin_cos();
        let dir = (self.surge_gain * c).powi(2) + (self.sway_gain * s).powi(2);
        let shape = if omega <= self.corner_omega {
            1.0
        } else {
            (self.corner_omega / omega).powi(4)
        };
        dir * shape
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Screening {
    /// Fraction of the minimum line MBL above which a state is critical.
    pub eta: f64,
    /// Offset threshold as a fraction of water depth.
    pub offset_fraction: f64,
}

impl Default for Screening {
    fn default() -> Self {
        Self {
            eta: 0.6,
            offset_fraction: 0.125,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FdConfig {
    /// Storm duration, s.
    pub duration: f64,
    pub lf: LfDynamics,
    pub rao: WfRao,
    pub screening: Screening,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            duration: 10800.0,
            lf: LfDynamics::default(),
            rao: WfRao::default(),
            screening: Screening::default(),
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.duration > 0.0
            && self.lf.mass > 0.0
            && self.lf.b_lin > 0.0
            && self.lf.bq >= 0.0
            && self.rao.corner_omega > 0.0
            && self.screening.eta > 0.0
            && self.screening.eta < 1.0
            && self.screening.offset_fraction > 0.0;
        if ok {
            Ok(())
        } else {
            Err(CoreError::Config(
                "FD config needs duration, mass, damping > 0 and 0 < eta < 1".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "FD")]
    Fd,
    #[serde(rename = "QD")]
    Qd,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Fd => "FD",
            Source::Qd => "QD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseStatistics {
    pub phi_eq: f64,
    pub mean_offset: [f64; 2],
    pub mpm_offset: f64,
    /// Compass direction toward which the turret is displaced, deg.
    pub offset_dir: f64,
    pub mpm_t_fair: f64,
    pub mpm_t_anchor: f64,
    pub sigma_lf: f64,
    pub sigma_wf: f64,
    pub source: Source,
    pub daf_applied: bool,
}

/// Compass direction of an (east, north) vector, deg in [0, 360).
pub fn compass_of(v: [f64; 2]) -> f64 {
    wrap_deg(v[0].atan2(v[1]).to_degrees())
}

/// Total mean environmental force on the hull in global axes, N.
pub fn mean_environmental_force(v: &VesselModel, s: &MetoceanState, phi: f64) -> [f64; 2] {
    total_mean_load(v, s, phi).to_global(phi)
}

/// Newton iteration for `f_env + restoring(x) = 0`, with a finite-difference
/// Jacobian and step halving when an iterate leaves the feasible region.
pub(crate) fn solve_offset<F>(f_env: [f64; 2], x0: [f64; 2], tol: f64, restoring: F) -> Result<[f64; 2]>
where
    F: Fn([f64; 2]) -> Result<[f64; 2]>,
{
    const MAX_ITER: usize = 100;
    let residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let f = restoring(x)?;
        Ok([f_env[0] + f[0], f_env[1] + f[1]])
    };
    let mut x = x0;
    let mut r = residual(x)?;
    for _ in 0..MAX_ITER {
        let norm = r[0].hypot(r[1]);
        if norm < tol {
            return Ok(x);
        }
        let h = 1e-3;
        let mut k = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut p = x;
            let mut m = x;
            p[j] += h;
            m[j] -= h;
            let (fp, fm) = (restoring(p)?, restoring(m)?);
            for i in 0..2 {
                k[i][j] = -(fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
        if !(det > 0.0) {
            return Err(CoreError::NonPositiveStiffness(det));
        }
        let dx = [
            (k[1][1] * r[0] - k[0][1] * r[1]) / det,
            (-k[1][0] * r[0] + k[0][0] * r[1]) / det,
        ];
        let mut lambda = 1.0;
        loop {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            match residual(trial) {
                Ok(rt) if rt[0].hypot(rt[1]) < norm || lambda < 1e-3 => {
                    x = trial;
                    r = rt;
                    break;
                }
                _ if lambda < 1e-6 => {
                    return Err(CoreError::NoConvergence {
                        what: "mean offset line search",
                        iterations: MAX_ITER,
                    })
                }
                _ => lambda *= 0.5,
            }
        }
    }
    Err(CoreError::NoConvergence {
        what: "mean offset",
        iterations: MAX_ITER,
    })
}

/// Static offset where the mooring balances the total mean load.
pub fn mean_equilibrium_offset(sys: &MooringSystem, v: &VesselModel, s: &MetoceanState, phi_eq: f64) -> Result<[f64; 2]> {
    let f_env = mean_environmental_force(v, s, phi_eq);
    if f_env == [0.0, 0.0] {
        return Ok([0.0, 0.0]);
    }
    let k0 = linearized_stiffness(sys, [0.0, 0.0])?;
    let x0 = [f_env[0] / k0[0][0], f_env[1] / k0[1][1]];
    // start from the linear estimate when it is feasible, else from the centre
    let x0 = if system_restoring(sys, x0).is_ok() { x0 } else { [0.0, 0.0] };
    solve_offset(f_env, x0, 1e-3, |x| Ok(system_restoring(sys, x)?.0))
}

/// Standard deviation and mean zero-upcrossing period of a response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessStats {
    pub sigma: f64,
    pub tz: f64,
}

impl ProcessStats {
    pub const ZERO: ProcessStats = ProcessStats { sigma: 0.0, tz: 0.0 };
}

/// `∫ S(ω) S(ω + μ) dω` over the wave band.
fn spectral_overlap(spec: &JonswapSpectrum, mu: f64) -> f64 {
    simpson(
        |w| spec.density(w) * spec.density(w + mu),
        OMEGA_MIN,
        OMEGA_MAX,
        QUAD_INTERVALS,
    )
}

/// One-sided slow-drift force spectrum of the Newman envelope force whose
/// mean is `f_mean`: `S_F(μ) = 2 f_mean² / m0² · ∫ S(ω) S(ω+μ) dω`.
pub fn slow_drift_force_spectrum(wave: &WaveSystem, f_mean: f64, mu: f64) -> Result<f64> {
    let spec = JonswapSpectrum::new(wave)?;
    if spec.is_zero() || f_mean == 0.0 {
        return Ok(0.0);
    }
    let m0 = wave.hs * wave.hs / 16.0;
    Ok(2.0 * f_mean * f_mean / (m0 * m0) * spectral_overlap(&spec, mu))
}

/// Displacement std `σ` of a linear oscillator under white noise with
/// statistically linearized quadratic damping: solves
/// `σ² (b + √(8/π) bq ω σ) = π S / (2k)`.
pub fn white_noise_std(s_f: f64, k: f64, omega: f64, b_lin: f64, bq: f64) -> f64 {
    if s_f <= 0.0 {
        return 0.0;
    }
    let c = (8.0 / PI).sqrt() * bq * omega;
    let rhs = PI * s_f / (2.0 * k);
    let g = |x: f64| x * x * (b_lin + c * x) - rhs;
    let mut hi = (rhs / b_lin).sqrt();
    let mut lo = 0.0;
    // g(hi) ≥ 0 because the quadratic term only adds damping
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn radial_unit(mean_offset: [f64; 2], fallback: [f64; 2]) -> Option<[f64; 2]> {
    let n = mean_offset[0].hypot(mean_offset[1]);
    if n >= 0.01 {
        return Some([mean_offset[0] / n, mean_offset[1] / n]);
    }
    let m = fallback[0].hypot(fallback[1]);
    (m > 0.0).then(|| [fallback[0] / m, fallback[1] / m])
}

/// Low-frequency radial offset statistics about `mean_offset`. Each wave
/// system drives an oscillator along its own mean drift direction, with
/// the spread stiffness projected on that axis; the independent system
/// responses are projected on the radial direction and summed in variance.
pub fn lf_response(
    sys: &MooringSystem,
    v: &VesselModel,
    s: &MetoceanState,
    phi_eq: f64,
    mean_offset: [f64; 2],
    cfg: &FdConfig,
) -> Result<ProcessStats> {
    let k = linearized_stiffness(sys, mean_offset)?;
    let f_env = mean_environmental_force(v, s, phi_eq);
    let Some(r) = radial_unit(mean_offset, f_env) else {
        return Ok(ProcessStats::ZERO);
    };

    let mut var = 0.0;
    let mut var_w2 = 0.0;
    for w in s.waves() {
        let f = mean_wave_drift_load(v, w, phi_eq).to_global(phi_eq);
        let mag = f[0].hypot(f[1]);
        if mag == 0.0 {
            continue;
        }
        let e = [f[0] / mag, f[1] / mag];
        let ke = e[0] * (k[0][0] * e[0] + k[0][1] * e[1]) + e[1] * (k[1][0] * e[0] + k[1][1] * e[1]);
        if !(ke > 0.0) {
            return Err(CoreError::NonPositiveStiffness(ke));
        }
        let omega = (ke / cfg.lf.mass).sqrt();
        let s_f = slow_drift_force_spectrum(w, mag, omega)?;
        let sigma = white_noise_std(s_f, ke, omega, cfg.lf.b_lin, cfg.lf.bq);
        let proj = (e[0] * r[0] + e[1] * r[1]).powi(2);
        var += sigma * sigma * proj;
        var_w2 += sigma * sigma * proj * omega * omega;
    }
    if var == 0.0 {
        return Ok(ProcessStats::ZERO);
    }
    Ok(ProcessStats {
        sigma: var.sqrt(),
        tz: 2.0 * PI * (var / var_w2).sqrt(),
    })
}

pub fn lf_response_std(
    sys: &MooringSystem,
    v: &VesselModel,
    s: &MetoceanState,
    phi_eq: f64,
    mean_offset: [f64; 2],
    cfg: &FdConfig,
) -> Result<f64> {
    Ok(lf_response(sys, v, s, phi_eq, mean_offset, cfg)?.sigma)
}

/// Wave-frequency horizontal motion statistics, summed over both systems.
pub fn wf_response(_v: &VesselModel, s: &MetoceanState, phi_eq: f64, rao: &WfRao) -> Result<ProcessStats> {
    let (mut m0, mut m2) = (0.0, 0.0);
    for w in s.waves() {
        let spec = JonswapSpectrum::new(w)?;
        if spec.is_zero() {
            continue;
        }
        let alpha = w.theta_p - phi_eq;
        m0 += simpson(|x| spec.density(x) * rao.gain2(x, alpha), OMEGA_MIN, OMEGA_MAX, QUAD_INTERVALS);
        m2 += simpson(
            |x| x * x * spec.density(x) * rao.gain2(x, alpha),
            OMEGA_MIN,
            OMEGA_MAX,
            QUAD_INTERVALS,
        );
    }
    if m0 == 0.0 {
        return Ok(ProcessStats::ZERO);
    }
    Ok(ProcessStats {
        sigma: m0.sqrt(),
        tz: 2.0 * PI * (m0 / m2).sqrt(),
    })
}

pub fn wf_response_std(v: &VesselModel, s: &MetoceanState, phi_eq: f64, rao: &WfRao) -> Result<f64> {
    Ok(wf_response(v, s, phi_eq, rao)?.sigma)
}

/// Narrow-band most-probable-maximum factor `√(2 ln N)`, zero for `N ≤ 1`.
pub fn mpm_factor(n_cycles: f64) -> f64 {
    if n_cycles > 1.0 {
        (2.0 * n_cycles.ln()).sqrt()
    } else {
        0.0
    }
}

/// Everything [`fd_mpm`] needs from the earlier stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdInputs {
    pub phi_eq: f64,
    pub mean_offset: [f64; 2],
    /// Mean environmental force, global axes; orients the offset when the
    /// mean offset is negligible.
    pub mean_force: [f64; 2],
    pub lf: ProcessStats,
    pub wf: ProcessStats,
}

pub fn fd_mpm(sys: &MooringSystem, inp: &FdInputs, cfg: &FdConfig) -> Result<ResponseStatistics> {
    for x in [inp.lf.sigma, inp.wf.sigma, inp.lf.tz, inp.wf.tz] {
        if !(x.is_finite() && x >= 0.0) {
            return Err(CoreError::InvalidInput(format!("response statistic {x} is not finite")));
        }
    }
    let mean = inp.mean_offset[0].hypot(inp.mean_offset[1]);
    let var_lf = inp.lf.sigma * inp.lf.sigma;
    let var_wf = inp.wf.sigma * inp.wf.sigma;
    let sigma_total = (var_lf + var_wf).sqrt();
    let mpm_offset = if sigma_total == 0.0 {
        mean
    } else {
        let tz = if var_lf >= var_wf { inp.lf.tz } else { inp.wf.tz };
        mean + mpm_factor(cfg.duration / tz) * sigma_total
    };
    let dir_vec = radial_unit(inp.mean_offset, inp.mean_force);
    let offset_dir = dir_vec.map(compass_of).unwrap_or(0.0);
    let u = dir_vec.unwrap_or([0.0, 0.0]);
    let point = [u[0] * mpm_offset, u[1] * mpm_offset];
    let ext = extreme_line_tensions(sys, point)?;
    Ok(ResponseStatistics {
        phi_eq: inp.phi_eq,
        mean_offset: inp.mean_offset,
        mpm_offset,
        offset_dir,
        mpm_t_fair: ext.t_fair,
        mpm_t_anchor: ext.t_anchor,
        sigma_lf: inp.lf.sigma,
        sigma_wf: inp.wf.sigma,
        source: Source::Fd,
        daf_applied: true,
    })
}

/// Full FD evaluation of one state at a solved heading.
pub fn fd_response(
    sys: &MooringSystem,
    v: &VesselModel,
    s: &MetoceanState,
    phi_eq: f64,
    cfg: &FdConfig,
) -> Result<ResponseStatistics> {
    let mean_offset = mean_equilibrium_offset(sys, v, s, phi_eq)?;
    let inputs = FdInputs {
        phi_eq,
        mean_offset,
        mean_force: mean_environmental_force(v, s, phi_eq),
        lf: lf_response(sys, v, s, phi_eq, mean_offset, cfg)?,
        wf: wf_response(v, s, phi_eq, &cfg.rao)?,
    };
    fd_mpm(sys, &inputs, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub id: String,
    pub stats: ResponseStatistics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenOutcome {
    /// Flagged ids in input order.
    pub flagged: Vec<String>,
    pub fraction: f64,
}

pub fn is_critical(stats: &ResponseStatistics, sys: &MooringSystem, sc: &Screening) -> bool {
    stats.mpm_t_fair > sc.eta * sys.min_mbl() || stats.mpm_offset > sc.offset_fraction * sys.depth
}

pub fn screen(records: &[ResponseRecord], sys: &MooringSystem, sc: &Screening) -> ScreenOutcome {
    let flagged: Vec<String> = records
        .iter()
        .filter(|r| is_critical(&r.stats, sys, sc))
        .map(|r| r.id.clone())
        .collect();
    let fraction = if records.is_empty() {
        0.0
    } else {
        flagged.len() as f64 / records.len() as f64
    };
    ScreenOutcome { flagged, fraction }
}

pub const RESPONSES_CSV_HEADER: [&str; 12] = [
    "id",
    "phi_eq",
    "mean_x",
    "mean_y",
    "mpm_offset_m",
    "offset_dir_deg",
    "mpm_tfair_kn",
    "mpm_tanchor_kn",
    "sigma_lf",
    "sigma_wf",
    "source",
    "daf_applied",
];

#[derive(Debug, Serialize, Deserialize)]
struct ResponseRow {
    id: String,
    phi_eq: f64,
    mean_x: f64,
    mean_y: f64,
    mpm_offset_m: f64,
    offset_dir_deg: f64,
    mpm_tfair_kn: f64,
    mpm_tanchor_kn: f64,
    sigma_lf: f64,
    sigma_wf: f64,
    source: Source,
    daf_applied: bool,
}

pub fn write_responses_csv<W: std::io::Write>(w: W, records: &[ResponseRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        let s = &r.stats;
        wr.serialize(ResponseRow {
            id: r.id.clone(),
            phi_eq: s.phi_eq,
            mean_x: s.mean_offset[0],
            mean_y: s.mean_offset[1],
            mpm_offset_m: s.mpm_offset,
            offset_dir_deg: s.offset_dir,
            mpm_tfair_kn: s.mpm_t_fair / 1e3,
            mpm_tanchor_kn: s.mpm_t_anchor / 1e3,
            sigma_lf: s.sigma_lf,
            sigma_wf: s.sigma_wf,
            source: s.source,
            daf_applied: s.daf_applied,
        })?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_responses_csv<R: std::io::Read>(r: R) -> Result<Vec<ResponseRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != RESPONSES_CSV_HEADER {
        return Err(CoreError::InvalidInput(format!(
            "unexpected responses header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for row in rd.deserialize::<ResponseRow>() {
        let row = row?;
        out.push(ResponseRecord {
            id: row.id,
            stats: ResponseStatistics {
                phi_eq: row.phi_eq,
                mean_offset: [row.mean_x, row.mean_y],
                mpm_offset: row.mpm_offset_m,
                offset_dir: row.offset_dir_deg,
                mpm_t_fair: row.mpm_tfair_kn * 1e3,
                mpm_t_anchor: row.mpm_tanchor_kn * 1e3,
                sigma_lf: row.sigma_lf,
                sigma_wf: row.sigma_wf,
                source: row.source,
                daf_applied: row.daf_applied,
            },
        });
    }
    Ok(out)
}

pub fn save_responses_csv(path: &Path, records: &[ResponseRecord]) -> Result<()> {
    write_responses_csv(std::fs::File::create(path)?, records)
}

pub fn load_responses_csv(path: &Path) -> Result<Vec<ResponseRecord>> {
    read_responses_csv(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heading::solve_equilibrium_heading;
    use crate::metocean::{Current, Wind};

    fn state() -> MetoceanState {
        MetoceanState {
            id: "s".into(),
            wave1: WaveSystem::new(3.0, 9.0, 200.0),
            wave2: WaveSystem::new(1.5, 13.0, 240.0),
            wind: Wind { uw: 12.0, theta_w: 190.0 },
            current: Current { uc: 0.6, theta_c: 160.0 },
        }
    }

    #[test]
    fn calm_state_has_zero_response() {
        let sys = MooringSystem::default();
        let v = VesselModel::default();
        let s = MetoceanState::calm("c");
        let cfg = FdConfig::default();
        assert_eq!(mean_equilibrium_offset(&sys, &v, &s, 0.0).unwrap(), [0.0, 0.0]);
        let r = fd_response(&sys, &v, &s, 0.0, &cfg).unwrap();
        assert_eq!((r.sigma_lf, r.sigma_wf, r.mpm_offset), (0.0, 0.0, 0.0));
        assert!(r.mpm_t_fair > 0.0 && r.mpm_t_anchor > 0.0);
    }

    #[test]
    fn mean_offset_balances_load() {
        let sys = MooringSystem::default();
        let v = VesselModel::default();
        let s = state();
        let phi = solve_equilibrium_heading(&v, &s).unwrap().phi_eq;
        let x = mean_equilibrium_offset(&sys, &v, &s, phi).unwrap();
        let (f, _) = system_restoring(&sys, x).unwrap();
        let e = mean_environmental_force(&v, &s, phi);
        assert!((f[0] + e[0]).hypot(f[1] + e[1]) < 1.0);
    }

    #[test]
    fn mpm_arithmetic() {
        assert!((mpm_factor(1000.0) - 3.7169).abs() < 1e-4);
        let sys = MooringSystem::default();
        let inp = FdInputs {
            phi_eq: 0.0,
            mean_offset: [0.0, 10.0],
            mean_force: [0.0, 1.0],
            lf: ProcessStats { sigma: 1.0, tz: 10.8 },
            wf: ProcessStats::ZERO,
        };
        let r = fd_mpm(&sys, &inp, &FdConfig::default()).unwrap();
        assert!((r.mpm_offset - (10.0 + (2.0 * 1000f64.ln()).sqrt())).abs() < 1e-9);
        let quiet = FdInputs { lf: ProcessStats::ZERO, ..inp };
        assert_eq!(fd_mpm(&sys, &quiet, &FdConfig::default()).unwrap().mpm_offset, 10.0);
    }

    #[test]
    fn unit_rao_recovers_wave_variance() {
        let v = VesselModel::default();
        let s = state();
        let sigma = wf_response_std(&v, &s, 10.0, &WfRao::unit()).unwrap();
        let m0 = (3.0f64.powi(2) + 1.5f64.powi(2)) / 16.0;
        assert!((sigma - m0.sqrt()).abs() < 1e-3 * m0.sqrt());
    }

    #[test]
    fn wf_scales_with_hs() {
        let v = VesselModel::default();
        let mut s = state();
        s.wave2 = WaveSystem::calm();
        let a = wf_response_std(&v, &s, 30.0, &WfRao::default()).unwrap();
        s.wave1.hs *= 2.0;
        let b = wf_response_std(&v, &s, 30.0, &WfRao::default()).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-9 * b);
    }

    #[test]
    fn doubling_linear_damping_scales_lf_by_root_two() {
        let sys = MooringSystem::default();
        let v = VesselModel::default();
        let s = state();
        let phi = solve_equilibrium_heading(&v, &s).unwrap().phi_eq;
        let x = mean_equilibrium_offset(&sys, &v, &s, phi).unwrap();
        let mut cfg = FdConfig::default();
        cfg.lf.bq = 0.0;
        let a = lf_response_std(&sys, &v, &s, phi, x, &cfg).unwrap();
        cfg.lf.b_lin *= 2.0;
        let b = lf_response_std(&sys, &v, &s, phi, x, &cfg).unwrap();
        assert!((b * 2f64.sqrt() / a - 1.0).abs() < 0.02);
    }

    #[test]
    fn white_noise_std_solves_the_balance() {
        let (s_f, k, w, b, bq) = (3e11, 5e4, 0.012, 3e5, 1.5e6);
        let x = white_noise_std(s_f, k, w, b, bq);
        let b_eff = b + (8.0 / PI).sqrt() * bq * w * x;
        assert!((x * x - PI * s_f / (2.0 * b_eff * k)).abs() < 1e-9 * x * x);
    }

    #[test]
    fn screening_extremes() {
        let sys = MooringSystem::default();
        let v = VesselModel::default();
        let cfg = FdConfig::default();
        let records: Vec<ResponseRecord> = (0..4)
            .map(|i| {
                let mut s = state();
                s.wave1.hs = 1.0 + i as f64;
                let phi = solve_equilibrium_heading(&v, &s).unwrap().phi_eq;
                ResponseRecord {
                    id: format!("r{i}"),
                    stats: fd_response(&sys, &v, &s, phi, &cfg).unwrap(),
                }
            })
            .collect();
        let none = screen(&records, &sys, &Screening { eta: 1.0, offset_fraction: 1e9 });
        assert_eq!(none.fraction, 0.0);
        let all = screen(&records, &sys, &Screening { eta: 0.0, offset_fraction: 1e9 });
        assert_eq!(all.flagged.len(), 4);
    }

    #[test]
    fn responses_csv_round_trip() {
        let sys = MooringSystem::default();
        let v = VesselModel::default();
        let s = state();
        let phi = solve_equilibrium_heading(&v, &s).unwrap().phi_eq;
        let rec = ResponseRecord {
            id: "a".into(),
            stats: fd_response(&sys, &v, &s, phi, &FdConfig::default()).unwrap(),
        };
        let mut buf = Vec::new();
        write_responses_csv(&mut buf, std::slice::from_ref(&rec)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&RESPONSES_CSV_HEADER.join(",")));
        let back = read_responses_csv(&buf[..]).unwrap();
        assert_eq!(back[0].id, "a");
        assert!((back[0].stats.mpm_t_fair - rec.stats.mpm_t_fair).abs() < 1e-6);
    }
}
