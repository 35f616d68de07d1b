//! Quasi-dynamic time-domain simulation of the turret in the horizontal
//! plane, and Gumbel extremes over repeated realizations.
//!
//! The hull is integrated with fixed-step RK4 under
//! `m ẍ + b ẋ + bq |ẋ| ẋ = F_mean + F_sv(t) + F_moor(x)`, starting from the
//! static equilibrium; the fluctuating part of the forcing ramps in linearly.
//! Heading is held at the weathervaning equilibrium. Wave-frequency motion
//! is not integrated: a Gaussian process with the wave-frequency response
//! spectrum is added along the instantaneous offset direction.
//!
//! Forcing is synthesized by FFT on the frequency grid `Δω = 2π/T`, with
//! `T = ramp + duration`, sampled at `dt/2` so every RK4 stage reads an
//! exact sample. Because the grid depends only on `T`, runs with different
//! `dt` but the same seed see the same forcing function.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::metocean::{JonswapSpectrum, MetoceanState, WaveSystem, OMEGA_MAX, OMEGA_MIN};
use crate::mooring::{extremes_of, Daf, MooringSystem, TabulatedSpread};
use crate::response::{
    compass_of, mean_environmental_force, mean_equilibrium_offset, solve_offset, LfDynamics, ResponseStatistics,
    Source, WfRao,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::vessel::{mean_wave_drift_load, VesselModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QdConfig {
    pub n_realizations: usize,
    /// Recorded duration after the ramp, s.
    pub duration: f64,
    pub ramp: f64,
    pub dt: f64,
    pub lf: LfDynamics,
    pub rao: WfRao,
    pub seed: u64,
}

impl Default for QdConfig {
    fn default() -> Self {
        Self {
            n_realizations: 10,
            duration: 10800.0,
            ramp: 1800.0,
            dt: 0.5,
            lf: LfDynamics::default(),
            rao: WfRao::default(),
            seed: 20_240_601,
        }
    }
}

impl QdConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.ramp >= 0.0
            && self.ramp < self.duration
            && self.n_realizations >= 2
            && self.lf.mass > 0.0
            && self.lf.b_lin >= 0.0
            && self.lf.bq >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(CoreError::Config(
                "QD config needs dt > 0, 0 <= ramp < duration, n_realizations >= 2, mass > 0".into(),
            ))
        }
    }

    fn total_time(&self) -> f64 {
        self.ramp + self.duration
    }

    fn n_steps(&self) -> usize {
        (self.total_time() / self.dt).round() as usize
    }

    fn d_omega(&self) -> f64 {
        2.0 * PI / (self.n_steps() as f64 * self.dt)
    }
}

/// Force samples at spacing `dt/2` from `t = 0`, global axes, N.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceSeries {
    pub dt_sample: f64,
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
}

impl ForceSeries {
    fn zeros(n: usize, dt_sample: f64) -> Self {
        Self {
            dt_sample,
            fx: vec![0.0; n],
            fy: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.fx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fx.is_empty()
    }

    pub fn mean(&self) -> [f64; 2] {
        let n = self.len() as f64;
        [self.fx.iter().sum::<f64>() / n, self.fy.iter().sum::<f64>() / n]
    }
}

/// Random-phase components `a_k e^{iε_k}` at `ω_k = kΔω` inside the wave band.
fn random_components<R: Rng>(density: impl Fn(f64) -> f64, d_omega: f64, rng: &mut R) -> Vec<(usize, Complex64)> {
    let k0 = (OMEGA_MIN / d_omega).ceil() as usize;
    let k1 = (OMEGA_MAX / d_omega).floor() as usize;
    (k0..=k1)
        .map(|k| {
            let a = (2.0 * density(k as f64 * d_omega) * d_omega).sqrt();
            let eps = rng.random::<f64>() * 2.0 * PI;
            (k, Complex64::from_polar(a, eps))
        })
        .collect()
}

/// `z_n = Σ c_k e^{i ω_k t_n}` at `t_n = n·τ` where `M τ Δω = 2π`.
fn analytic_signal(components: &[(usize, Complex64)], m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for &(k, c) in components {
        buf[k % m] += c;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf
}

/// Newman slow-drift force of one wave system: the mean drift load scaled
/// by the squared wave envelope over its mean, `F̄ |z(t)|² / (2 m0)`.
pub fn synthesize_drift_force(
    v: &VesselModel,
    wave: &WaveSystem,
    phi_eq: f64,
    seed: u64,
    cfg: &QdConfig,
) -> Result<ForceSeries> {
    cfg.validate()?;
    let m = 2 * cfg.n_steps() + 1;
    let dt_sample = 0.5 * cfg.dt;
    let spec = JonswapSpectrum::new(wave)?;
    if spec.is_zero() {
        return Ok(ForceSeries::zeros(m, dt_sample));
    }
    let f_mean = mean_wave_drift_load(v, wave, phi_eq).to_global(phi_eq);
    let mut rng = rng_from_seed(seed);
    let comps = random_components(|w| spec.density(w), cfg.d_omega(), &mut rng);
    let two_m0: f64 = comps.iter().map(|(_, c)| c.norm_sqr()).sum();
    if two_m0 == 0.0 {
        return Ok(ForceSeries::zeros(m, dt_sample));
    }
    let period_samples = 2 * cfg.n_steps();
    let z = analytic_signal(&comps, period_samples);
    let mut out = ForceSeries::zeros(m, dt_sample);
    for n in 0..m {
        let e = z[n % period_samples].norm_sqr() / two_m0;
        out.fx[n] = f_mean[0] * e;
        out.fy[n] = f_mean[1] * e;
    }
    Ok(out)
}

/// Zero-mean wave-frequency offset process sampled at `dt/2`.
fn synthesize_wf(s: &MetoceanState, phi_eq: f64, seed: u64, cfg: &QdConfig) -> Result<Vec<f64>> {
    let specs: Vec<(JonswapSpectrum, f64)> = s
        .waves()
        .into_iter()
        .map(|w| Ok((JonswapSpectrum::new(w)?, w.theta_p - phi_eq)))
        .collect::<Result<_>>()?;
    let period_samples = 2 * cfg.n_steps();
    let m = period_samples + 1;
    if specs.iter().all(|(sp, _)| sp.is_zero()) {
        return Ok(vec![0.0; m]);
    }
    let density = |w: f64| {
        specs
            .iter()
            .map(|(sp, alpha)| sp.density(w) * cfg.rao.gain2(w, *alpha))
            .sum::<f64>()
    };
    let mut rng = rng_from_seed(seed);
    let comps = random_components(density, cfg.d_omega(), &mut rng);
    let z = analytic_signal(&comps, period_samples);
    Ok((0..m).map(|n| z[n % period_samples].re).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationExtremes {
    pub seed: u64,
    pub max_offset: f64,
    /// Compass direction of the offset at its maximum, deg.
    pub offset_dir: f64,
    pub t_max_offset: f64,
    /// Raw (no DAF) maxima over all lines.
    pub max_t_fair: f64,
    pub max_t_anchor: f64,
    pub t_max_t_fair: f64,
    /// Sample std after the ramp of the low-frequency offset projected on
    /// the mean-offset direction.
    pub sigma_lf: f64,
    pub sigma_wf: f64,
}

/// Turret position including wave-frequency motion, and the largest
/// fairlead tension (no DAF) at that position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub t_fair: f64,
}

/// Fixed-step RK4 for the planar hull on a tabulated spread.
struct Integrator<'a> {
    spread: &'a TabulatedSpread,
    lf: LfDynamics,
    dt: f64,
    h: Vec<f64>,
}

impl<'a> Integrator<'a> {
    fn new(spread: &'a TabulatedSpread, lf: LfDynamics, dt: f64) -> Self {
        Self {
            spread,
            lf,
            dt,
            h: vec![0.0; spread.n_lines()],
        }
    }

    fn accel(&mut self, x: [f64; 2], v: [f64; 2], f: [f64; 2]) -> Result<[f64; 2]> {
        let fm = self.spread.restoring(x, &mut self.h).map_err(line_uplift)?;
        let speed = v[0].hypot(v[1]);
        let inv_m = 1.0 / self.lf.mass;
        Ok([
            (f[0] + fm[0] - self.lf.b_lin * v[0] - self.lf.bq * speed * v[0]) * inv_m,
            (f[1] + fm[1] - self.lf.b_lin * v[1] - self.lf.bq * speed * v[1]) * inv_m,
        ])
    }

    /// Advance `(x, v)` one step with forcing at start, midpoint and end.
    fn step(&mut self, x: &mut [f64; 2], v: &mut [f64; 2], f: [[f64; 2]; 3]) -> Result<()> {
        let dt = self.dt;
        let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
        let k1v = self.accel(*x, *v, f[0])?;
        let k1x = *v;
        let k2v = self.accel(add(*x, k1x, 0.5 * dt), add(*v, k1v, 0.5 * dt), f[1])?;
        let k2x = add(*v, k1v, 0.5 * dt);
        let k3v = self.accel(add(*x, k2x, 0.5 * dt), add(*v, k2v, 0.5 * dt), f[1])?;
        let k3x = add(*v, k2v, 0.5 * dt);
        let k4v = self.accel(add(*x, k3x, dt), add(*v, k3v, dt), f[2])?;
        let k4x = add(*v, k3v, dt);
        for i in 0..2 {
            x[i] += dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        Ok(())
    }
}

fn line_uplift(index: usize) -> CoreError {
    CoreError::Line {
        index,
        source: Box::new(CoreError::InvalidInput(
            "fairlead left the tabulated slack/uplift window".into(),
        )),
    }
}

/// Static equilibrium on the tabulated spread, refined from `guess`.
fn tabulated_equilibrium(spread: &TabulatedSpread, f_env: [f64; 2], guess: [f64; 2]) -> Result<[f64; 2]> {
    let n = spread.n_lines();
    solve_offset(f_env, guess, 1e-6, |x| {
        spread.restoring(x, &mut vec![0.0; n]).map_err(line_uplift)
    })
}

/// Prepared per-state inputs shared by all realizations.
struct StateSetup<'a> {
    sys: &'a MooringSystem,
    spread: &'a TabulatedSpread,
    v: &'a VesselModel,
    s: &'a MetoceanState,
    phi_eq: f64,
    f_mean: [f64; 2],
    x0: [f64; 2],
    // mean of the wave drift part, removed before ramping
    f_drift_mean: [f64; 2],
}

impl<'a> StateSetup<'a> {
    fn new(
        sys: &'a MooringSystem,
        spread: &'a TabulatedSpread,
        v: &'a VesselModel,
        s: &'a MetoceanState,
        phi_eq: f64,
        mean_offset: [f64; 2],
    ) -> Result<Self> {
        let f_mean = mean_environmental_force(v, s, phi_eq);
        let x0 = if f_mean == [0.0, 0.0] {
            [0.0, 0.0]
        } else {
            tabulated_equilibrium(spread, f_mean, mean_offset)?
        };
        let mut f_drift_mean = [0.0; 2];
        for w in s.waves() {
            let f = mean_wave_drift_load(v, w, phi_eq).to_global(phi_eq);
            f_drift_mean[0] += f[0];
            f_drift_mean[1] += f[1];
        }
        Ok(Self {
            sys,
            spread,
            v,
            s,
            phi_eq,
            f_mean,
            x0,
            f_drift_mean,
        })
    }

    fn run(&self, seed: u64, cfg: &QdConfig, mut trace: Option<&mut Vec<TracePoint>>) -> Result<RealizationExtremes> {
        let n_steps = cfg.n_steps();
        let w1 = synthesize_drift_force(self.v, &self.s.wave1, self.phi_eq, derive_seed(seed, 0), cfg)?;
        let w2 = synthesize_drift_force(self.v, &self.s.wave2, self.phi_eq, derive_seed(seed, 1), cfg)?;
        let wf = synthesize_wf(self.s, self.phi_eq, derive_seed(seed, 2), cfg)?;

        let force = |n: usize| -> [f64; 2] {
            let t = n as f64 * 0.5 * cfg.dt;
            let ramp = if cfg.ramp > 0.0 { (t / cfg.ramp).min(1.0) } else { 1.0 };
            [
                self.f_mean[0] + ramp * (w1.fx[n] + w2.fx[n] - self.f_drift_mean[0]),
                self.f_mean[1] + ramp * (w1.fy[n] + w2.fy[n] - self.f_drift_mean[1]),
            ]
        };

        let mut integ = Integrator::new(self.spread, cfg.lf, cfg.dt);
        let mut rec_h = vec![0.0; self.spread.n_lines()];
        // mean-offset direction; the mean force when there is no offset
        let fallback = if self.x0 != [0.0, 0.0] { self.x0 } else { self.f_mean };
        let fallback_dir = {
            let n = fallback[0].hypot(fallback[1]);
            if n > 0.0 {
                [fallback[0] / n, fallback[1] / n]
            } else {
                [0.0, 1.0]
            }
        };

        let (mut x, mut vel) = (self.x0, [0.0; 2]);
        let mut ext = RealizationExtremes {
            seed,
            max_offset: f64::NEG_INFINITY,
            offset_dir: 0.0,
            t_max_offset: f64::NAN,
            max_t_fair: f64::NEG_INFINITY,
            max_t_anchor: f64::NEG_INFINITY,
            t_max_t_fair: f64::NAN,
            sigma_lf: 0.0,
            sigma_wf: 0.0,
        };
        let (mut s1, mut s2, mut w2sum, mut count) = (0.0, 0.0, 0.0, 0usize);
        for n in 0..n_steps {
            integ.step(&mut x, &mut vel, [force(2 * n), force(2 * n + 1), force(2 * n + 2)])?;
            if !(x[0].is_finite() && x[1].is_finite() && vel[0].is_finite() && vel[1].is_finite()) {
                return Err(CoreError::Integration { step: n + 1 });
            }
            let t = (n + 1) as f64 * cfg.dt;
            if t <= cfg.ramp {
                continue;
            }
            let r_lf = x[0].hypot(x[1]);
            let u = if r_lf > 0.0 { [x[0] / r_lf, x[1] / r_lf] } else { fallback_dir };
            let w = wf[2 * n + 2];
            let r = r_lf + w;
            let p = [u[0] * r, u[1] * r];
            self.spread.restoring(p, &mut rec_h).map_err(line_uplift)?;
            let ext_t = extremes_of(
                &Daf::default(),
                rec_h.iter().zip(&self.sys.lines).map(|(h, l)| (h + l.w * self.sys.depth, *h)),
            );
            if r > ext.max_offset {
                ext.max_offset = r;
                ext.offset_dir = compass_of(u);
                ext.t_max_offset = t;
            }
            if ext_t.t_fair > ext.max_t_fair {
                ext.max_t_fair = ext_t.t_fair;
                ext.t_max_t_fair = t;
            }
            ext.max_t_anchor = ext.max_t_anchor.max(ext_t.t_anchor);
            let along = x[0] * fallback_dir[0] + x[1] * fallback_dir[1];
            s1 += along;
            s2 += along * along;
            w2sum += w * w;
            count += 1;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(TracePoint {
                    t,
                    x: p[0],
                    y: p[1],
                    t_fair: ext_t.t_fair,
                });
            }
        }
        let c = count as f64;
        ext.sigma_lf = ((s2 / c - (s1 / c).powi(2)).max(0.0)).sqrt();
        ext.sigma_wf = (w2sum / c).sqrt();
        Ok(ext)
    }
}

/// One realization on a freshly tabulated spread.
pub fn simulate_realization(
    sys: &MooringSystem,
    v: &VesselModel,
    s: &MetoceanState,
    phi_eq: f64,
    seed: u64,
    cfg: &QdConfig,
) -> Result<RealizationExtremes> {
    let spread = TabulatedSpread::new(sys)?;
    QdModel { sys, spread: &spread }.realization(v, s, phi_eq, seed, cfg)
}

/// Same as [`simulate_realization`], also returning the post-ramp trace.
pub fn trace_realization(
    sys: &MooringSystem,
    v: &VesselModel,
    s: &MetoceanState,
    phi_eq: f64,
    seed: u64,
    cfg: &QdConfig,
) -> Result<(RealizationExtremes, Vec<TracePoint>)> {
    cfg.validate()?;
    s.ensure_valid()?;
    let spread = TabulatedSpread::new(sys)?;
    let x_mean = mean_equilibrium_offset(sys, v, s, phi_eq)?;
    let setup = StateSetup::new(sys, &spread, v, s, phi_eq, x_mean)?;
    let mut trace = Vec::new();
    let ext = setup.run(seed, cfg, Some(&mut trace))?;
    Ok((ext, trace))
}

/// Free decay from `x0` at rest with no environmental forcing; returns the
/// offset at every step.
pub fn free_decay(sys: &MooringSystem, lf: &LfDynamics, x0: [f64; 2], dt: f64, steps: usize) -> Result<Vec<[f64; 2]>> {
    let spread = TabulatedSpread::new(sys)?;
    let mut integ = Integrator::new(&spread, *lf, dt);
    let (mut x, mut v) = (x0, [0.0; 2]);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x);
    for n in 0..steps {
        integ.step(&mut x, &mut v, [[0.0; 2]; 3])?;
        if !(x[0].is_finite() && x[1].is_finite()) {
            return Err(CoreError::Integration { step: n + 1 });
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelFit {
    pub mu: f64,
    pub beta: f64,
}

impl GumbelFit {
    /// Most probable maximum: the mode of the fitted distribution.
    pub fn mpm(&self) -> f64 {
        self.mu
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Method-of-moments Gumbel fit.
pub fn gumbel_fit(maxima: &[f64]) -> Result<GumbelFit> {
    if maxima.len() < 2 || maxima.iter().any(|x| !x.is_finite()) {
        return Err(CoreError::DegenerateSample);
    }
    let n = maxima.len() as f64;
    let mean = maxima.iter().sum::<f64>() / n;
    let var = maxima.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let beta = var.sqrt() * 6f64.sqrt() / PI;
    if !(beta > 0.0) {
        return Err(CoreError::DegenerateSample);
    }
    Ok(GumbelFit {
        mu: mean - EULER_GAMMA * beta,
        beta,
    })
}

/// Gumbel mode, or the common value when every realization gave the same
/// maximum (deterministic forcing).
fn mpm_of(values: &[f64]) -> Result<f64> {
    match gumbel_fit(values) {
        Ok(fit) => Ok(fit.mpm()),
        Err(CoreError::DegenerateSample) if values.iter().all(|x| *x == values[0]) => Ok(values[0]),
        Err(e) => Err(e),
    }
}

/// Mooring system bundled with its tension lookup tables, reusable across
/// states.
#[derive(Clone, Copy)]
pub struct QdModel<'a> {
    pub sys: &'a MooringSystem,
    pub spread: &'a TabulatedSpread,
}

impl QdModel<'_> {
    pub fn realization(
        &self,
        v: &VesselModel,
        s: &MetoceanState,
        phi_eq: f64,
        seed: u64,
        cfg: &QdConfig,
    ) -> Result<RealizationExtremes> {
        cfg.validate()?;
        s.ensure_valid()?;
        let x_mean = mean_equilibrium_offset(self.sys, v, s, phi_eq)?;
        StateSetup::new(self.sys, self.spread, v, s, phi_eq, x_mean)?.run(seed, cfg, None)
    }

    pub fn mpm(&self, v: &VesselModel, s: &MetoceanState, phi_eq: f64, cfg: &QdConfig) -> Result<ResponseStatistics> {
        cfg.validate()?;
        s.ensure_valid()?;
        let x_mean = mean_equilibrium_offset(self.sys, v, s, phi_eq)?;
        let setup = StateSetup::new(self.sys, self.spread, v, s, phi_eq, x_mean)?;
        let runs: Vec<RealizationExtremes> = (0..cfg.n_realizations as u64)
            .into_par_iter()
            .map(|i| setup.run(derive_seed(cfg.seed, i), cfg, None))
            .collect::<Result<_>>()?;

        let pick = |f: fn(&RealizationExtremes) -> f64| runs.iter().map(f).collect::<Vec<_>>();
        let mpm_offset = mpm_of(&pick(|r| r.max_offset))?;
        let t_fair = mpm_of(&pick(|r| r.max_t_fair))?;
        let t_anchor = mpm_of(&pick(|r| r.max_t_anchor))?;
        let (se, sn) = runs.iter().fold((0.0, 0.0), |(e, n), r| {
            let a = r.offset_dir.to_radians();
            (e + a.sin(), n + a.cos())
        });
        let offset_dir = if se == 0.0 && sn == 0.0 { 0.0 } else { compass_of([se, sn]) };
        let k = runs.len() as f64;
        let rms = |f: fn(&RealizationExtremes) -> f64| (runs.iter().map(|r| f(r).powi(2)).sum::<f64>() / k).sqrt();
        Ok(ResponseStatistics {
            phi_eq,
            mean_offset: x_mean,
            mpm_offset,
            offset_dir,
            mpm_t_fair: t_fair * self.sys.daf.fairlead,
            mpm_t_anchor: t_anchor * self.sys.daf.anchor,
            sigma_lf: rms(|r| r.sigma_lf),
            sigma_wf: rms(|r| r.sigma_wf),
            source: Source::Qd,
            daf_applied: true,
        })
    }
}

/// QD statistics for one state: `n_realizations` runs with seeds derived
/// from the master seed, Gumbel-fitted per response.
pub fn qd_mpm(
    sys: &MooringSystem,
    v: &VesselModel,
    s: &MetoceanState,
    phi_eq: f64,
    cfg: &QdConfig,
) -> Result<ResponseStatistics> {
    let spread = TabulatedSpread::new(sys)?;
    QdModel { sys, spread: &spread }.mpm(v, s, phi_eq, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Gumbel};

    #[test]
    fn gumbel_recovers_parameters() {
        let mut rng = rng_from_seed(11);
        let g = Gumbel::new(10.0, 2.0).unwrap();
        let xs: Vec<f64> = (0..10_000).map(|_| g.sample(&mut rng)).collect();
        let fit = gumbel_fit(&xs).unwrap();
        assert!((fit.mu - 10.0).abs() <= 0.1 && (fit.beta - 2.0).abs() <= 0.1, "{fit:?}");
        assert_eq!(fit.mpm(), fit.mu);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(fit.mu <= mean);
    }

    #[test]
    fn gumbel_shift_equivariance() {
        let xs = [3.0, 4.5, 2.2, 7.1, 5.0];
        let a = gumbel_fit(&xs).unwrap();
        let shifted: Vec<f64> = xs.iter().map(|x| x + 100.0).collect();
        let b = gumbel_fit(&shifted).unwrap();
        assert!((b.mu - a.mu - 100.0).abs() < 1e-12);
        assert!((b.beta - a.beta).abs() < 1e-12);
        assert!(matches!(gumbel_fit(&[1.0, 1.0, 1.0]), Err(CoreError::DegenerateSample)));
        assert!(gumbel_fit(&[1.0]).is_err());
    }

    #[test]
    fn calm_sea_gives_zero_drift_series() {
        let v = VesselModel::default();
        let cfg = QdConfig { duration: 600.0, ramp: 60.0, ..QdConfig::default() };
        let f = synthesize_drift_force(&v, &WaveSystem::calm(), 0.0, 1, &cfg).unwrap();
        assert!(f.fx.iter().chain(&f.fy).all(|x| *x == 0.0));
    }

    #[test]
    fn drift_series_is_seed_deterministic() {
        let v = VesselModel::default();
        let cfg = QdConfig { duration: 1200.0, ramp: 60.0, ..QdConfig::default() };
        let w = WaveSystem::new(4.0, 10.0, 30.0);
        let a = synthesize_drift_force(&v, &w, 25.0, 5, &cfg).unwrap();
        let b = synthesize_drift_force(&v, &w, 25.0, 5, &cfg).unwrap();
        assert_eq!(a, b);
        let c = synthesize_drift_force(&v, &w, 25.0, 6, &cfg).unwrap();
        assert_ne!(a, c);
    }
}
