//! Passive weathervaning equilibrium heading.
//!
//! The net yaw moment `M(φ)` about the turret is treated as a conservative
//! field with potential `V(φ) = −∫₀^φ M dφ'` (φ in radians for the
//! integral). Equilibria are the zeros of `M`; stable ones have
//! `dM/dφ < 0`. The reported heading is the global minimum of `V`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::metocean::{wrap_deg, MetoceanState};
use crate::vessel::{VesselModel, YawMomentProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeadingConfig {
    /// Scan grid spacing, deg.
    pub scan_step_deg: f64,
    /// Bracket width at which bisection / golden-section refinement stops, deg.
    pub refine_tol_deg: f64,
    /// Absolute tolerance under which two minima are considered tied, J.
    pub tie_tol_j: f64,
}

impl Default for HeadingConfig {
    fn default() -> Self {
        Self {
            scan_step_deg: 0.5,
            refine_tol_deg: 0.01,
            tie_tol_j: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub phi: f64,
    pub stable: bool,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadingSolution {
    pub phi_eq: f64,
    pub v_min: f64,
    /// Sorted by `phi`.
    pub equilibria: Vec<Equilibrium>,
    /// Set when the environment exerts no yaw moment; `phi_eq` is then 0°.
    pub degenerate: bool,
}

// 5-point Gauss–Legendre nodes and weights on [-1, 1]
const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Potential energy `V` on `phi_grid` (deg) by the trapezoid rule.
/// The grid must start at 0°, end at 360° and have steps of at most 1°.
pub fn potential_energy(v: &VesselModel, s: &MetoceanState, phi_grid: &[f64]) -> Result<Vec<f64>> {
    let n = phi_grid.len();
    if n < 2 || phi_grid[0].abs() > 1e-9 || (phi_grid[n - 1] - 360.0).abs() > 1e-9 {
        return Err(CoreError::InvalidInput(
            "heading grid must cover [0, 360] degrees".into(),
        ));
    }
    if phi_grid
        .windows(2)
        .any(|w| !(w[1] > w[0]) || w[1] - w[0] > 1.0 + 1e-12)
    {
        return Err(CoreError::InvalidInput(
            "heading grid must be ascending with steps <= 1 degree".into(),
        ));
    }
    let profile = YawMomentProfile::new(v, s);
    let m: Vec<f64> = phi_grid.iter().map(|p| profile.moment(p.to_radians())).collect();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..n {
        let h = (phi_grid[k] - phi_grid[k - 1]).to_radians();
        acc -= 0.5 * h * (m[k] + m[k - 1]);
        out.push(acc);
    }
    Ok(out)
}

pub fn solve_equilibrium_heading(v: &VesselModel, s: &MetoceanState) -> Result<HeadingSolution> {
    HeadingSolver::default().solve(v, s)
}

pub fn find_equilibria(v: &VesselModel, s: &MetoceanState) -> Result<Vec<Equilibrium>> {
    Ok(HeadingSolver::default().solve(v, s)?.equilibria)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HeadingSolver {
    pub config: HeadingConfig,
}

/// Moment function bound to one state, with a cumulative potential table on
/// the scan grid.
struct Field<'a> {
    profile: &'a YawMomentProfile,
    step: f64,
    // V at scan nodes k·step, k = 0..=n
    v_nodes: Vec<f64>,
}

impl<'a> Field<'a> {
    fn new(profile: &'a YawMomentProfile, step: f64, n: usize) -> Self {
        let mut v_nodes = Vec::with_capacity(n + 1);
        v_nodes.push(0.0);
        let mut acc = 0.0;
        for k in 0..n {
            acc += Self::panel(profile, k as f64 * step, (k + 1) as f64 * step);
            v_nodes.push(acc);
        }
        Self {
            profile,
            step,
            v_nodes,
        }
    }

    fn moment(&self, phi_deg: f64) -> f64 {
        self.profile.moment(phi_deg.to_radians())
    }

    /// `−∫_a^b M dφ` by Gauss–Legendre (degrees in, radians integrated).
    fn panel(profile: &YawMomentProfile, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = GL_NODES
            .iter()
            .zip(GL_WEIGHTS)
            .map(|(x, w)| w * profile.moment((mid + half * x).to_radians()))
            .sum();
        -sum * half.to_radians()
    }

    /// `V(φ)` for φ in [0, 360].
    fn potential(&self, phi: f64) -> f64 {
        let k = ((phi / self.step).floor() as usize).min(self.v_nodes.len() - 1);
        let base = k as f64 * self.step;
        self.v_nodes[k] + Self::panel(self.profile, base, phi)
    }

    fn slope(&self, phi: f64) -> f64 {
        // central difference in radians
        let h = 1e-4;
        (self.moment(phi + h) - self.moment(phi - h)) / (2.0 * h).to_radians()
    }
}

impl HeadingSolver {
    pub fn new(config: HeadingConfig) -> Self {
        Self { config }
    }

    pub fn solve(&self, v: &VesselModel, s: &MetoceanState) -> Result<HeadingSolution> {
        let cfg = &self.config;
        if !(cfg.scan_step_deg > 0.0 && cfg.scan_step_deg <= 1.0 && cfg.refine_tol_deg > 0.0) {
            return Err(CoreError::InvalidInput(
                "heading scan step must lie in (0, 1] degrees".into(),
            ));
        }
        s.ensure_valid()?;
        let n = (360.0 / cfg.scan_step_deg).round() as usize;
        let step = 360.0 / n as f64;
        let profile = YawMomentProfile::new(v, s);
        let field = Field::new(&profile, step, n);
        let m: Vec<f64> = (0..=n).map(|k| field.moment(k as f64 * step)).collect();

        let scale = m.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if profile.is_zero() || scale == 0.0 {
            return Ok(HeadingSolution {
                phi_eq: 0.0,
                v_min: 0.0,
                equilibria: vec![Equilibrium {
                    phi: 0.0,
                    stable: true,
                    v: 0.0,
                }],
                degenerate: true,
            });
        }

        let mut roots = Vec::new();
        for k in 0..n {
            let (a, b) = (m[k], m[k + 1]);
            if a == 0.0 {
                roots.push(k as f64 * step);
            } else if b != 0.0 && (a < 0.0) != (b < 0.0) {
                roots.push(self.bisect(&field, k as f64 * step, (k + 1) as f64 * step, a));
            }
        }

        let mut equilibria: Vec<Equilibrium> = roots
            .into_iter()
            .map(|phi| {
                let phi = wrap_deg(phi);
                Equilibrium {
                    phi,
                    stable: field.slope(phi) < 0.0,
                    v: field.potential(phi),
                }
            })
            .collect();
        equilibria.sort_by(|a, b| a.phi.total_cmp(&b.phi));

        let v_scale = field.v_nodes.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let tie = cfg.tie_tol_j + 1e-12 * v_scale;
        let mut best: Option<usize> = None;
        for (i, e) in equilibria.iter().enumerate() {
            if !e.stable {
                continue;
            }
            best = match best {
                None => Some(i),
                // strictly lower beyond the tie band wins; ties keep the smaller phi
                Some(j) if e.v < equilibria[j].v - tie => Some(i),
                keep => keep,
            };
        }
        let Some(best) = best else {
            return Err(CoreError::NoConvergence {
                what: "heading search (no stable equilibrium found)",
                iterations: n,
            });
        };

        let phi_eq = self.golden(&field, equilibria[best].phi);
        let v_min = field.potential(phi_eq);
        equilibria[best].phi = phi_eq;
        equilibria[best].v = v_min;
        equilibria.sort_by(|a, b| a.phi.total_cmp(&b.phi));

        Ok(HeadingSolution {
            phi_eq,
            v_min,
            equilibria,
            degenerate: false,
        })
    }

    fn bisect(&self, field: &Field, mut lo: f64, mut hi: f64, m_lo: f64) -> f64 {
        let neg_lo = m_lo < 0.0;
        while hi - lo > self.config.refine_tol_deg {
            let mid = 0.5 * (lo + hi);
            let mm = field.moment(mid);
            if mm == 0.0 {
                return mid;
            }
            if (mm < 0.0) == neg_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Golden-section minimization of `V` around a stable root.
    fn golden(&self, field: &Field, center: f64) -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let step = field.step;
        // work on an unwrapped bracket; V is 360°-periodic
        let pot = |phi: f64| field.potential(wrap_deg(phi));
        let (mut a, mut b) = (center - step, center + step);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = (pot(c), pot(d));
        while b - a > self.config.refine_tol_deg {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = pot(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = pot(d);
            }
        }
        wrap_deg(0.5 * (a + b))
    }
}
