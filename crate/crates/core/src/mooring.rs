//! Elastic catenary statics and the turret mooring spread.
//!
//! Each line is a touchdown catenary: a grounded segment from the anchor,
//! then a suspended segment rising to the fairlead. With `a = h/w`
//!
//! ```text
//! depth  = a (cosh(xs/a) − 1)
//! s_susp = a sinh(xs/a)        = √(depth (depth + 2a))
//! span   = (length − s_susp) + xs + h·length/ea
//! ```
//!
//! so `span(h)` is strictly increasing between the slack limit `h → 0`
//! (`span → length − depth`) and anchor uplift (`s_susp = length`). The
//! stretch term treats the whole line as carrying `h`.
//!
//! Fairleads sit at the mooring centre; the turret radius is folded into
//! each anchor radius.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::metocean::wrap_deg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub length: f64,
    /// Submerged weight per unit length, N/m.
    pub w: f64,
    /// Axial stiffness, N. `f64::INFINITY` gives an inextensible line.
    pub ea: f64,
    pub anchor_radius: f64,
    /// Compass azimuth of the anchor seen from the mooring centre, deg.
    pub psi: f64,
    pub capacity_mbl: f64,
}

impl LineSpec {
    pub fn validate(&self, depth: f64) -> Result<()> {
        let ok = self.length > depth
            && self.w > 0.0
            && self.ea > 0.0
            && self.anchor_radius > 0.0
            && self.capacity_mbl > 0.0
            && self.psi.is_finite();
        if ok {
            Ok(())
        } else {
            Err(CoreError::InvalidInput(format!(
                "line spec needs length > depth ({depth} m) and positive w, ea, anchor_radius, mbl"
            )))
        }
    }

    /// Horizontal tension at which the suspended length reaches the full line.
    pub fn uplift_tension(&self, depth: f64) -> f64 {
        self.w * (self.length * self.length - depth * depth) / (2.0 * depth)
    }

    /// Feasible span interval `(slack, uplift)`.
    pub fn span_window(&self, depth: f64) -> (f64, f64) {
        let hi = line_span(self, depth, self.uplift_tension(depth));
        (self.length - depth, hi)
    }

    pub fn anchor_position(&self) -> [f64; 2] {
        let (s, c) = self.psi.to_radians().sin_cos();
        [self.anchor_radius * s, self.anchor_radius * c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSolution {
    pub h: f64,
    pub t_fair: f64,
    pub t_anchor: f64,
    pub s_susp: f64,
    pub grounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Daf {
    pub fairlead: f64,
    pub anchor: f64,
}

impl Default for Daf {
    fn default() -> Self {
        Self {
            fairlead: 1.0,
            anchor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MooringSystem {
    pub depth: f64,
    pub lines: Vec<LineSpec>,
    pub turret_radius: f64,
    pub daf: Daf,
}

/// Parameters for a symmetric three-cluster spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpreadLayout {
    pub depth: f64,
    /// Azimuth of the first cluster centre; the others follow at +120° and +240°.
    pub first_cluster_deg: f64,
    pub lines_per_cluster: usize,
    /// Angle between neighbouring lines within a cluster, deg.
    pub separation_deg: f64,
    pub line: LineSpec,
    pub turret_radius: f64,
    pub daf: Daf,
}

impl Default for SpreadLayout {
    /// Synthetic studless-chain spread in 400 m of water.
    fn default() -> Self {
        Self {
            depth: 400.0,
            first_cluster_deg: 90.0,
            lines_per_cluster: 3,
            separation_deg: 5.0,
            line: LineSpec {
                length: 2400.0,
                w: 2000.0,
                ea: 2.0e9,
                anchor_radius: 2220.0,
                psi: 0.0,
                capacity_mbl: 7.5e6,
            },
            turret_radius: 10.0,
            daf: Daf {
                fairlead: 1.1,
                anchor: 1.05,
            },
        }
    }
}

impl SpreadLayout {
    pub fn build(&self) -> Result<MooringSystem> {
        if self.lines_per_cluster == 0 {
            return Err(CoreError::InvalidInput("lines_per_cluster must be > 0".into()));
        }
        let half = 0.5 * (self.lines_per_cluster as f64 - 1.0);
        let mut lines = Vec::with_capacity(3 * self.lines_per_cluster);
        for c in 0..3 {
            let centre = self.first_cluster_deg + 120.0 * c as f64;
            for j in 0..self.lines_per_cluster {
                let psi = wrap_deg(centre + (j as f64 - half) * self.separation_deg);
                lines.push(LineSpec { psi, ..self.line });
            }
        }
        let sys = MooringSystem {
            depth: self.depth,
            lines,
            turret_radius: self.turret_radius,
            daf: self.daf,
        };
        sys.validate()?;
        Ok(sys)
    }
}

impl Default for MooringSystem {
    fn default() -> Self {
        SpreadLayout::default().build().expect("default layout is valid")
    }
}

impl MooringSystem {
    pub fn validate(&self) -> Result<()> {
        if !(self.depth > 0.0) || self.lines.is_empty() {
            return Err(CoreError::InvalidInput(
                "mooring needs depth > 0 and at least one line".into(),
            ));
        }
        if !(self.daf.fairlead >= 1.0 && self.daf.anchor >= 1.0) {
            return Err(CoreError::InvalidInput("dynamic amplification factors must be >= 1".into()));
        }
        for (i, l) in self.lines.iter().enumerate() {
            l.validate(self.depth).map_err(|e| line_err(i, e))?;
            let (lo, hi) = l.span_window(self.depth);
            if l.anchor_radius <= lo || l.anchor_radius >= hi {
                return Err(line_err(
                    i,
                    CoreError::InvalidInput(format!(
                        "anchor radius {} m outside feasible span window ({lo:.1}, {hi:.1})",
                        l.anchor_radius
                    )),
                ));
            }
        }
        Ok(())
    }

    /// Horizontal distance from the fairlead at `offset` to line `i`'s anchor.
    pub fn span(&self, i: usize, offset: [f64; 2]) -> f64 {
        let a = self.lines[i].anchor_position();
        (a[0] - offset[0]).hypot(a[1] - offset[1])
    }

    pub fn pretension(&self) -> Result<f64> {
        let l = &self.lines[0];
        Ok(solve_line(l, l.anchor_radius, self.depth)?.h)
    }

    pub fn min_mbl(&self) -> f64 {
        self.lines
            .iter()
            .map(|l| l.capacity_mbl)
            .fold(f64::INFINITY, f64::min)
    }
}

fn line_err(index: usize, e: CoreError) -> CoreError {
    CoreError::Line {
        index,
        source: Box::new(e),
    }
}

fn line_span(line: &LineSpec, depth: f64, h: f64) -> f64 {
    let a = h / line.w;
    let s = (depth * (depth + 2.0 * a)).sqrt();
    let xs = a * (depth / a).ln_1p_acosh();
    line.length - s + xs + h * line.length / line.ea
}

fn line_span_slope(line: &LineSpec, depth: f64, h: f64) -> f64 {
    let a = h / line.w;
    let s = (depth * (depth + 2.0 * a)).sqrt();
    ((depth / a).ln_1p_acosh() - 2.0 * depth / s) / line.w + line.length / line.ea
}

/// `acosh(1 + x)` without the cancellation in `1 + x` for small `x`.
trait Acosh1p {
    fn ln_1p_acosh(self) -> f64;
}

impl Acosh1p for f64 {
    fn ln_1p_acosh(self) -> f64 {
        // acosh(1+x) = ln(1 + x + √(x(x+2)))
        (self + (self * (self + 2.0)).sqrt()).ln_1p()
    }
}

fn solution_at(line: &LineSpec, depth: f64, h: f64) -> LineSolution {
    let s = (depth * (depth + 2.0 * h / line.w)).sqrt();
    LineSolution {
        h,
        t_fair: h + line.w * depth,
        t_anchor: h,
        s_susp: s,
        grounded: s < line.length,
    }
}

/// Solve one line for the horizontal tension giving `span`.
pub fn solve_line(line: &LineSpec, span: f64, depth: f64) -> Result<LineSolution> {
    line.validate(depth)?;
    if !span.is_finite() {
        return Err(CoreError::InvalidInput(format!("non-finite span {span}")));
    }
    if span <= line.length - depth {
        return Err(CoreError::Slack { span });
    }
    let h_up = line.uplift_tension(depth);
    let limit = line_span(line, depth, h_up);
    if span > limit {
        return Err(CoreError::Uplift { span, limit });
    }

    // safeguarded Newton on the monotone span(h)
    let (mut lo, mut hi) = (0.0, h_up);
    let mut h = 0.5 * h_up;
    for _ in 0..200 {
        let r = line_span(line, depth, h) - span;
        if r.abs() <= 1e-10 {
            return Ok(solution_at(line, depth, h));
        }
        if r > 0.0 {
            hi = h;
        } else {
            lo = h;
        }
        let step = r / line_span_slope(line, depth, h);
        let mut next = h - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - h).abs() <= 1e-13 * h {
            return Ok(solution_at(line, depth, next));
        }
        h = next;
    }
    Err(CoreError::NoConvergence {
        what: "catenary line solve",
        iterations: 200,
    })
}

/// Reconstruct the span from a horizontal tension (the forward map).
pub fn span_for_tension(line: &LineSpec, h: f64, depth: f64) -> f64 {
    line_span(line, depth, h)
}

/// Net horizontal mooring force on the turret (global east/north, N) and
/// the per-line solutions. Yaw moment is zero since all fairleads coincide.
pub fn system_restoring(sys: &MooringSystem, offset: [f64; 2]) -> Result<([f64; 2], Vec<LineSolution>)> {
    let mut f = [0.0; 2];
    let mut sols = Vec::with_capacity(sys.lines.len());
    for (i, l) in sys.lines.iter().enumerate() {
        let a = l.anchor_position();
        let d = [a[0] - offset[0], a[1] - offset[1]];
        let span = d[0].hypot(d[1]);
        let sol = solve_line(l, span, sys.depth).map_err(|e| line_err(i, e))?;
        f[0] += sol.h * d[0] / span;
        f[1] += sol.h * d[1] / span;
        sols.push(sol);
    }
    Ok((f, sols))
}

pub type Matrix2 = [[f64; 2]; 2];

/// Tangent stiffness `K = −∂F/∂x` by central differences with `step` m.
pub fn linearized_stiffness_with_step(sys: &MooringSystem, offset: [f64; 2], step: f64) -> Result<Matrix2> {
    let mut k = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut p = offset;
        let mut m = offset;
        p[j] += step;
        m[j] -= step;
        let (fp, _) = system_restoring(sys, p)?;
        let (fm, _) = system_restoring(sys, m)?;
        for i in 0..2 {
            k[i][j] = -(fp[i] - fm[i]) / (2.0 * step);
        }
    }
    Ok(k)
}

pub fn linearized_stiffness(sys: &MooringSystem, offset: [f64; 2]) -> Result<Matrix2> {
    linearized_stiffness_with_step(sys, offset, 0.01)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineExtremes {
    pub t_fair: f64,
    pub fair_line: usize,
    pub t_anchor: f64,
    pub anchor_line: usize,
}

/// Largest DAF-scaled fairlead and anchor tensions over all lines; ties go
/// to the lowest line index.
pub fn extreme_line_tensions(sys: &MooringSystem, offset: [f64; 2]) -> Result<LineExtremes> {
    let (_, sols) = system_restoring(sys, offset)?;
    Ok(extremes_of(&sys.daf, sols.iter().map(|s| (s.t_fair, s.t_anchor))))
}

pub(crate) fn extremes_of(daf: &Daf, tensions: impl Iterator<Item = (f64, f64)>) -> LineExtremes {
    let mut out = LineExtremes {
        t_fair: f64::NEG_INFINITY,
        fair_line: 0,
        t_anchor: f64::NEG_INFINITY,
        anchor_line: 0,
    };
    for (i, (tf, ta)) in tensions.enumerate() {
        if tf > out.t_fair {
            out.t_fair = tf;
            out.fair_line = i;
        }
        if ta > out.t_anchor {
            out.t_anchor = ta;
            out.anchor_line = i;
        }
    }
    out.t_fair *= daf.fairlead;
    out.t_anchor *= daf.anchor;
    out
}

/// Cubic-Hermite lookup of `h(span)` for one line on a uniform span grid,
/// used by the time-domain integrator where exact solves per step are too
/// slow.
#[derive(Debug, Clone)]
pub struct LineTable {
    span0: f64,
    inv_step: f64,
    step: f64,
    h: Vec<f64>,
    dh: Vec<f64>,
}

impl LineTable {
    pub fn new(line: &LineSpec, depth: f64, n: usize) -> Result<Self> {
        line.validate(depth)?;
        let h_up = line.uplift_tension(depth);
        // start where tension is negligible; the slack end has a log singularity
        let h_lo = 1e-6 * h_up;
        let span0 = line_span(line, depth, h_lo);
        let span1 = line_span(line, depth, h_up);
        let step = (span1 - span0) / (n - 1) as f64;
        let mut h = Vec::with_capacity(n);
        let mut dh = Vec::with_capacity(n);
        for k in 0..n {
            let span = if k + 1 == n { span1 } else { span0 + step * k as f64 };
            let hk = if k == 0 {
                h_lo
            } else if k + 1 == n {
                h_up
            } else {
                solve_line(line, span, depth)?.h
            };
            h.push(hk);
            dh.push(1.0 / line_span_slope(line, depth, hk));
        }
        Ok(Self {
            span0,
            inv_step: 1.0 / step,
            step,
            h,
            dh,
        })
    }

    pub fn span_range(&self) -> (f64, f64) {
        (self.span0, self.span0 + self.step * (self.h.len() - 1) as f64)
    }

    /// Horizontal tension at `span`; `None` outside the tabulated window.
    #[inline]
    pub fn tension(&self, span: f64) -> Option<f64> {
        let u = (span - self.span0) * self.inv_step;
        let last = self.h.len() - 1;
        if !(u >= 0.0 && u <= last as f64) {
            return None;
        }
        let k = (u as usize).min(last - 1);
        let t = u - k as f64;
        let (h0, h1) = (self.h[k], self.h[k + 1]);
        let (m0, m1) = (self.dh[k] * self.step, self.dh[k + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * h0
                + (t3 - 2.0 * t2 + t) * m0
                + (-2.0 * t3 + 3.0 * t2) * h1
                + (t3 - t2) * m1,
        )
    }
}

/// Tabulated restoring model for a whole spread.
#[derive(Debug, Clone)]
pub struct TabulatedSpread {
    anchors: Vec<[f64; 2]>,
    tables: Vec<LineTable>,
}

impl TabulatedSpread {
    pub const DEFAULT_NODES: usize = 8192;

    pub fn new(sys: &MooringSystem) -> Result<Self> {
        Self::with_nodes(sys, Self::DEFAULT_NODES)
    }

    pub fn with_nodes(sys: &MooringSystem, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(CoreError::InvalidInput("line table needs at least 4 nodes".into()));
        }
        let mut tables: Vec<LineTable> = Vec::with_capacity(sys.lines.len());
        for (i, l) in sys.lines.iter().enumerate() {
            // identical lines share one table
            let twin = sys.lines[..i]
                .iter()
                .position(|o| o.length == l.length && o.w == l.w && o.ea == l.ea);
            let t = match twin {
                Some(j) => tables[j].clone(),
                None => LineTable::new(l, sys.depth, n).map_err(|e| line_err(i, e))?,
            };
            tables.push(t);
        }
        Ok(Self {
            anchors: sys.lines.iter().map(|l| l.anchor_position()).collect(),
            tables,
        })
    }

    /// Net restoring force; writes each line's horizontal tension into `h`
    /// and returns the index of the first infeasible line on failure.
    #[inline]
    pub fn restoring(&self, offset: [f64; 2], h: &mut [f64]) -> Result<[f64; 2], usize> {
        let mut f = [0.0; 2];
        for (i, (a, t)) in self.anchors.iter().zip(&self.tables).enumerate() {
            let d = [a[0] - offset[0], a[1] - offset[1]];
            let span = d[0].hypot(d[1]);
            let hi = t.tension(span).ok_or(i)?;
            h[i] = hi;
            let r = hi / span;
            f[0] += r * d[0];
            f[1] += r * d[1];
        }
        Ok(f)
    }

    pub fn n_lines(&self) -> usize {
        self.tables.len()
    }
}
