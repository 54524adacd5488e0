//! Harmonic transmission problem: explicit layer-potential representation,
//! field and gradient evaluation, jump verification, and window seminorms.
//!
//! With the single layer `S` and double layer `D` of [`crate::kernels`], the
//! field `u = S g + D f` is harmonic off the boundary, decays at infinity for
//! gauged data, and carries the prescribed jumps: the trace jumps by `-f`
//! across the boundary (interior minus exterior) and the normal derivative
//! jumps by `g`. No linear solve is involved; the representation is explicit.

use nalgebra::Vector2;
use rayon::prelude::*;

use crate::geometry::{Vec2, Window};
use crate::kernels::{dlp_panel, grad_dlp_panel, grad_slp_panel, slp_panel};
use crate::mesh::{BoundaryMesh, DensityFn, TraceFn};
use crate::{Error, Result};

/// Relative slack accepted when checking the mean-zero gauge of input data.
const GAUGE_TOL: f64 = 1e-9;

/// Minimum probe distance, relative to the local panel length.
const MIN_PROBE_REL: f64 = 1e-10;

/// Explicit layer-potential solution of the transmission problem.
#[derive(Debug, Clone)]
pub struct TransmissionSolution {
    mesh: BoundaryMesh,
    f: TraceFn,
    g: DensityFn,
}

/// Sampled field over a point set: values and exact gradients.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub points: Vec<Vec2>,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec2>,
    /// Free-form tag identifying the window or grid the sample lives on.
    pub window: String,
}

/// Result of a Plemelj jump verification at the panel midpoints.
#[derive(Debug, Clone)]
pub struct JumpReport {
    /// `max_p |(u_i - u_e)(x_p) - (-f(x_p))|`, Richardson-extrapolated.
    pub trace_residual: f64,
    /// `max_p |(du_i - du_e)/dnu (x_p) - g(x_p)|`, Richardson-extrapolated.
    pub flux_residual: f64,
    /// `max_p |f(x_p)|`, for relative reporting.
    pub trace_scale: f64,
    /// `max_p |g(x_p)|`, for relative reporting.
    pub flux_scale: f64,
    /// Extrapolated trace jump `(u_i - u_e)(x_p)` per panel midpoint.
    pub trace_jumps: Vec<f64>,
    /// Extrapolated flux jump `(du_i - du_e)/dnu (x_p)` per panel midpoint.
    pub flux_jumps: Vec<f64>,
}

/// Wraps prescribed jump data `(f, g)` into the explicit representation
/// `u = S g + D f`. Both data must be gauged (mean zero against arclength).
pub fn solve_transmission(mesh: &BoundaryMesh, f: &TraceFn, g: &DensityFn) -> Result<TransmissionSolution> {
    if f.values.len() != mesh.n_vertices() || g.values.len() != mesh.n_panels() {
        return Err(Error::MeshMismatch);
    }
    let scale_f: f64 = f.values.iter().fold(0.0, |a, v| a.max(v.abs()));
    let scale_g: f64 = g.values.iter().fold(0.0, |a, v| a.max(v.abs()));
    let per = mesh.perimeter();
    if f.integral(mesh)?.abs() > GAUGE_TOL * per * scale_f.max(1.0)
        || g.integral(mesh)?.abs() > GAUGE_TOL * per * scale_g.max(1.0)
    {
        return Err(Error::GaugeViolation);
    }
    Ok(TransmissionSolution {
        mesh: mesh.clone(),
        f: f.clone(),
        g: g.clone(),
    })
}

impl TransmissionSolution {
    pub fn mesh(&self) -> &BoundaryMesh {
        &self.mesh
    }

    /// Prescribed trace jump data.
    pub fn trace_data(&self) -> &TraceFn {
        &self.f
    }

    /// Prescribed flux jump data.
    pub fn flux_data(&self) -> &DensityFn {
        &self.g
    }

    fn guard_probe(&self, x: Vec2) -> Result<()> {
        let h = self.mesh.perimeter() / self.mesh.n_panels() as f64;
        if self.mesh.distance(x) < MIN_PROBE_REL * h {
            return Err(Error::ProbeTooClose);
        }
        Ok(())
    }

    /// Evaluates `u(x)` at a point off the boundary.
    pub fn eval(&self, x: Vec2) -> Result<f64> {
        self.guard_probe(x)?;
        let mut acc = 0.0;
        for (p, panel) in self.mesh.panels().enumerate() {
            let ws = slp_panel(&panel, x, false)?;
            let wd = dlp_panel(&panel, x, false)?;
            acc += self.g.values[p] * ws.constant
                + self.f.values[panel.ia] * wd.hat_a
                + self.f.values[panel.ib] * wd.hat_b;
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite(x.x, x.y));
        }
        Ok(acc)
    }

    /// Evaluates `grad u(x)` at a point off the boundary.
    pub fn grad(&self, x: Vec2) -> Result<Vec2> {
        self.guard_probe(x)?;
        let mut acc = Vector2::zeros();
        for (p, panel) in self.mesh.panels().enumerate() {
            let gs = grad_slp_panel(&panel, x)?;
            let gd = grad_dlp_panel(&panel, x)?;
            acc += self.g.values[p] * gs.constant
                + self.f.values[panel.ia] * gd.hat_a
                + self.f.values[panel.ib] * gd.hat_b;
        }
        if !acc.x.is_finite() || !acc.y.is_finite() {
            return Err(Error::NonFinite(x.x, x.y));
        }
        Ok(acc)
    }

    /// Samples values and gradients over a point set, in parallel with a
    /// deterministic per-point panel order.
    pub fn sample(&self, points: &[Vec2], window: &str) -> Result<FieldSample> {
        let rows: Vec<Result<(f64, Vec2)>> = points
            .par_iter()
            .map(|&x| Ok((self.eval(x)?, self.grad(x)?)))
            .collect();
        let mut values = Vec::with_capacity(points.len());
        let mut gradients = Vec::with_capacity(points.len());
        for row in rows {
            let (v, g) = row?;
            values.push(v);
            gradients.push(g);
        }
        Ok(FieldSample {
            points: points.to_vec(),
            values,
            gradients,
            window: window.to_string(),
        })
    }
}

/// Extrapolates samples at offsets `{4h, 2h, h}` to zero offset assuming a
/// quadratic error model.
fn richardson3(j4: f64, j2: f64, j1: f64) -> f64 {
    (8.0 * j1 - 6.0 * j2 + j4) / 3.0
}

/// Verifies the Plemelj jump relations at every panel midpoint by probing
/// the field at `x -+ eps nu` over the offset schedule (multiples of the
/// local panel length) and Richardson-extrapolating to the boundary.
pub fn jump_check(sol: &TransmissionSolution, schedule: &[f64; 3]) -> Result<JumpReport> {
    let mesh = &sol.mesh;
    for &e in schedule {
        if e < 10.0 * MIN_PROBE_REL {
            return Err(Error::ProbeTooClose);
        }
    }
    let per_panel: Vec<Result<(f64, f64, f64, f64)>> = (0..mesh.n_panels())
        .into_par_iter()
        .map(|p| {
            let panel = mesh.panel(p);
            let x = panel.midpoint();
            let nu = panel.normal();
            let len = panel.length();
            let mut tr = [0.0f64; 3];
            let mut fl = [0.0f64; 3];
            for (i, &rel) in schedule.iter().enumerate() {
                let eps = rel * len;
                let xi = x - eps * nu;
                let xe = x + eps * nu;
                tr[i] = sol.eval(xi)? - sol.eval(xe)?;
                fl[i] = nu.dot(&(sol.grad(xi)? - sol.grad(xe)?));
            }
            let f_mid = 0.5 * (sol.f.values[panel.ia] + sol.f.values[panel.ib]);
            let g_mid = sol.g.values[p];
            let tr0 = richardson3(tr[0], tr[1], tr[2]);
            let fl0 = richardson3(fl[0], fl[1], fl[2]);
            Ok(((tr0 - (-f_mid)).abs(), (fl0 - g_mid).abs(), tr0, fl0))
        })
        .collect();
    let mut trace_residual = 0.0f64;
    let mut flux_residual = 0.0f64;
    let mut trace_jumps = Vec::with_capacity(mesh.n_panels());
    let mut flux_jumps = Vec::with_capacity(mesh.n_panels());
    for r in per_panel {
        let (t, f, tj, fj) = r?;
        trace_residual = trace_residual.max(t);
        flux_residual = flux_residual.max(f);
        trace_jumps.push(tj);
        flux_jumps.push(fj);
    }
    Ok(JumpReport {
        trace_residual,
        flux_residual,
        trace_scale: sol.f.values.iter().fold(0.0, |a, v| a.max(v.abs())),
        flux_scale: sol.g.values.iter().fold(0.0, |a, v| a.max(v.abs())),
        trace_jumps,
        flux_jumps,
    })
}

/// Default Richardson offset schedule, as multiples of the panel length.
pub const JUMP_SCHEDULE: [f64; 3] = [4e-3, 2e-3, 1e-3];

/// Midpoint-quadrature grid covering a window at pitch at most `h`.
fn window_grid(window: &Window, h: f64) -> (Vec<Vec2>, f64) {
    let (lo, hi) = match window {
        Window::Rect { min, max } => (*min, *max),
        Window::Disk { center, radius } => (
            Vec2::new(center.x - radius, center.y - radius),
            Vec2::new(center.x + radius, center.y + radius),
        ),
    };
    let nx = ((hi.x - lo.x) / h).ceil().max(1.0) as usize;
    let ny = ((hi.y - lo.y) / h).ceil().max(1.0) as usize;
    let hx = (hi.x - lo.x) / nx as f64;
    let hy = (hi.y - lo.y) / ny as f64;
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let p = Vec2::new(lo.x + (i as f64 + 0.5) * hx, lo.y + (j as f64 + 0.5) * hy);
            if window.contains(p) {
                pts.push(p);
            }
        }
    }
    (pts, hx * hy)
}

fn window_clear_of_mesh(window: &Window, mesh: &BoundaryMesh) -> bool {
    // Sample each panel densely; the window must stay strictly clear.
    for panel in mesh.panels() {
        for s in 0..=8 {
            let t = s as f64 / 8.0;
            let p = panel.a + t * (panel.b - panel.a);
            if window.contains(p) {
                return false;
            }
        }
    }
    true
}

/// `H^1`-seminorm of `u_A - u_B` over a compactly interior window, by tensor
/// midpoint quadrature of the exact gradients at pitch `h`. With `sol_b`
/// omitted, returns the seminorm of `sol_a` alone.
pub fn window_seminorm(
    sol_a: &TransmissionSolution,
    sol_b: Option<&TransmissionSolution>,
    window: &Window,
    h: f64,
) -> Result<f64> {
    if !window_clear_of_mesh(window, &sol_a.mesh)
        || sol_b.is_some_and(|s| !window_clear_of_mesh(window, &s.mesh))
    {
        return Err(Error::WindowTouchesBoundary);
    }
    let (pts, cell) = window_grid(window, h);
    let terms: Vec<Result<f64>> = pts
        .par_iter()
        .map(|&p| {
            let mut g = sol_a.grad(p)?;
            if let Some(b) = sol_b {
                g -= b.grad(p)?;
            }
            Ok(g.norm_squared())
        })
        .collect();
    let mut acc = 0.0;
    for t in terms {
        acc += t?;
    }
    Ok((acc * cell).sqrt())
}
