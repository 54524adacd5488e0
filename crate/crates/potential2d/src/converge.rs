//! Level-sweep harness: rebuilds the dyadic approximation, boundary mesh and
//! operator calculus at each level and records convergence diagnostics —
//! geometry metrics, contraction constants, extension norms, Calderón
//! residuals, Neumann remainder bounds, and successive `H^1` window
//! differences of the layer potentials (the fields live on all of the plane,
//! so consecutive levels are compared on fixed compact windows with no
//! cross-mesh interpolation).

use crate::cauchy::{generalized_cauchy, holomorphy_residual, ComplexTrace, HolomorphyMode};
use crate::fields::RefField;
use crate::geometry::{
    dyadic_approximation, set_convergence_metrics, DyadicIndex, DyadicRegion, ShapeOracle, Vec2,
    Window,
};
use crate::mesh::{BoundaryMesh, DensityFn, TraceFn};
use crate::operators::OperatorSet;
use crate::transmission::{solve_transmission, window_seminorm, TransmissionSolution};
use crate::{Error, Result};

/// Configuration of one dyadic level sweep.
#[derive(Debug)]
pub struct SweepConfig {
    pub shape: ShapeOracle,
    pub root: DyadicIndex,
    pub k_min: u32,
    pub k_max: u32,
    /// Analytic field sampled as trace data at every level.
    pub trace_field: RefField,
    /// Analytic field whose normal derivative is the density data.
    pub density_field: RefField,
    /// Window compactly inside the target set.
    pub interior_window: Window,
    /// Window compactly outside the closed target set.
    pub exterior_window: Window,
    /// Window quadrature pitch.
    pub pitch: f64,
    /// Neumann series length for the remainder-bound column.
    pub terms: usize,
}

/// Per-level diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct LevelRow {
    pub level: u32,
    pub n_panels: usize,
    pub hausdorff: f64,
    pub area_symdiff: f64,
    pub monotone: bool,
    pub c_plus: f64,
    pub c_minus: f64,
    pub lower_plus: f64,
    pub lower_minus: f64,
    pub ext_norm_int: f64,
    pub ext_norm_ext: f64,
    pub calderon_residual: f64,
    /// `c^{L+1}/(1-c)` with `c = max(c_plus, c_minus)`.
    pub neumann_remainder_bound: f64,
}

/// Sweep output: one row per level plus successive window `H^1` differences
/// of the double-layer and single-layer parts (entry `i` compares levels
/// `k_min + i` and `k_min + i + 1`, interior and exterior windows summed).
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<LevelRow>,
    pub d_diffs: Vec<f64>,
    pub s_diffs: Vec<f64>,
}

/// Representative points of a window (5x5 bounding-box grid filtered to the
/// window).
fn window_probes(window: &Window) -> Vec<Vec2> {
    let (lo, hi) = match window {
        Window::Rect { min, max } => (*min, *max),
        Window::Disk { center, radius } => (
            Vec2::new(center.x - radius, center.y - radius),
            Vec2::new(center.x + radius, center.y + radius),
        ),
    };
    let mut pts = Vec::new();
    for j in 0..5 {
        for i in 0..5 {
            let p = Vec2::new(
                lo.x + (i as f64 + 0.5) * (hi.x - lo.x) / 5.0,
                lo.y + (j as f64 + 0.5) * (hi.y - lo.y) / 5.0,
            );
            if window.contains(p) {
                pts.push(p);
            }
        }
    }
    pts
}

fn check_windows(cfg: &SweepConfig, region: &DyadicRegion) -> Result<()> {
    for p in window_probes(&cfg.interior_window) {
        if !region.interior_contains(p) {
            return Err(Error::WindowViolation);
        }
    }
    for p in window_probes(&cfg.exterior_window) {
        if region.interior_contains(p) {
            return Err(Error::WindowViolation);
        }
    }
    Ok(())
}

struct LevelState {
    region: DyadicRegion,
    mesh: BoundaryMesh,
    d_sol: TransmissionSolution,
    s_sol: TransmissionSolution,
}

fn build_level(cfg: &SweepConfig, k: u32) -> Result<(LevelState, OperatorSet)> {
    let region = dyadic_approximation(&cfg.shape, cfg.root, k)?;
    // Keep the raw level-k panels (no collinear merging): the sweep studies
    // the sequence of dyadic boundaries at their native resolution.
    let mesh = BoundaryMesh::from_region(&region, false)?;
    let f = cfg.trace_field.trace(&mesh)?;
    let g = cfg.density_field.normal_density(&mesh)?;
    let zeros_f = TraceFn {
        values: vec![0.0; mesh.n_vertices()],
    };
    let zeros_g = DensityFn::zeros(&mesh);
    let d_sol = solve_transmission(&mesh, &f, &zeros_g)?;
    let s_sol = solve_transmission(&mesh, &zeros_f, &g)?;
    let ops = OperatorSet::assemble(mesh.clone())?;
    Ok((
        LevelState {
            region,
            mesh,
            d_sol,
            s_sol,
        },
        ops,
    ))
}

fn both_windows_seminorm(
    a: &TransmissionSolution,
    b: &TransmissionSolution,
    cfg: &SweepConfig,
) -> Result<f64> {
    let i = window_seminorm(a, Some(b), &cfg.interior_window, cfg.pitch)?;
    let e = window_seminorm(a, Some(b), &cfg.exterior_window, cfg.pitch)?;
    Ok(i + e)
}

/// Runs the sweep over levels `k_min..=k_max`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.k_min > cfg.k_max {
        return Err(Error::Config("empty level range".into()));
    }
    let probes = window_probes(&cfg.interior_window);
    let mut rows = Vec::new();
    let mut d_diffs = Vec::new();
    let mut s_diffs = Vec::new();
    let mut previous: Option<LevelState> = None;

    for k in cfg.k_min..=cfg.k_max {
        let (state, ops) = build_level(cfg, k)?;
        check_windows(cfg, &state.region)?;

        let (blo, bhi) = cfg.shape.bbox();
        let margin = 2.0f64.powi(-(cfg.k_min as i32));
        let metric_window = Window::Rect {
            min: blo - Vec2::new(margin, margin),
            max: bhi + Vec2::new(margin, margin),
        };
        let metrics = set_convergence_metrics(
            &state.region,
            &cfg.shape,
            metric_window,
            &probes,
            previous.as_ref().map(|s| &s.region),
        )?;

        let con = ops.contraction();
        let (ei, ee) = ops.extension_norms()?;
        let c = con.c_plus.max(con.c_minus);
        if c >= 1.0 {
            return Err(Error::NotContractive(c));
        }
        let remainder = c.powi(cfg.terms as i32 + 1) / (1.0 - c);

        if let Some(prev) = &previous {
            d_diffs.push(both_windows_seminorm(&state.d_sol, &prev.d_sol, cfg)?);
            s_diffs.push(both_windows_seminorm(&state.s_sol, &prev.s_sol, cfg)?);
        }

        rows.push(LevelRow {
            level: k,
            n_panels: state.mesh.n_panels(),
            hausdorff: metrics.hausdorff_boundary,
            area_symdiff: metrics.area_symdiff,
            monotone: metrics.monotone_vs_previous,
            c_plus: con.c_plus,
            c_minus: con.c_minus,
            lower_plus: con.lower_plus,
            lower_minus: con.lower_minus,
            ext_norm_int: ei,
            ext_norm_ext: ee,
            calderon_residual: ops.calderon_residual(),
            neumann_remainder_bound: remainder,
        });
        previous = Some(state);
    }
    Ok(SweepReport {
        rows,
        d_diffs,
        s_diffs,
    })
}

/// Per-level Cauchy diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct CauchyRow {
    pub level: u32,
    pub n_panels: usize,
    /// Max Cauchy-Riemann defect of the decomposition on the window probes.
    pub holomorphy: f64,
    /// Max deviation between the decomposition and the direct integral on
    /// the window probes (mean-aligned, the trace space is modulo
    /// constants).
    pub dec_vs_direct: f64,
}

/// Cauchy sweep output: rows plus successive `H^1` window differences of the
/// imaginary (single-layer) part of the decomposition.
#[derive(Debug, Clone)]
pub struct CauchySweepReport {
    pub rows: Vec<CauchyRow>,
    pub im_diffs: Vec<f64>,
}

/// Sweeps the generalized Cauchy integral of `trace_field + i trace_im` over
/// the same levels as [`run_sweep`].
pub fn cauchy_sweep(cfg: &SweepConfig, trace_im: Option<RefField>) -> Result<CauchySweepReport> {
    let mut probes: Vec<num_complex::Complex64> = window_probes(&cfg.interior_window)
        .into_iter()
        .chain(window_probes(&cfg.exterior_window))
        .map(|p| num_complex::Complex64::new(p.x, p.y))
        .collect();
    probes.dedup();

    let mut rows = Vec::new();
    let mut im_diffs = Vec::new();
    let mut prev_im: Option<TransmissionSolution> = None;

    for k in cfg.k_min..=cfg.k_max {
        let region = dyadic_approximation(&cfg.shape, cfg.root, k)?;
        check_windows(cfg, &region)?;
        let mesh = BoundaryMesh::from_region(&region, false)?;
        let ops = OperatorSet::assemble(mesh.clone())?;
        let data = ComplexTrace {
            re: cfg.trace_field.trace(&mesh)?,
            im: match trace_im {
                Some(f) => f.trace(&mesh)?,
                None => TraceFn {
                    values: vec![0.0; mesh.n_vertices()],
                },
            },
        };
        let field = generalized_cauchy(&ops, &data)?;

        let holo = holomorphy_residual(&field, &probes, HolomorphyMode::Decomposition)?;
        let mut diffs = Vec::with_capacity(probes.len());
        for &z in &probes {
            diffs.push(field.eval_direct(z, false)? - field.eval_decomposition(z)?);
        }
        let mean = diffs.iter().sum::<num_complex::Complex64>() / diffs.len() as f64;
        let dec_vs_direct = diffs.iter().fold(0.0f64, |a, d| a.max((d - mean).norm()));

        let im_sol = field.im_solution().expect("decomposition field").clone();
        if let Some(prev) = &prev_im {
            im_diffs.push(both_windows_seminorm(&im_sol, prev, cfg)?);
        }
        rows.push(CauchyRow {
            level: k,
            n_panels: mesh.n_panels(),
            holomorphy: holo,
            dec_vs_direct,
        });
        prev_im = Some(im_sol);
    }
    Ok(CauchySweepReport { rows, im_diffs })
}

/// CSV header and rows of a sweep report (diff columns hold the comparison
/// against the previous level; the first row carries zeros).
pub fn sweep_csv(report: &SweepReport) -> (Vec<&'static str>, Vec<Vec<crate::io::Cell>>) {
    let header = vec![
        "level",
        "n_panels",
        "hausdorff",
        "area_symdiff",
        "monotone",
        "c_plus",
        "c_minus",
        "lower_plus",
        "lower_minus",
        "ext_norm_int",
        "ext_norm_ext",
        "calderon_residual",
        "neumann_remainder_bound",
        "d_part_h1_diff",
        "s_part_h1_diff",
    ];
    let rows = report
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (dd, sd) = if i == 0 {
                (0.0, 0.0)
            } else {
                (report.d_diffs[i - 1], report.s_diffs[i - 1])
            };
            vec![
                (r.level as i64).into(),
                r.n_panels.into(),
                r.hausdorff.into(),
                r.area_symdiff.into(),
                (r.monotone as i64).into(),
                r.c_plus.into(),
                r.c_minus.into(),
                r.lower_plus.into(),
                r.lower_minus.into(),
                r.ext_norm_int.into(),
                r.ext_norm_ext.into(),
                r.calderon_residual.into(),
                r.neumann_remainder_bound.into(),
                dd.into(),
                sd.into(),
            ]
        })
        .collect();
    (header, rows)
}

/// CSV header and rows of a Cauchy sweep report.
pub fn cauchy_csv(report: &CauchySweepReport) -> (Vec<&'static str>, Vec<Vec<crate::io::Cell>>) {
    let header = vec![
        "level",
        "n_panels",
        "holomorphy_residual",
        "dec_vs_direct",
        "im_part_h1_diff",
    ];
    let rows = report
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let d = if i == 0 { 0.0 } else { report.im_diffs[i - 1] };
            vec![
                (r.level as i64).into(),
                r.n_panels.into(),
                r.holomorphy.into(),
                r.dec_vs_direct.into(),
                d.into(),
            ]
        })
        .collect();
    (header, rows)
}
