use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use potential2d::cauchy::{CauchyField, ComplexTrace, HolomorphyMode};
use potential2d::config::JobConfig;
use potential2d::converge::{cauchy_csv, cauchy_sweep, run_sweep, sweep_csv, SweepConfig};
use potential2d::fields::RefField;
use potential2d::geometry::{dyadic_approximation, set_convergence_metrics, Vec2, Window};
use potential2d::io::{write_csv, write_ppm_heatmap, write_region_json, write_region_svg, Cell};
use potential2d::mesh::{BoundaryMesh, DensityFn, TraceFn};
use potential2d::operators::OperatorSet;
use potential2d::transmission::{jump_check, solve_transmission, JUMP_SCHEDULE};
use potential2d::{Error, Result};

/// Batch driver for the dyadic potential-theory pipelines.
#[derive(Parser)]
#[command(name = "potential2d", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Job configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Also emit SVG rasters where applicable.
    #[arg(long, global = true)]
    svg: bool,
    /// Also emit PPM heatmaps where applicable.
    #[arg(long, global = true)]
    ppm: bool,
    /// Worker-pool size (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dyadic approximations and set-convergence metrics per level.
    Dyadic,
    /// Transmission solve on a grid: field values, gradients and jumps.
    Solve,
    /// Contraction constants, extension norms and Calderón residual.
    NpSpectrum,
    /// Neumann series errors against the a-priori geometric bound.
    NeumannSeries,
    /// Direct Cauchy integral on a grid with Cauchy-Riemann defects.
    Cauchy,
    /// Full level sweep: geometry, operators and field differences.
    Converge,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // A second pool build in the same process is harmless (tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg_path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("missing --config".into()))?;
    let cfg = JobConfig::from_path(cfg_path)?;
    std::fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Dyadic => cmd_dyadic(cli, &cfg),
        Command::Solve => cmd_solve(cli, &cfg),
        Command::NpSpectrum => cmd_np_spectrum(cli, &cfg),
        Command::NeumannSeries => cmd_neumann_series(cli, &cfg),
        Command::Cauchy => cmd_cauchy(cli, &cfg),
        Command::Converge => cmd_converge(cli, &cfg),
    }
}

fn field_from(cfg_name: &Option<String>, what: &str) -> Result<RefField> {
    let name = cfg_name
        .as_ref()
        .ok_or_else(|| Error::Config(format!("missing `{what}`")))?;
    RefField::from_name(name)
}

fn boundary_data(cfg: &JobConfig, mesh: &BoundaryMesh) -> Result<(TraceFn, DensityFn)> {
    let f = match &cfg.trace {
        Some(name) => RefField::from_name(name)?.trace(mesh)?,
        None => TraceFn {
            values: vec![0.0; mesh.n_vertices()],
        },
    };
    let g = match &cfg.density {
        Some(name) => RefField::from_name(name)?.normal_density(mesh)?,
        None => DensityFn::zeros(mesh),
    };
    Ok((f, g))
}

fn cmd_dyadic(cli: &Cli, cfg: &JobConfig) -> Result<()> {
    let shape = cfg.require_shape()?;
    let root = cfg.require_root()?;
    let (k_min, k_max) = cfg.require_levels()?;
    let (blo, bhi) = shape.bbox();
    let margin = 2.0f64.powi(-(k_min as i32));
    let window = Window::Rect {
        min: blo - Vec2::new(margin, margin),
        max: bhi + Vec2::new(margin, margin),
    };
    let probe = [root.center()];

    let mut rows = Vec::new();
    let mut previous = None;
    for k in k_min..=k_max {
        let region = dyadic_approximation(&shape, root, k)?;
        let metrics =
            set_convergence_metrics(&region, &shape, window.clone(), &probe, previous.as_ref())?;
        write_region_json(&cli.out.join(format!("region_k{k}.json")), &region)?;
        if cli.svg {
            write_region_svg(&cli.out.join(format!("region_k{k}.svg")), &region)?;
        }
        rows.push(vec![
            (k as i64).into(),
            region.len().into(),
            metrics.hausdorff_boundary.into(),
            metrics.area_symdiff.into(),
            (metrics.compact_contained as i64).into(),
            (metrics.monotone_vs_previous as i64).into(),
        ]);
        previous = Some(region);
    }
    write_csv(
        &cli.out.join("dyadic_metrics.csv"),
        &[
            "level",
            "cubes",
            "hausdorff",
            "area_symdiff",
            "compact_contained",
            "monotone",
        ],
        &rows,
    )
}

fn cmd_solve(cli: &Cli, cfg: &JobConfig) -> Result<()> {
    let mesh = cfg.require_mesh()?;
    let (f, g) = boundary_data(cfg, &mesh)?;
    let sol = solve_transmission(&mesh, &f, &g)?;

    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| Error::Config("missing `grid`".into()))?;
    let points = grid.points();
    let mut rows = Vec::new();
    let mut heat = Vec::with_capacity(points.len());
    for &p in &points {
        match (sol.eval(p), sol.grad(p)) {
            (Ok(u), Ok(du)) => {
                rows.push(vec![
                    p.x.into(),
                    p.y.into(),
                    u.into(),
                    du.x.into(),
                    du.y.into(),
                ]);
                heat.push(u);
            }
            // Grid points swallowed by the boundary are skipped.
            _ => heat.push(f64::NAN),
        }
    }
    write_csv(
        &cli.out.join("field.csv"),
        &["x", "y", "u", "ux", "uy"],
        &rows,
    )?;
    if cli.ppm {
        write_ppm_heatmap(&cli.out.join("field.ppm"), grid.n, grid.n, &heat)?;
    }

    let rep = jump_check(&sol, &JUMP_SCHEDULE)?;
    let jump_rows: Vec<Vec<Cell>> = mesh
        .panels()
        .enumerate()
        .map(|(p, panel)| {
            let m = panel.midpoint();
            vec![
                p.into(),
                m.x.into(),
                m.y.into(),
                rep.trace_jumps[p].into(),
                rep.flux_jumps[p].into(),
            ]
        })
        .collect();
    write_csv(
        &cli.out.join("jumps.csv"),
        &["panel", "x", "y", "trace_jump", "flux_jump"],
        &jump_rows,
    )
}

fn cmd_np_spectrum(cli: &Cli, cfg: &JobConfig) -> Result<()> {
    let mesh = cfg.require_mesh()?;
    let ops = OperatorSet::assemble(mesh)?;
    let con = ops.contraction();
    let (ei, ee) = ops.extension_norms()?;
    let row = vec![
        ops.mesh().n_panels().into(),
        ops.n_visible().into(),
        con.c_plus.into(),
        con.c_minus.into(),
        con.lower_plus.into(),
        con.lower_minus.into(),
        ei.into(),
        ee.into(),
        ops.calderon_residual().into(),
    ];
    write_csv(
        &cli.out.join("np_spectrum.csv"),
        &[
            "n_panels",
            "n_visible",
            "c_plus",
            "c_minus",
            "lower_plus",
            "lower_minus",
            "ext_norm_int",
            "ext_norm_ext",
            "calderon_residual",
        ],
        &[row],
    )
}

fn cmd_neumann_series(cli: &Cli, cfg: &JobConfig) -> Result<()> {
    let mesh = cfg.require_mesh()?;
    let f = field_from(&cfg.trace, "trace")?.trace(&mesh)?;
    let ops = OperatorSet::assemble(mesh)?;
    let rep = ops.neumann_series(&f, cfg.sign_plus, cfg.terms)?;
    let rows: Vec<Vec<Cell>> = rep
        .errors
        .iter()
        .zip(&rep.bounds)
        .enumerate()
        .map(|(l, (e, b))| vec![l.into(), (*e).into(), (*b).into(), rep.c.into()])
        .collect();
    write_csv(
        &cli.out.join("neumann_series.csv"),
        &["terms", "error", "bound", "c"],
        &rows,
    )
}

fn cmd_cauchy(cli: &Cli, cfg: &JobConfig) -> Result<()> {
    let mesh = cfg.require_mesh()?;
    let data = ComplexTrace {
        re: field_from(&cfg.trace, "trace")?.trace(&mesh)?,
        im: match &cfg.trace_im {
            Some(name) => RefField::from_name(name)?.trace(&mesh)?,
            None => TraceFn {
                values: vec![0.0; mesh.n_vertices()],
            },
        },
    };
    let field = CauchyField::direct(&mesh, &data);
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| Error::Config("missing `grid`".into()))?;
    let mut rows = Vec::new();
    for p in grid.points() {
        let z = Complex64::new(p.x, p.y);
        let (value, defect) = match (
            field.eval_direct(z, false),
            field.cauchy_riemann_defect(z, HolomorphyMode::Direct),
        ) {
            (Ok(v), Ok(d)) => (v, d),
            _ => continue,
        };
        rows.push(vec![
            p.x.into(),
            p.y.into(),
            value.re.into(),
            value.im.into(),
            defect.into(),
        ]);
    }
    write_csv(
        &cli.out.join("cauchy.csv"),
        &["x", "y", "re_phi", "im_phi", "cr_residual"],
        &rows,
    )
}

fn sweep_config(cfg: &JobConfig) -> Result<SweepConfig> {
    let (k_min, k_max) = cfg.require_levels()?;
    Ok(SweepConfig {
        shape: cfg.require_shape()?,
        root: cfg.require_root()?,
        k_min,
        k_max,
        trace_field: field_from(&cfg.trace, "trace")?,
        density_field: field_from(&cfg.density, "density")?,
        interior_window: cfg
            .interior_window
            .as_ref()
            .ok_or_else(|| Error::Config("missing `interior_window`".into()))?
            .window(),
        exterior_window: cfg
            .exterior_window
            .as_ref()
            .ok_or_else(|| Error::Config("missing `exterior_window`".into()))?
            .window(),
        pitch: cfg.pitch,
        terms: cfg.terms,
    })
}

fn cmd_converge(cli: &Cli, cfg: &JobConfig) -> Result<()> {
    let sweep_cfg = sweep_config(cfg)?;
    let report = run_sweep(&sweep_cfg)?;
    let (header, rows) = sweep_csv(&report);
    write_csv(&cli.out.join("converge.csv"), &header, &rows)?;

    let trace_im = match &cfg.trace_im {
        Some(name) => Some(RefField::from_name(name)?),
        None => None,
    };
    let cauchy_report = cauchy_sweep(&sweep_cfg, trace_im)?;
    let (header, rows) = cauchy_csv(&cauchy_report);
    write_csv(&cli.out.join("cauchy_converge.csv"), &header, &rows)
}
