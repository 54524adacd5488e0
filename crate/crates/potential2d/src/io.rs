//! File emission: CSV tables (lossless float formatting), region JSON,
//! SVG rasters of dyadic regions, and PPM heatmaps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::geometry::DyadicRegion;
use crate::Result;

/// Formats a float with 17 significant digits ('.' decimal separator), which
/// round-trips any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell: either a count-like integer or a measured float.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// Writes a CSV table with a mandatory header row.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(v) => fmt_f64(*v),
            })
            .collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RegionJson {
    level: u32,
    cubes: Vec<(i64, i64)>,
}

/// Dumps a dyadic region as JSON (`level` plus the sorted cube index list).
pub fn write_region_json(path: &Path, region: &DyadicRegion) -> Result<()> {
    let doc = RegionJson {
        level: region.level(),
        cubes: region.cubes().map(|c| (c.ix, c.iy)).collect(),
    };
    let out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(out, &doc).map_err(std::io::Error::other)?;
    Ok(())
}

/// Renders the cubes of a region as an SVG rectangle raster.
pub fn write_region_svg(path: &Path, region: &DyadicRegion) -> Result<()> {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in region.cubes() {
        let (mn, mx) = (c.min(), c.max());
        lo = (lo.0.min(mn.x), lo.1.min(mn.y));
        hi = (hi.0.max(mx.x), hi.1.max(mx.y));
    }
    let side = (2.0f64).powi(-(region.level() as i32));
    let scale = 1024.0 / (hi.0 - lo.0).max(hi.1 - lo.1).max(side);
    let w = (hi.0 - lo.0) * scale;
    let h = (hi.1 - lo.1) * scale;
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">"
    )?;
    // SVG y-axis points down: flip vertically.
    for c in region.cubes() {
        let mn = c.min();
        let x = (mn.x - lo.0) * scale;
        let y = (hi.1 - mn.y - side) * scale;
        let s = side * scale;
        writeln!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{s:.2}\" height=\"{s:.2}\" fill=\"#4477aa\" stroke=\"#123\" stroke-width=\"0.3\"/>"
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}

/// Writes a grayscale binary PPM (P5) heatmap of `values` laid out row-major
/// `width x height`, linearly mapped from min to max.
pub fn write_ppm_heatmap(path: &Path, width: usize, height: usize, values: &[f64]) -> Result<()> {
    assert_eq!(values.len(), width * height);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{width} {height}\n255\n")?;
    let bytes: Vec<u8> = values
        .iter()
        .map(|&v| {
            if v.is_finite() {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    out.write_all(&bytes)?;
    Ok(())
}
