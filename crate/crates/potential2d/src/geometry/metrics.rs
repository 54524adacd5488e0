//! Set-convergence diagnostics for dyadic approximations.

use super::region::{boundary_loops, DyadicIndex, DyadicRegion};
use super::shapes::{classify_cube, CubeClass, ShapeOracle};
use super::Vec2;
use crate::{Error, Result};

/// A bounded evaluation window.
#[derive(Debug, Clone, Copy)]
pub enum Window {
    Disk { center: Vec2, radius: f64 },
    Rect { min: Vec2, max: Vec2 },
}

impl Window {
    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Window::Disk { center, radius } => (p - center).norm() <= *radius,
            Window::Rect { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
        }
    }

    fn bbox(&self) -> (Vec2, Vec2) {
        match self {
            Window::Disk { center, radius } => (
                Vec2::new(center.x - radius, center.y - radius),
                Vec2::new(center.x + radius, center.y + radius),
            ),
            Window::Rect { min, max } => (*min, *max),
        }
    }

    fn contains_box(&self, lo: Vec2, hi: Vec2) -> bool {
        match self {
            Window::Rect { min, max } => {
                lo.x >= min.x && hi.x <= max.x && lo.y >= min.y && hi.y <= max.y
            }
            Window::Disk { center, radius } => {
                let far = [
                    lo,
                    Vec2::new(hi.x, lo.y),
                    hi,
                    Vec2::new(lo.x, hi.y),
                ]
                .iter()
                .map(|c| (c - center).norm())
                .fold(0.0, f64::max);
                far <= *radius
            }
        }
    }

    fn misses_box(&self, lo: Vec2, hi: Vec2) -> bool {
        match self {
            Window::Rect { min, max } => {
                hi.x < min.x || lo.x > max.x || hi.y < min.y || lo.y > max.y
            }
            Window::Disk { center, radius } => {
                let near = Vec2::new(
                    center.x.clamp(lo.x, hi.x) - center.x,
                    center.y.clamp(lo.y, hi.y) - center.y,
                )
                .norm();
                near > *radius
            }
        }
    }
}

/// Geometric convergence measurements of a region against its target shape.
#[derive(Debug, Clone, Copy)]
pub struct SetMetrics {
    /// One-sided Hausdorff distance from the region boundary to the target
    /// boundary inside the window. This is the quantity bounded by the cube
    /// diagonal `sqrt(2) 2^-k` in the convergence proof; the opposite
    /// direction is not bounded at corners (an offset square realizes
    /// exactly `2^-k` one way and `sqrt(2) 2^-k` the other).
    pub hausdorff_boundary: f64,
    /// Area of `(Omega \ region)` inside the window.
    pub area_symdiff: f64,
    /// All probe points lie in the interior of the cube union.
    pub compact_contained: bool,
    /// Region contains the previous-level region (true when no previous).
    pub monotone_vs_previous: bool,
}

/// Measures set convergence of `region` against `shape` on `window`.
///
/// The target boundary is evaluated through the oracle's exact distance
/// function (sampled prefractal for the Koch limit, pitch `<= 2^-(k+3)`);
/// the region boundary is sampled at the same pitch.
pub fn set_convergence_metrics(
    region: &DyadicRegion,
    shape: &ShapeOracle,
    window: Window,
    compact_probe: &[Vec2],
    previous: Option<&DyadicRegion>,
) -> Result<SetMetrics> {
    let k = region.level;
    let h = (2.0f64).powi(-(k as i32));

    if !region.cubes().any(|c| !window.misses_box(c.min(), c.max())) {
        return Err(Error::WindowEmpty);
    }

    let pitch = (2.0f64).powi(-(k as i32 + 3));

    // One-sided Hausdorff: sup over sampled region-boundary points in the
    // window of the distance to the target boundary.
    let mut hausdorff: f64 = 0.0;
    for lp in boundary_loops(region, false) {
        let pts = lp.points();
        let n = pts.len();
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let steps = ((b - a).norm() / pitch).ceil().max(1.0) as usize;
            for s in 0..=steps {
                let p = a + (b - a) * (s as f64 / steps as f64);
                if window.contains(p) {
                    hausdorff = hausdorff.max(shape.distance_to_boundary(p, pitch));
                }
            }
        }
    }

    // Area of (Omega \ region) inside the window. When the window contains
    // the whole shape the deficit is exact (the region is a subset of the
    // shape); otherwise level-k cubes not in the region are measured with
    // Crossing cubes subdivided to depth k+4.
    let (blo, bhi) = shape.bbox();
    let (wlo, whi) = window.bbox();
    let lo = blo.sup(&wlo);
    let hi = bhi.inf(&whi);
    let max_depth = k + 4;
    let mut area = 0.0;
    if window.contains_box(blo, bhi) {
        area = (shape.exact_area() - region.area()).max(0.0);
    } else if lo.x < hi.x && lo.y < hi.y {
        let ix0 = (lo.x / h).floor() as i64;
        let ix1 = (hi.x / h).ceil() as i64;
        let iy0 = (lo.y / h).floor() as i64;
        let iy1 = (hi.y / h).ceil() as i64;
        for iy in iy0..iy1 {
            for ix in ix0..ix1 {
                if region.contains_cube(ix, iy) {
                    continue;
                }
                area += cell_area_inside(shape, &window, DyadicIndex::new(k, ix, iy), max_depth);
            }
        }
    }

    let compact_contained = compact_probe.iter().all(|&p| region.interior_contains(p));
    let monotone_vs_previous = previous.map_or(true, |prev| prev.is_subset_of(region));

    Ok(SetMetrics {
        hausdorff_boundary: hausdorff,
        area_symdiff: area,
        compact_contained,
        monotone_vs_previous,
    })
}

/// Area of `Omega ∩ cube ∩ window` by recursive subdivision.
fn cell_area_inside(shape: &ShapeOracle, window: &Window, idx: DyadicIndex, max_depth: u32) -> f64 {
    let lo = idx.min();
    let hi = idx.max();
    if window.misses_box(lo, hi) {
        return 0.0;
    }
    let class = classify_cube(shape, idx);
    if class == CubeClass::Outside {
        return 0.0;
    }
    let full = window.contains_box(lo, hi);
    if class == CubeClass::Inside && full {
        let s = idx.side();
        return s * s;
    }
    if idx.level >= max_depth {
        // Midpoint rule at the resolution floor.
        let c = idx.center();
        let s = idx.side();
        return if shape.contains_point(c) && window.contains(c) {
            s * s
        } else {
            0.0
        };
    }
    idx.children()
        .iter()
        .map(|ch| cell_area_inside(shape, window, *ch, max_depth))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::region::dyadic_approximation;

    fn unit_square() -> ShapeOracle {
        ShapeOracle::OpenRectangle {
            min: Vec2::new(0.0, 0.0),
            max: Vec2::new(1.0, 1.0),
        }
    }

    fn big_window() -> Window {
        Window::Rect {
            min: Vec2::new(-1.0, -1.0),
            max: Vec2::new(2.0, 2.0),
        }
    }

    #[test]
    fn offset_square_hausdorff() {
        let region = dyadic_approximation(&unit_square(), DyadicIndex::new(2, 1, 1), 3).unwrap();
        let m = set_convergence_metrics(&region, &unit_square(), big_window(), &[], None).unwrap();
        assert!((m.hausdorff_boundary - 0.125).abs() < 1e-14);
        assert!(m.hausdorff_boundary <= 2.0f64.sqrt() * 0.125);
    }

    #[test]
    fn region_against_itself_is_exact() {
        let region = dyadic_approximation(&unit_square(), DyadicIndex::new(2, 1, 1), 4).unwrap();
        let shape = ShapeOracle::Region(Box::new(region.clone()));
        let m = set_convergence_metrics(&region, &shape, big_window(), &[], None).unwrap();
        assert_eq!(m.hausdorff_boundary, 0.0);
        assert!(m.area_symdiff < 1e-12);
    }

    #[test]
    fn square_symdiff_area() {
        // (0,1)^2 minus the level-3 region [1/8, 7/8]^2: area 1 - (3/4)^2.
        let region = dyadic_approximation(&unit_square(), DyadicIndex::new(2, 1, 1), 3).unwrap();
        let m = set_convergence_metrics(&region, &unit_square(), big_window(), &[], None).unwrap();
        let exact = 1.0 - 0.5625;
        assert!((m.area_symdiff - exact).abs() < 0.02 * exact);
    }

    #[test]
    fn probe_points_and_monotonicity() {
        let r3 = dyadic_approximation(&unit_square(), DyadicIndex::new(2, 1, 1), 3).unwrap();
        let r4 = dyadic_approximation(&unit_square(), DyadicIndex::new(2, 1, 1), 4).unwrap();
        let probes = [Vec2::new(0.5, 0.5), Vec2::new(0.2, 0.8)];
        let m = set_convergence_metrics(&r4, &unit_square(), big_window(), &probes, Some(&r3))
            .unwrap();
        assert!(m.compact_contained);
        assert!(m.monotone_vs_previous);
        // A point outside the level-3 region interior.
        let m3 =
            set_convergence_metrics(&r3, &unit_square(), big_window(), &[Vec2::new(0.01, 0.01)], None)
                .unwrap();
        assert!(!m3.compact_contained);
    }

    #[test]
    fn window_disjoint_from_region_errors() {
        let region = dyadic_approximation(&unit_square(), DyadicIndex::new(2, 1, 1), 3).unwrap();
        let w = Window::Rect {
            min: Vec2::new(5.0, 5.0),
            max: Vec2::new(6.0, 6.0),
        };
        assert!(matches!(
            set_convergence_metrics(&region, &unit_square(), w, &[], None),
            Err(Error::WindowEmpty)
        ));
    }
}
