//! Polygonal boundary meshes and the discrete trace/density spaces on them.
//!
//! A mesh is a set of closed vertex loops; panel `p` joins vertex `p` to the
//! next vertex of its loop. Discrete traces are continuous piecewise-linear
//! nodal functions, densities are piecewise-constant panel functions; both
//! carry a gauge (length-weighted zero mean for traces, zero total integral
//! for densities) matching the quotient spaces they discretize.

use crate::geometry::{BoundaryLoop, DyadicRegion, Vec2};
use crate::{Error, Result};

/// One oriented straight panel of a boundary mesh.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: Vec2,
    pub b: Vec2,
    /// Vertex indices of the endpoints in the owning mesh.
    pub ia: usize,
    pub ib: usize,
}

impl Panel {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn midpoint(&self) -> Vec2 {
        (self.a + self.b) * 0.5
    }

    /// Unit tangent in traversal direction.
    pub fn tangent(&self) -> Vec2 {
        (self.b - self.a) / self.length()
    }

    /// Unit normal pointing away from the enclosed region. Loops keep the
    /// region on the left, so the outward normal is the right-hand rotation
    /// of the tangent.
    pub fn normal(&self) -> Vec2 {
        let t = self.tangent();
        Vec2::new(t.y, -t.x)
    }
}

/// A closed polygonal boundary mesh (one or more loops).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    vertices: Vec<Vec2>,
    /// Start offsets of each loop into `vertices`, plus a final sentinel.
    loop_starts: Vec<usize>,
}

impl BoundaryMesh {
    /// Builds a mesh from explicit vertex loops (each traversed with the
    /// region on the left, closing implicitly).
    pub fn from_vertex_loops(loops: Vec<Vec<Vec2>>) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut loop_starts = Vec::with_capacity(loops.len() + 1);
        for lp in loops {
            if lp.len() < 3 {
                return Err(Error::DegeneratePanel);
            }
            loop_starts.push(vertices.len());
            vertices.extend(lp);
        }
        loop_starts.push(vertices.len());
        let mesh = Self {
            vertices,
            loop_starts,
        };
        for p in 0..mesh.n_panels() {
            if mesh.panel(p).length() < 1e-300 {
                return Err(Error::DegeneratePanel);
            }
        }
        Ok(mesh)
    }

    /// Mesh of the oriented boundary loops of a dyadic region.
    pub fn from_loops(loops: &[BoundaryLoop]) -> Result<Self> {
        Self::from_vertex_loops(loops.iter().map(|l| l.points()).collect())
    }

    /// Mesh of a dyadic region's boundary with collinear edges merged.
    pub fn from_region(region: &DyadicRegion, merge_collinear: bool) -> Result<Self> {
        Self::from_loops(&crate::geometry::boundary_loops(region, merge_collinear))
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about the
    /// origin, counterclockwise from `(r, 0)`.
    pub fn regular_ngon(n: usize, r: f64) -> Self {
        let verts = (0..n)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                Vec2::new(r * t.cos(), r * t.sin())
            })
            .collect();
        Self::from_vertex_loops(vec![verts]).expect("regular polygon is non-degenerate")
    }

    /// Axis-aligned square `[min, min+side]^2` with `m` panels per side.
    pub fn square(min: Vec2, side: f64, m: usize) -> Self {
        let h = side / m as f64;
        let mut verts = Vec::with_capacity(4 * m);
        for j in 0..m {
            verts.push(Vec2::new(min.x + j as f64 * h, min.y));
        }
        for j in 0..m {
            verts.push(Vec2::new(min.x + side, min.y + j as f64 * h));
        }
        for j in 0..m {
            verts.push(Vec2::new(min.x + side - j as f64 * h, min.y + side));
        }
        for j in 0..m {
            verts.push(Vec2::new(min.x, min.y + side - j as f64 * h));
        }
        Self::from_vertex_loops(vec![verts]).expect("square mesh is non-degenerate")
    }

    /// Uniform refinement: every panel is split at its midpoint.
    pub fn refine_split(&self) -> Self {
        let mut loops = Vec::with_capacity(self.n_loops());
        for l in 0..self.n_loops() {
            let range = self.loop_range(l);
            let mut verts = Vec::with_capacity(2 * range.len());
            for p in range {
                let panel = self.panel(p);
                verts.push(panel.a);
                verts.push(panel.midpoint());
            }
            loops.push(verts);
        }
        Self::from_vertex_loops(loops).expect("refinement preserves non-degeneracy")
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// One panel per vertex: panel `p` joins vertex `p` to the next vertex
    /// of its loop.
    pub fn n_panels(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_loops(&self) -> usize {
        self.loop_starts.len() - 1
    }

    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i]
    }

    pub fn loop_range(&self, l: usize) -> std::ops::Range<usize> {
        self.loop_starts[l]..self.loop_starts[l + 1]
    }

    /// Index of the vertex following `i` on its loop.
    pub fn next_vertex(&self, i: usize) -> usize {
        let l = self.loop_of(i);
        let range = self.loop_range(l);
        if i + 1 == range.end {
            range.start
        } else {
            i + 1
        }
    }

    /// Index of the vertex preceding `i` on its loop.
    pub fn prev_vertex(&self, i: usize) -> usize {
        let l = self.loop_of(i);
        let range = self.loop_range(l);
        if i == range.start {
            range.end - 1
        } else {
            i - 1
        }
    }

    fn loop_of(&self, i: usize) -> usize {
        self.loop_starts.partition_point(|&s| s <= i) - 1
    }

    pub fn panel(&self, p: usize) -> Panel {
        let ib = self.next_vertex(p);
        Panel {
            a: self.vertices[p],
            b: self.vertices[ib],
            ia: p,
            ib,
        }
    }

    pub fn panels(&self) -> impl Iterator<Item = Panel> + '_ {
        (0..self.n_panels()).map(move |p| self.panel(p))
    }

    pub fn perimeter(&self) -> f64 {
        self.panels().map(|p| p.length()).sum()
    }

    /// Trapezoid vertex weights: half the lengths of the two incident
    /// panels. Integrating a piecewise-linear trace is the weighted sum of
    /// its nodal values.
    pub fn vertex_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_vertices()];
        for p in self.panels() {
            let half = 0.5 * p.length();
            w[p.ia] += half;
            w[p.ib] += half;
        }
        w
    }

    /// Minimum distance from a point to the mesh.
    pub fn distance(&self, x: Vec2) -> f64 {
        self.panels()
            .map(|p| {
                let d = p.b - p.a;
                let t = ((x - p.a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
                (x - (p.a + d * t)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// A continuous piecewise-linear boundary trace, stored by nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFn {
    pub values: Vec<f64>,
}

/// A piecewise-constant boundary density, stored by panel values.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFn {
    pub values: Vec<f64>,
}

impl TraceFn {
    pub fn zeros(mesh: &BoundaryMesh) -> Self {
        Self {
            values: vec![0.0; mesh.n_vertices()],
        }
    }

    /// Boundary integral of the trace.
    pub fn integral(&self, mesh: &BoundaryMesh) -> Result<f64> {
        if self.values.len() != mesh.n_vertices() {
            return Err(Error::MeshMismatch);
        }
        Ok(mesh
            .vertex_weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum())
    }

    /// Projects onto the mean-zero gauge: subtracts the length-weighted
    /// average so the boundary integral vanishes.
    pub fn gauge(&self, mesh: &BoundaryMesh) -> Result<TraceFn> {
        let mean = self.integral(mesh)? / mesh.perimeter();
        Ok(TraceFn {
            values: self.values.iter().map(|v| v - mean).collect(),
        })
    }
}

impl DensityFn {
    pub fn zeros(mesh: &BoundaryMesh) -> Self {
        Self {
            values: vec![0.0; mesh.n_panels()],
        }
    }

    /// Boundary integral of the density.
    pub fn integral(&self, mesh: &BoundaryMesh) -> Result<f64> {
        if self.values.len() != mesh.n_panels() {
            return Err(Error::MeshMismatch);
        }
        Ok(mesh
            .panels()
            .zip(&self.values)
            .map(|(p, v)| p.length() * v)
            .sum())
    }

    /// Projects onto the zero-total-integral gauge.
    pub fn gauge(&self, mesh: &BoundaryMesh) -> Result<DensityFn> {
        let mean = self.integral(mesh)? / mesh.perimeter();
        Ok(DensityFn {
            values: self.values.iter().map(|v| v - mean).collect(),
        })
    }
}

/// Samples a pointwise function at mesh vertices into a trace, rejecting
/// non-finite values.
pub fn sample_trace(mesh: &BoundaryMesh, f: impl Fn(Vec2) -> f64) -> Result<TraceFn> {
    let mut values = Vec::with_capacity(mesh.n_vertices());
    for i in 0..mesh.n_vertices() {
        let p = mesh.vertex(i);
        let v = f(p);
        if !v.is_finite() {
            return Err(Error::NonFinite(p.x, p.y));
        }
        values.push(v);
    }
    Ok(TraceFn { values })
}

/// Samples a pointwise function at panel midpoints into a density.
pub fn sample_density(mesh: &BoundaryMesh, f: impl Fn(Vec2) -> f64) -> Result<DensityFn> {
    let mut values = Vec::with_capacity(mesh.n_panels());
    for p in mesh.panels() {
        let m = p.midpoint();
        let v = f(m);
        if !v.is_finite() {
            return Err(Error::NonFinite(m.x, m.y));
        }
        values.push(v);
    }
    Ok(DensityFn { values })
}

/// Duality pairing `<g, f> = ∫ g f ds` of a density against a trace,
/// exact for piecewise-constant times piecewise-linear integrands.
pub fn pair(mesh: &BoundaryMesh, g: &DensityFn, f: &TraceFn) -> Result<f64> {
    if g.values.len() != mesh.n_panels() || f.values.len() != mesh.n_vertices() {
        return Err(Error::MeshMismatch);
    }
    Ok(mesh
        .panels()
        .zip(&g.values)
        .map(|(p, gp)| gp * 0.5 * (f.values[p.ia] + f.values[p.ib]) * p.length())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn ngon_geometry() {
        let mesh = BoundaryMesh::regular_ngon(64, 1.0);
        assert_eq!(mesh.n_panels(), 64);
        // Perimeter of the inscribed 64-gon.
        let exact = 2.0 * 64.0 * (std::f64::consts::PI / 64.0).sin();
        assert_relative_eq!(mesh.perimeter(), exact, max_relative = 1e-14);
        // Outward normals point away from the origin.
        for p in mesh.panels() {
            assert!(p.normal().dot(&p.midpoint()) > 0.0);
        }
    }

    #[test]
    fn square_mesh_geometry() {
        let mesh = BoundaryMesh::square(Vec2::new(0.0, 0.0), 1.0, 4);
        assert_eq!(mesh.n_panels(), 16);
        assert_relative_eq!(mesh.perimeter(), 4.0, max_relative = 1e-15);
        for p in mesh.panels() {
            assert!(p.normal().dot(&(p.midpoint() - Vec2::new(0.5, 0.5))) > 0.0);
        }
    }

    #[test]
    fn refine_split_doubles_panels() {
        let mesh = BoundaryMesh::regular_ngon(8, 1.0);
        let fine = mesh.refine_split();
        assert_eq!(fine.n_panels(), 16);
        assert_relative_eq!(fine.perimeter(), mesh.perimeter(), max_relative = 1e-15);
    }

    #[test]
    fn hole_loop_normals_point_into_hole() {
        // Annulus-like mesh: CCW outer square, CW inner square (region on
        // the left of both traversals).
        let outer = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(3.0, 3.0),
            Vec2::new(0.0, 3.0),
        ];
        let inner = vec![
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 2.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(2.0, 1.0),
        ];
        let mesh = BoundaryMesh::from_vertex_loops(vec![outer, inner]).unwrap();
        assert_eq!(mesh.n_loops(), 2);
        let hole_center = Vec2::new(1.5, 1.5);
        for p in mesh.loop_range(1).map(|i| mesh.panel(i)) {
            assert!(p.normal().dot(&(hole_center - p.midpoint())) > 0.0);
        }
    }

    #[test]
    fn gauge_zeroes_integral_and_is_idempotent() {
        let mesh = BoundaryMesh::regular_ngon(32, 1.0);
        let f = sample_trace(&mesh, |p| p.x * p.x + 0.3).unwrap();
        let g = f.gauge(&mesh).unwrap();
        assert!(g.integral(&mesh).unwrap().abs() < 1e-14);
        let gg = g.gauge(&mesh).unwrap();
        for (a, b) in g.values.iter().zip(&gg.values) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
        let d = sample_density(&mesh, |p| p.y.abs()).unwrap();
        let dg = d.gauge(&mesh).unwrap();
        assert!(dg.integral(&mesh).unwrap().abs() < 1e-14);
    }

    #[test]
    fn pairing_integrates_products() {
        // Constant density against the trace of x on the unit square.
        let mesh = BoundaryMesh::square(Vec2::new(0.0, 0.0), 1.0, 8);
        let g = sample_density(&mesh, |_| 1.0).unwrap();
        let f = sample_trace(&mesh, |p| p.x).unwrap();
        // ∫ x ds over the unit square boundary = 2.
        assert_relative_eq!(pair(&mesh, &g, &f).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let mesh = BoundaryMesh::regular_ngon(8, 1.0);
        let other = BoundaryMesh::regular_ngon(16, 1.0);
        let f = sample_trace(&other, |p| p.x).unwrap();
        let g = sample_density(&mesh, |_| 1.0).unwrap();
        assert!(matches!(
            pair(&mesh, &g, &f),
            Err(crate::Error::MeshMismatch)
        ));
    }

    #[test]
    fn nonfinite_samples_rejected() {
        let mesh = BoundaryMesh::regular_ngon(8, 1.0);
        let err = sample_trace(&mesh, |p| 1.0 / (p.x - p.x)).unwrap_err();
        assert!(matches!(err, crate::Error::NonFinite(_, _)));
    }

    proptest! {
        #[test]
        fn gauge_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let mesh = BoundaryMesh::regular_ngon(16, 1.0);
            let f = sample_trace(&mesh, |p| p.x * p.y).unwrap();
            let g = sample_trace(&mesh, |p| p.x - 0.5).unwrap();
            let combo = TraceFn {
                values: f.values.iter().zip(&g.values).map(|(x, y)| a * x + b * y).collect(),
            };
            let lhs = combo.gauge(&mesh).unwrap();
            let fg = f.gauge(&mesh).unwrap();
            let gg = g.gauge(&mesh).unwrap();
            for i in 0..lhs.values.len() {
                prop_assert!((lhs.values[i] - (a * fg.values[i] + b * gg.values[i])).abs() < 1e-12);
            }
        }

        #[test]
        fn pairing_kills_constants_against_gauged_density(c in -3.0f64..3.0) {
            let mesh = BoundaryMesh::regular_ngon(24, 1.0);
            let g = sample_density(&mesh, |p| p.x.sin()).unwrap().gauge(&mesh).unwrap();
            let f = TraceFn { values: vec![c; mesh.n_vertices()] };
            prop_assert!(pair(&mesh, &g, &f).unwrap().abs() < 1e-12);
        }
    }
}
