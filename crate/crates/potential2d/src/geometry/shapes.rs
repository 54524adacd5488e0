//! Shape oracles: open-set membership and conservative cube classification.

use std::sync::RwLock;

use super::region::{DyadicIndex, DyadicRegion};
use super::{Vec2, EPS_GEOM};

/// Classification of a closed dyadic cube against an open set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeClass {
    /// The closed cube is a subset of the open set.
    Inside,
    /// The closed cube misses the closure of the set.
    Outside,
    /// Neither could be certified.
    Crossing,
}

/// An open set given through membership and cube-classification oracles.
///
/// Classification is conservative and monotone under subdivision: a child of
/// an Inside cube is Inside, and undecidable cubes fall back to Crossing.
#[derive(Debug)]
pub enum ShapeOracle {
    Disk {
        center: Vec2,
        radius: f64,
    },
    OpenRectangle {
        min: Vec2,
        max: Vec2,
    },
    /// Simple polygon with counterclockwise vertex order.
    SimplePolygon {
        vertices: Vec<Vec2>,
    },
    /// Koch snowflake centered at the origin (limit set when `generation`
    /// is None, prefractal polygon otherwise).
    Koch(KochShape),
    /// A dyadic cube union reused as an open set (the interior of the union).
    Region(Box<DyadicRegion>),
}

impl ShapeOracle {
    pub fn koch_limit(side: f64) -> Self {
        ShapeOracle::Koch(KochShape::new(side, None))
    }

    pub fn koch_prefractal(side: f64, generation: u32) -> Self {
        ShapeOracle::Koch(KochShape::new(side, Some(generation)))
    }

    /// Open-set membership of a point.
    pub fn contains_point(&self, p: Vec2) -> bool {
        match self {
            ShapeOracle::Disk { center, radius } => (p - center).norm() < radius - EPS_GEOM,
            ShapeOracle::OpenRectangle { min, max } => {
                p.x > min.x + EPS_GEOM
                    && p.x < max.x - EPS_GEOM
                    && p.y > min.y + EPS_GEOM
                    && p.y < max.y - EPS_GEOM
            }
            ShapeOracle::SimplePolygon { vertices } => {
                point_in_polygon(vertices, p) == PointClass::Inside
            }
            ShapeOracle::Koch(k) => k.contains_point(p),
            ShapeOracle::Region(r) => r.interior_contains(p),
        }
    }

    /// Axis-aligned bounding box of the closure.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        match self {
            ShapeOracle::Disk { center, radius } => (
                Vec2::new(center.x - radius, center.y - radius),
                Vec2::new(center.x + radius, center.y + radius),
            ),
            ShapeOracle::OpenRectangle { min, max } => (*min, *max),
            ShapeOracle::SimplePolygon { vertices } => polygon_bbox(vertices),
            ShapeOracle::Koch(k) => k.bbox(),
            ShapeOracle::Region(r) => {
                let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for c in r.cubes() {
                    let (a, b) = (c.min(), c.max());
                    lo = lo.inf(&a);
                    hi = hi.sup(&b);
                }
                (lo, hi)
            }
        }
    }

    /// Exact (or, for the Koch limit, `tol`-accurate) distance from a point
    /// to the topological boundary of the set.
    pub fn distance_to_boundary(&self, p: Vec2, tol: f64) -> f64 {
        match self {
            ShapeOracle::Disk { center, radius } => ((p - center).norm() - radius).abs(),
            ShapeOracle::OpenRectangle { min, max } => {
                let verts = [
                    *min,
                    Vec2::new(max.x, min.y),
                    *max,
                    Vec2::new(min.x, max.y),
                ];
                distance_to_polyline(&verts, p)
            }
            ShapeOracle::SimplePolygon { vertices } => distance_to_polyline(vertices, p),
            ShapeOracle::Koch(k) => {
                let poly = k.reference_polygon(tol);
                distance_to_polyline(&poly, p)
            }
            ShapeOracle::Region(r) => {
                let loops = super::region::boundary_loops(r, false);
                loops
                    .iter()
                    .map(|l| distance_to_polyline(&l.points(), p))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Exact Lebesgue measure of the open set.
    pub fn exact_area(&self) -> f64 {
        match self {
            ShapeOracle::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            ShapeOracle::OpenRectangle { min, max } => (max.x - min.x) * (max.y - min.y),
            ShapeOracle::SimplePolygon { vertices } => polygon_area(vertices),
            ShapeOracle::Koch(k) => k.area(),
            ShapeOracle::Region(r) => r.area(),
        }
    }
}

fn polygon_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    (0.5 * (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a.x * b.y - a.y * b.x
        })
        .sum::<f64>())
    .abs()
}

/// Classifies a closed dyadic cube against the open set.
pub fn classify_cube(shape: &ShapeOracle, idx: DyadicIndex) -> CubeClass {
    match shape {
        ShapeOracle::Disk { center, radius } => {
            let lo = idx.min();
            let hi = idx.max();
            let far = idx
                .corners()
                .iter()
                .map(|c| (c - center).norm())
                .fold(0.0, f64::max);
            let near = Vec2::new(
                center.x.clamp(lo.x, hi.x) - center.x,
                center.y.clamp(lo.y, hi.y) - center.y,
            )
            .norm();
            if far < radius - EPS_GEOM {
                CubeClass::Inside
            } else if near > radius + EPS_GEOM {
                CubeClass::Outside
            } else {
                CubeClass::Crossing
            }
        }
        ShapeOracle::OpenRectangle { min, max } => {
            let lo = idx.min();
            let hi = idx.max();
            if lo.x > min.x + EPS_GEOM
                && hi.x < max.x - EPS_GEOM
                && lo.y > min.y + EPS_GEOM
                && hi.y < max.y - EPS_GEOM
            {
                CubeClass::Inside
            } else if hi.x < min.x - EPS_GEOM
                || lo.x > max.x + EPS_GEOM
                || hi.y < min.y - EPS_GEOM
                || lo.y > max.y + EPS_GEOM
            {
                CubeClass::Outside
            } else {
                CubeClass::Crossing
            }
        }
        ShapeOracle::SimplePolygon { vertices } => classify_cube_polygon(vertices, idx),
        ShapeOracle::Koch(k) => k.classify_cube(idx),
        ShapeOracle::Region(r) => classify_cube_region(r, idx),
    }
}

fn classify_cube_region(r: &DyadicRegion, idx: DyadicIndex) -> CubeClass {
    if idx.level < r.level {
        // Coarse queries are only resolved when trivially disjoint.
        let all_out = idx
            .descendants(r.level)
            .iter()
            .all(|d| !r.contains_cube(d.ix, d.iy));
        return if all_out {
            CubeClass::Outside
        } else {
            CubeClass::Crossing
        };
    }
    let anc = idx.ancestor(r.level);
    if !r.contains_cube(anc.ix, anc.iy) {
        return CubeClass::Outside;
    }
    // The cube lies in the closed union; it is Inside when all four corners
    // are interior points of the union.
    if idx.corners().iter().all(|&c| r.interior_contains(c)) {
        CubeClass::Inside
    } else {
        CubeClass::Crossing
    }
}

fn classify_cube_polygon(vertices: &[Vec2], idx: DyadicIndex) -> CubeClass {
    let lo = idx.min();
    let hi = idx.max();
    let n = vertices.len();
    for i in 0..n {
        if segment_meets_box(vertices[i], vertices[(i + 1) % n], lo, hi) {
            return CubeClass::Crossing;
        }
    }
    // No edge meets the cube: corners are uniformly inside or outside.
    match point_in_polygon(vertices, lo) {
        PointClass::Inside => CubeClass::Inside,
        PointClass::Outside => CubeClass::Outside,
        PointClass::OnBoundary => CubeClass::Crossing,
    }
}

/// Koch snowflake built on an equilateral triangle of the given side,
/// centered at its centroid at the origin, bumps pointing outward. The limit
/// set is the increasing union of the open prefractal polygons.
#[derive(Debug)]
pub struct KochShape {
    pub side: f64,
    pub generation: Option<u32>,
    prefractals: RwLock<Vec<Vec<Vec2>>>,
}

impl KochShape {
    pub fn new(side: f64, generation: Option<u32>) -> Self {
        Self {
            side,
            generation,
            prefractals: RwLock::new(vec![koch_triangle(side)]),
        }
    }

    /// The prefractal polygon of the given generation (cached).
    pub fn prefractal(&self, m: u32) -> Vec<Vec2> {
        self.with_prefractal(m, |p| p.to_vec())
    }

    /// Runs a closure on the cached prefractal without copying it.
    fn with_prefractal<R>(&self, m: u32, f: impl FnOnce(&[Vec2]) -> R) -> R {
        {
            let cache = self.prefractals.read().unwrap();
            if let Some(p) = cache.get(m as usize) {
                return f(p);
            }
        }
        {
            let mut cache = self.prefractals.write().unwrap();
            while cache.len() <= m as usize {
                let next = koch_refine(cache.last().unwrap());
                cache.push(next);
            }
        }
        let cache = self.prefractals.read().unwrap();
        f(&cache[m as usize])
    }

    /// Exact area: the shoelace area of the fixed prefractal, or the limit
    /// value `8/5` of the base triangle area.
    pub fn area(&self) -> f64 {
        match self.generation {
            Some(g) => self.with_prefractal(g, polygon_area),
            None => 1.6 * 3.0f64.sqrt() / 4.0 * self.side * self.side,
        }
    }

    /// Outward growth of the snowflake beyond prefractal generation `m`.
    pub fn growth_margin(&self, m: u32) -> f64 {
        3.0f64.sqrt() / 4.0 * self.side / 3.0f64.powi(m as i32)
    }

    fn effective_generation(&self, feature: f64) -> u32 {
        // Smallest generation whose residual growth is below `feature`.
        let mut m = 0;
        while self.growth_margin(m) > feature && m < 16 {
            m += 1;
        }
        m
    }

    /// A polygonal stand-in for the boundary, accurate to `tol` in Hausdorff
    /// distance (the prefractal itself when `generation` is fixed).
    pub fn reference_polygon(&self, tol: f64) -> Vec<Vec2> {
        match self.generation {
            Some(g) => self.prefractal(g),
            None => self.prefractal(self.effective_generation(tol)),
        }
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        match self.generation {
            Some(g) => point_in_polygon(&self.prefractal(g), p) == PointClass::Inside,
            None => {
                let m_max = self.effective_generation(EPS_GEOM.max(self.side * 2e-5));
                for m in 0..=m_max {
                    enum Step {
                        Inside,
                        FarOutside,
                        Continue,
                    }
                    let step = self.with_prefractal(m, |poly| match point_in_polygon(poly, p) {
                        PointClass::Inside => Step::Inside,
                        PointClass::OnBoundary => Step::Continue,
                        PointClass::Outside => {
                            // Farther outside than the remaining outward
                            // growth: outside every later prefractal too.
                            if distance_to_polyline(poly, p) > self.growth_margin(m) + EPS_GEOM {
                                Step::FarOutside
                            } else {
                                Step::Continue
                            }
                        }
                    });
                    match step {
                        Step::Inside => return true,
                        Step::FarOutside => return false,
                        Step::Continue => {}
                    }
                }
                false
            }
        }
    }

    pub fn classify_cube(&self, idx: DyadicIndex) -> CubeClass {
        if let Some(g) = self.generation {
            return classify_cube_polygon(&self.prefractal(g), idx);
        }
        // Limit snowflake: probe prefractals of increasing generation.
        // Probe depth is measured in dyadic levels (default level + 4) and
        // converted to the generation at which prefractal features are finer.
        let probe = (idx.level + 4) as f64 * std::f64::consts::LN_2 / 3.0f64.ln();
        let m_max = probe.ceil() as u32;
        for m in 0..=m_max {
            let margin = self.growth_margin(m);
            let decided = self.with_prefractal(m, |poly| {
                match classify_cube_polygon(poly, idx) {
                    CubeClass::Inside => Some(CubeClass::Inside),
                    CubeClass::Outside => {
                        // The snowflake still grows by at most the margin.
                        let d = box_distance_to_polyline(poly, idx.min(), idx.max());
                        (d > margin + EPS_GEOM).then_some(CubeClass::Outside)
                    }
                    CubeClass::Crossing => {
                        // Prefractals only grow: a corner inside generation
                        // `m` is inside the limit, and a corner farther
                        // outside than the remaining growth stays outside,
                        // so together they pin the crossing at every later
                        // generation.
                        let mut inside = false;
                        let mut far_outside = false;
                        for c in idx.corners() {
                            match point_in_polygon(poly, c) {
                                PointClass::Inside => inside = true,
                                PointClass::Outside => {
                                    if distance_to_polyline(poly, c) > margin + EPS_GEOM {
                                        far_outside = true;
                                    }
                                }
                                PointClass::OnBoundary => {}
                            }
                        }
                        (inside && far_outside).then_some(CubeClass::Crossing)
                    }
                }
            });
            if let Some(class) = decided {
                return class;
            }
        }
        CubeClass::Crossing
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        // Prefractal generation 2 plus the growth margin bounds the limit.
        let (lo, hi) = polygon_bbox(&self.prefractal(2));
        let m = self.growth_margin(2);
        (
            Vec2::new(lo.x - m, lo.y - m),
            Vec2::new(hi.x + m, hi.y + m),
        )
    }
}

fn koch_triangle(side: f64) -> Vec<Vec2> {
    let r = side / 3.0f64.sqrt(); // circumradius
    [90.0f64, 210.0, 330.0]
        .iter()
        .map(|deg| {
            let t = deg.to_radians();
            Vec2::new(r * t.cos(), r * t.sin())
        })
        .collect()
}

/// One Koch iteration: each directed edge gains an outward-pointing bump.
fn koch_refine(poly: &[Vec2]) -> Vec<Vec2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(4 * n);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let d = q - p;
        // Outward of a counterclockwise polygon is to the right of d.
        let outward = Vec2::new(d.y, -d.x);
        let tip = p + d * 0.5 + outward * (3.0f64.sqrt() / 6.0);
        out.push(p);
        out.push(p + d / 3.0);
        out.push(tip);
        out.push(p + d * (2.0 / 3.0));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PointClass {
    Inside,
    Outside,
    OnBoundary,
}

/// Crossing-number test with an explicit boundary band of width `EPS_GEOM`.
pub(crate) fn point_in_polygon(vertices: &[Vec2], p: Vec2) -> PointClass {
    let n = vertices.len();
    for i in 0..n {
        if point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= EPS_GEOM {
            return PointClass::OnBoundary;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    if inside {
        PointClass::Inside
    } else {
        PointClass::Outside
    }
}

pub(crate) fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

pub(crate) fn distance_to_polyline(vertices: &[Vec2], p: Vec2) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| point_segment_distance(p, vertices[i], vertices[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Distance from a closed axis-aligned box to a closed polygonal curve
/// (zero when they meet or when the box is inside the polygon's bbox hull
/// touching an edge).
fn box_distance_to_polyline(vertices: &[Vec2], lo: Vec2, hi: Vec2) -> f64 {
    let n = vertices.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if segment_meets_box(a, b, lo, hi) {
            return 0.0;
        }
        best = best.min(segment_box_distance(a, b, lo, hi));
    }
    best
}

fn segment_box_distance(a: Vec2, b: Vec2, lo: Vec2, hi: Vec2) -> f64 {
    // Distance between a segment and a box that do not intersect: minimum
    // over box corners to segment and segment endpoints to box.
    let corners = [
        lo,
        Vec2::new(hi.x, lo.y),
        hi,
        Vec2::new(lo.x, hi.y),
    ];
    let mut best = f64::INFINITY;
    for c in corners {
        best = best.min(point_segment_distance(c, a, b));
    }
    for p in [a, b] {
        let dx = (lo.x - p.x).max(0.0).max(p.x - hi.x);
        let dy = (lo.y - p.y).max(0.0).max(p.y - hi.y);
        best = best.min((dx * dx + dy * dy).sqrt());
    }
    best
}

/// True when the closed segment meets the closed box (within `EPS_GEOM`).
pub(crate) fn segment_meets_box(a: Vec2, b: Vec2, lo: Vec2, hi: Vec2) -> bool {
    // Liang-Barsky style clipping with a tolerance band.
    let lo = Vec2::new(lo.x - EPS_GEOM, lo.y - EPS_GEOM);
    let hi = Vec2::new(hi.x + EPS_GEOM, hi.y + EPS_GEOM);
    let d = b - a;
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-d.x, a.x - lo.x),
        (d.x, hi.x - a.x),
        (-d.y, a.y - lo.y),
        (d.y, hi.y - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

fn polygon_bbox(vertices: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in vertices {
        lo = lo.inf(v);
        hi = hi.sup(v);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_interior_cube_is_inside() {
        let shape = ShapeOracle::OpenRectangle {
            min: Vec2::new(0.0, 0.0),
            max: Vec2::new(1.0, 1.0),
        };
        assert_eq!(
            classify_cube(&shape, DyadicIndex::new(2, 1, 1)),
            CubeClass::Inside
        );
    }

    #[test]
    fn boundary_contact_is_crossing() {
        let shape = ShapeOracle::OpenRectangle {
            min: Vec2::new(0.0, 0.0),
            max: Vec2::new(1.0, 1.0),
        };
        assert_eq!(
            classify_cube(&shape, DyadicIndex::new(1, 0, 0)),
            CubeClass::Crossing
        );
    }

    #[test]
    fn cube_outside_disk() {
        let shape = ShapeOracle::Disk {
            center: Vec2::new(0.0, 0.0),
            radius: 1.0,
        };
        // [1, 1.5] x [0, 0.5] touches the closure at (1, 0): Crossing.
        assert_eq!(
            classify_cube(&shape, DyadicIndex::new(1, 2, 0)),
            CubeClass::Crossing
        );
        // [1.5, 2] x [0, 0.5] misses the closure.
        assert_eq!(
            classify_cube(&shape, DyadicIndex::new(1, 3, 0)),
            CubeClass::Outside
        );
    }

    #[test]
    fn polygon_cube_classification() {
        let tri = ShapeOracle::SimplePolygon {
            vertices: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(4.0, 0.0),
                Vec2::new(0.0, 4.0),
            ],
        };
        assert_eq!(
            classify_cube(&tri, DyadicIndex::new(1, 1, 1)),
            CubeClass::Inside
        );
        assert_eq!(
            classify_cube(&tri, DyadicIndex::new(0, 3, 3)),
            CubeClass::Outside
        );
        assert_eq!(
            classify_cube(&tri, DyadicIndex::new(0, 1, 1)),
            CubeClass::Crossing
        );
    }

    #[test]
    fn koch_prefractals_grow() {
        let koch = KochShape::new(1.0, None);
        let p0 = koch.prefractal(0);
        let p1 = koch.prefractal(1);
        assert_eq!(p0.len(), 3);
        assert_eq!(p1.len(), 12);
        // Every vertex of the triangle stays a vertex of the star.
        for v in &p0 {
            assert!(p1.iter().any(|w| (w - v).norm() < 1e-14));
        }
        // The prefractal areas increase.
        let area = |poly: &[Vec2]| -> f64 {
            let n = poly.len();
            0.5 * (0..n)
                .map(|i| {
                    let a = poly[i];
                    let b = poly[(i + 1) % n];
                    a.x * b.y - a.y * b.x
                })
                .sum::<f64>()
        };
        assert!(area(&p1) > area(&p0));
        assert!(area(&p0) > 0.0, "prefractals must stay counterclockwise");
    }

    #[test]
    fn koch_limit_membership() {
        let shape = ShapeOracle::koch_limit(1.0);
        assert!(shape.contains_point(Vec2::new(0.0, 0.0)));
        assert!(!shape.contains_point(Vec2::new(1.0, 0.0)));
    }

    #[test]
    fn koch_classification_near_center() {
        let shape = ShapeOracle::koch_limit(1.0);
        assert_eq!(
            classify_cube(&shape, DyadicIndex::new(3, 0, 0)),
            CubeClass::Inside
        );
        assert_eq!(
            classify_cube(&shape, DyadicIndex::new(1, 4, 4)),
            CubeClass::Outside
        );
    }
}
