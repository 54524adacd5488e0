//! Dyadic cubes, flood-fill regions and boundary loop extraction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::shapes::{classify_cube, CubeClass, ShapeOracle};
use super::Vec2;
use crate::{Error, Result};

/// A closed dyadic cube, identified by its level and lower-left index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicIndex {
    pub level: u32,
    pub ix: i64,
    pub iy: i64,
}

impl DyadicIndex {
    pub fn new(level: u32, ix: i64, iy: i64) -> Self {
        Self { level, ix, iy }
    }

    /// Side length `2^-level`, exact in floating point.
    pub fn side(&self) -> f64 {
        (2.0f64).powi(-(self.level as i32))
    }

    /// Lower-left corner.
    pub fn min(self) -> Vec2 {
        let h = self.side();
        Vec2::new(self.ix as f64 * h, self.iy as f64 * h)
    }

    /// Upper-right corner.
    pub fn max(self) -> Vec2 {
        let h = self.side();
        Vec2::new((self.ix + 1) as f64 * h, (self.iy + 1) as f64 * h)
    }

    pub fn center(&self) -> Vec2 {
        let h = self.side();
        Vec2::new((self.ix as f64 + 0.5) * h, (self.iy as f64 + 0.5) * h)
    }

    /// The four corners, counterclockwise from the lower-left.
    pub fn corners(self) -> [Vec2; 4] {
        let lo = self.min();
        let hi = self.max();
        [
            lo,
            Vec2::new(hi.x, lo.y),
            hi,
            Vec2::new(lo.x, hi.y),
        ]
    }

    /// The four level-`level+1` children.
    pub fn children(&self) -> [DyadicIndex; 4] {
        let l = self.level + 1;
        let (x, y) = (2 * self.ix, 2 * self.iy);
        [
            DyadicIndex::new(l, x, y),
            DyadicIndex::new(l, x + 1, y),
            DyadicIndex::new(l, x, y + 1),
            DyadicIndex::new(l, x + 1, y + 1),
        ]
    }

    /// All descendants at the given finer level.
    pub fn descendants(&self, level: u32) -> Vec<DyadicIndex> {
        assert!(level >= self.level);
        let shift = level - self.level;
        let n = 1i64 << shift;
        let (x0, y0) = (self.ix << shift, self.iy << shift);
        let mut out = Vec::with_capacity((n * n) as usize);
        for dy in 0..n {
            for dx in 0..n {
                out.push(DyadicIndex::new(level, x0 + dx, y0 + dy));
            }
        }
        out
    }

    /// Ancestor cube at a coarser level.
    pub fn ancestor(&self, level: u32) -> DyadicIndex {
        assert!(level <= self.level);
        let shift = self.level - level;
        DyadicIndex::new(level, self.ix >> shift, self.iy >> shift)
    }
}

/// A level-`k` set of closed dyadic cubes with connected interior: the
/// discrete dyadic approximation of an open set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicRegion {
    pub level: u32,
    pub root: DyadicIndex,
    cubes: BTreeSet<(i64, i64)>,
}

impl DyadicRegion {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn contains_cube(&self, ix: i64, iy: i64) -> bool {
        self.cubes.contains(&(ix, iy))
    }

    /// Cube indices in lexicographic order.
    pub fn cubes(&self) -> impl Iterator<Item = DyadicIndex> + '_ {
        let level = self.level;
        self.cubes
            .iter()
            .map(move |&(ix, iy)| DyadicIndex::new(level, ix, iy))
    }

    /// Builds a region directly from a cube list (used by deserialization).
    pub fn from_cubes(level: u32, root: DyadicIndex, cubes: impl IntoIterator<Item = (i64, i64)>) -> Self {
        Self {
            level,
            root,
            cubes: cubes.into_iter().collect(),
        }
    }

    /// True when every cube of `self`, subdivided to `finer.level`, belongs
    /// to `finer` (the nestedness of Theorem-style monotone sweeps).
    pub fn is_subset_of(&self, finer: &DyadicRegion) -> bool {
        assert!(finer.level >= self.level);
        self.cubes().all(|c| {
            c.descendants(finer.level)
                .iter()
                .all(|d| finer.contains_cube(d.ix, d.iy))
        })
    }

    /// Interior membership of a point in the cube union, decided by probing
    /// the four diagonal quadrants around `p` at offset `delta`.
    pub fn interior_contains(&self, p: Vec2) -> bool {
        let h = (2.0f64).powi(-(self.level as i32));
        let delta = h / 256.0;
        [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .all(|&(sx, sy)| {
                let q = Vec2::new(p.x + sx * delta, p.y + sy * delta);
                let ix = (q.x / h).floor() as i64;
                let iy = (q.y / h).floor() as i64;
                self.contains_cube(ix, iy)
            })
    }

    /// Total area of the cube union.
    pub fn area(&self) -> f64 {
        let h = (2.0f64).powi(-(self.level as i32));
        self.len() as f64 * h * h
    }

    /// Number of cube faces with exactly one Inside neighbor (exposed faces).
    pub fn exposed_face_count(&self) -> usize {
        let mut n = 0;
        for &(ix, iy) in &self.cubes {
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                if !self.contains_cube(ix + dx, iy + dy) {
                    n += 1;
                }
            }
        }
        n
    }
}

/// Dyadic approximation of `shape` of order `k` rooted in `root`: the flood
/// fill, over face-adjacent Inside cubes at level `k`, of the component
/// containing the root's level-`k` descendants.
pub fn dyadic_approximation(shape: &ShapeOracle, root: DyadicIndex, k: u32) -> Result<DyadicRegion> {
    if k < root.level {
        return Err(Error::Config(format!(
            "target level {k} is coarser than the root level {}",
            root.level
        )));
    }
    if classify_cube(shape, root) != CubeClass::Inside {
        return Err(Error::RootNotInside);
    }

    let mut cubes: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut rejected: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut frontier: VecDeque<(i64, i64)> = VecDeque::new();

    // Descendants of an Inside cube are Inside: seed them directly.
    for d in root.descendants(k) {
        cubes.insert((d.ix, d.iy));
        frontier.push_back((d.ix, d.iy));
    }

    while let Some((ix, iy)) = frontier.pop_front() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let nb = (ix + dx, iy + dy);
            if cubes.contains(&nb) || rejected.contains(&nb) {
                continue;
            }
            if classify_cube(shape, DyadicIndex::new(k, nb.0, nb.1)) == CubeClass::Inside {
                cubes.insert(nb);
                frontier.push_back(nb);
            } else {
                rejected.insert(nb);
            }
        }
    }

    Ok(DyadicRegion {
        level: k,
        root,
        cubes,
    })
}

/// One closed boundary loop in integer grid coordinates at the region level.
/// The outer loop is counterclockwise, hole loops are clockwise; the cube
/// union always lies on the left of the traversal direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryLoop {
    pub level: u32,
    /// Vertices as integer grid coordinates; the loop closes implicitly.
    pub vertices: Vec<(i64, i64)>,
}

impl BoundaryLoop {
    pub fn points(&self) -> Vec<Vec2> {
        let h = (2.0f64).powi(-(self.level as i32));
        self.vertices
            .iter()
            .map(|&(x, y)| Vec2::new(x as f64 * h, y as f64 * h))
            .collect()
    }

    pub fn perimeter(&self) -> f64 {
        let pts = self.points();
        let n = pts.len();
        (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).sum()
    }

    /// Signed area by the shoelace formula (positive for counterclockwise).
    pub fn signed_area(&self) -> f64 {
        let pts = self.points();
        let n = pts.len();
        0.5 * (0..n)
            .map(|i| {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                a.x * b.y - a.y * b.x
            })
            .sum::<f64>()
    }
}

/// Axis directions of directed boundary edges; the region lies on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    PosX,
    PosY,
    NegX,
    NegY,
}

impl Dir {
    fn step(self) -> (i64, i64) {
        match self {
            Dir::PosX => (1, 0),
            Dir::PosY => (0, 1),
            Dir::NegX => (-1, 0),
            Dir::NegY => (0, -1),
        }
    }

    fn left(self) -> Dir {
        match self {
            Dir::PosX => Dir::PosY,
            Dir::PosY => Dir::NegX,
            Dir::NegX => Dir::NegY,
            Dir::NegY => Dir::PosX,
        }
    }

    fn right(self) -> Dir {
        self.left().left().left()
    }
}

/// Extracts the oriented boundary loops of the cube union. With
/// `merge_collinear`, consecutive collinear edges are fused into single
/// longer panels.
pub fn boundary_loops(region: &DyadicRegion, merge_collinear: bool) -> Vec<BoundaryLoop> {
    assert!(!region.is_empty(), "boundary of an empty region");
    // Exposed faces as directed edges with the region on the left.
    let mut edges: BTreeMap<(i64, i64), BTreeSet<Dir>> = BTreeMap::new();
    let mut insert = |v: (i64, i64), d: Dir| {
        edges.entry(v).or_default().insert(d);
    };
    for c in region.cubes() {
        let (x, y) = (c.ix, c.iy);
        if !region.contains_cube(x, y - 1) {
            insert((x, y), Dir::PosX);
        }
        if !region.contains_cube(x + 1, y) {
            insert((x + 1, y), Dir::PosY);
        }
        if !region.contains_cube(x, y + 1) {
            insert((x + 1, y + 1), Dir::NegX);
        }
        if !region.contains_cube(x - 1, y) {
            insert((x, y + 1), Dir::NegY);
        }
    }

    let mut loops = Vec::new();
    while let Some((&start, dirs)) = edges.iter().next() {
        let first_dir = *dirs.iter().next().unwrap();
        let mut vertices = vec![start];
        let mut v = start;
        let mut dir = first_dir;
        take_edge(&mut edges, v, dir);
        loop {
            let (dx, dy) = dir.step();
            v = (v.0 + dx, v.1 + dy);
            if v == start {
                break;
            }
            vertices.push(v);
            // At a pinch vertex (two diagonally touching cubes) prefer the
            // left turn: this keeps each loop simple, splitting the pinch.
            let next = [dir.left(), dir, dir.right()]
                .into_iter()
                .find(|d| edges.get(&v).is_some_and(|s| s.contains(d)))
                .expect("boundary edge chain broke");
            take_edge(&mut edges, v, next);
            dir = next;
        }
        if merge_collinear {
            vertices = merge_collinear_vertices(vertices);
        }
        loops.push(BoundaryLoop {
            level: region.level,
            vertices,
        });
    }

    // Outer loop (largest |signed area|, counterclockwise) first.
    loops.sort_by(|a, b| {
        b.signed_area()
            .abs()
            .partial_cmp(&a.signed_area().abs())
            .unwrap()
    });
    loops
}

fn take_edge(edges: &mut BTreeMap<(i64, i64), BTreeSet<Dir>>, v: (i64, i64), d: Dir) {
    let set = edges.get_mut(&v).expect("missing boundary edge");
    set.remove(&d);
    if set.is_empty() {
        edges.remove(&v);
    }
}

fn merge_collinear_vertices(vertices: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    let n = vertices.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = vertices[(i + n - 1) % n];
        let cur = vertices[i];
        let next = vertices[(i + 1) % n];
        let d1 = (cur.0 - prev.0, cur.1 - prev.1);
        let d2 = (next.0 - cur.0, next.1 - cur.1);
        if d1.0 * d2.1 - d1.1 * d2.0 != 0 {
            out.push(cur);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ShapeOracle {
        ShapeOracle::OpenRectangle {
            min: Vec2::new(0.0, 0.0),
            max: Vec2::new(1.0, 1.0),
        }
    }

    #[test]
    fn unit_square_level2_region() {
        let root = DyadicIndex::new(2, 1, 1);
        let region = dyadic_approximation(&unit_square(), root, 2).unwrap();
        assert_eq!(region.len(), 4);
        for c in region.cubes() {
            assert!(c.ix >= 1 && c.ix <= 2 && c.iy >= 1 && c.iy <= 2);
        }
    }

    #[test]
    fn unit_square_level3_region() {
        let root = DyadicIndex::new(2, 1, 1);
        let region = dyadic_approximation(&unit_square(), root, 3).unwrap();
        assert_eq!(region.len(), 36);
    }

    #[test]
    fn root_not_inside_rejected() {
        let root = DyadicIndex::new(1, 0, 0); // touches the boundary of (0,1)^2
        let err = dyadic_approximation(&unit_square(), root, 3).unwrap_err();
        assert!(matches!(err, Error::RootNotInside));
    }

    #[test]
    fn four_cube_region_boundary() {
        let root = DyadicIndex::new(2, 1, 1);
        let region = dyadic_approximation(&unit_square(), root, 2).unwrap();
        let loops = boundary_loops(&region, false);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].vertices.len(), 8);
        assert!((loops[0].perimeter() - 2.0).abs() < 1e-15);
        assert!(loops[0].signed_area() > 0.0);
    }

    #[test]
    fn single_cube_boundary() {
        let region = DyadicRegion::from_cubes(3, DyadicIndex::new(3, 0, 0), [(0, 0)]);
        let loops = boundary_loops(&region, false);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].vertices.len(), 4);
        assert!((loops[0].perimeter() - 4.0 * 0.125).abs() < 1e-15);
    }

    #[test]
    fn hole_loop_is_clockwise() {
        // 3x3 ring of cubes with the middle removed.
        let cubes = (0..3)
            .flat_map(|y| (0..3).map(move |x| (x, y)))
            .filter(|&(x, y)| !(x == 1 && y == 1));
        let region = DyadicRegion::from_cubes(0, DyadicIndex::new(0, 0, 0), cubes);
        let loops = boundary_loops(&region, false);
        assert_eq!(loops.len(), 2);
        assert!(loops[0].signed_area() > 0.0);
        assert!(loops[1].signed_area() < 0.0);
    }

    #[test]
    fn pinch_vertex_splits_into_simple_loops() {
        // Two cubes touching only at a corner must give two simple loops.
        let region = DyadicRegion::from_cubes(0, DyadicIndex::new(0, 0, 0), [(0, 0), (1, 1)]);
        let loops = boundary_loops(&region, false);
        assert_eq!(loops.len(), 2);
        for l in &loops {
            assert_eq!(l.vertices.len(), 4);
        }
    }

    #[test]
    fn perimeter_matches_exposed_faces() {
        let root = DyadicIndex::new(2, 1, 1);
        let region = dyadic_approximation(&unit_square(), root, 4).unwrap();
        let loops = boundary_loops(&region, false);
        let perimeter: f64 = loops.iter().map(|l| l.perimeter()).sum();
        let expected = region.exposed_face_count() as f64 * region.cubes().next().unwrap().side();
        assert!((perimeter - expected).abs() < 1e-12);
    }

    #[test]
    fn merged_loops_have_fewer_vertices() {
        let root = DyadicIndex::new(2, 1, 1);
        let region = dyadic_approximation(&unit_square(), root, 3).unwrap();
        let raw = boundary_loops(&region, false);
        let merged = boundary_loops(&region, true);
        assert_eq!(merged[0].vertices.len(), 4);
        assert!((raw[0].perimeter() - merged[0].perimeter()).abs() < 1e-15);
    }
}
