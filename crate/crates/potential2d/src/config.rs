//! JSON job configuration shared by all CLI commands.

use serde::{Deserialize, Serialize};

use crate::geometry::{DyadicIndex, ShapeOracle, Vec2, Window};
use crate::mesh::BoundaryMesh;
use crate::{Error, Result};

/// Target shape of a dyadic approximation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Disk { center: [f64; 2], radius: f64 },
    Rect { min: [f64; 2], max: [f64; 2] },
    Polygon { vertices: Vec<[f64; 2]> },
    Koch { side: f64, generation: Option<u32> },
}

impl ShapeSpec {
    pub fn oracle(&self) -> ShapeOracle {
        match self {
            ShapeSpec::Disk { center, radius } => ShapeOracle::Disk {
                center: Vec2::new(center[0], center[1]),
                radius: *radius,
            },
            ShapeSpec::Rect { min, max } => ShapeOracle::OpenRectangle {
                min: Vec2::new(min[0], min[1]),
                max: Vec2::new(max[0], max[1]),
            },
            ShapeSpec::Polygon { vertices } => ShapeOracle::SimplePolygon {
                vertices: vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect(),
            },
            ShapeSpec::Koch { side, generation } => match generation {
                Some(m) => ShapeOracle::koch_prefractal(*side, *m),
                None => ShapeOracle::koch_limit(*side),
            },
        }
    }
}

/// Directly meshed boundaries for single-level operator jobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    /// Regular polygon inscribed in a circle.
    Ngon { n: usize, radius: f64 },
    /// Axis-aligned square subdivided into `panels_per_side` panels per side.
    Square {
        min: [f64; 2],
        side: f64,
        panels_per_side: usize,
    },
    /// Boundary of the dyadic approximation of `shape` at `level`.
    Dyadic {
        shape: ShapeSpec,
        root: CubeSpec,
        level: u32,
    },
}

impl MeshSpec {
    pub fn build(&self) -> Result<BoundaryMesh> {
        match self {
            MeshSpec::Ngon { n, radius } => {
                if *n < 3 {
                    return Err(Error::Config("ngon needs n >= 3".into()));
                }
                Ok(BoundaryMesh::regular_ngon(*n, *radius))
            }
            MeshSpec::Square {
                min,
                side,
                panels_per_side,
            } => {
                if *panels_per_side == 0 || *side <= 0.0 {
                    return Err(Error::Config("square needs positive side and panels".into()));
                }
                Ok(BoundaryMesh::square(
                    Vec2::new(min[0], min[1]),
                    *side,
                    *panels_per_side,
                ))
            }
            MeshSpec::Dyadic { shape, root, level } => {
                let region =
                    crate::geometry::dyadic_approximation(&shape.oracle(), root.index(), *level)?;
                BoundaryMesh::from_region(&region, true)
            }
        }
    }
}

/// A dyadic cube given by level and lower-left index.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeSpec {
    pub level: u32,
    pub ix: i64,
    pub iy: i64,
}

impl CubeSpec {
    pub fn index(&self) -> DyadicIndex {
        DyadicIndex::new(self.level, self.ix, self.iy)
    }
}

/// Evaluation window.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    Rect { min: [f64; 2], max: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl WindowSpec {
    pub fn window(&self) -> Window {
        match self {
            WindowSpec::Rect { min, max } => Window::Rect {
                min: Vec2::new(min[0], min[1]),
                max: Vec2::new(max[0], max[1]),
            },
            WindowSpec::Disk { center, radius } => Window::Disk {
                center: Vec2::new(center[0], center[1]),
                radius: *radius,
            },
        }
    }
}

/// Rectangular evaluation grid (`n x n` cell midpoints).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<Vec2> {
        let (lo, hi) = (
            Vec2::new(self.min[0], self.min[1]),
            Vec2::new(self.max[0], self.max[1]),
        );
        let n = self.n.max(1);
        let hx = (hi.x - lo.x) / n as f64;
        let hy = (hi.y - lo.y) / n as f64;
        let mut pts = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                pts.push(Vec2::new(
                    lo.x + (i as f64 + 0.5) * hx,
                    lo.y + (j as f64 + 0.5) * hy,
                ));
            }
        }
        pts
    }
}

fn default_seed() -> u64 {
    42
}

fn default_terms() -> usize {
    20
}

fn default_pitch() -> f64 {
    0.02
}

/// One job configuration; each command reads the fields it needs and
/// rejects configs missing them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub mesh: Option<MeshSpec>,
    #[serde(default)]
    pub shape: Option<ShapeSpec>,
    #[serde(default)]
    pub root: Option<CubeSpec>,
    /// `[k_min, k_max]` for sweeps; single-level jobs use `mesh` instead.
    #[serde(default)]
    pub levels: Option<[u32; 2]>,
    /// Named analytic reference field for trace data.
    #[serde(default)]
    pub trace: Option<String>,
    /// Named analytic reference field whose normal derivative is the density
    /// data.
    #[serde(default)]
    pub density: Option<String>,
    /// Imaginary part of complex Cauchy data (reference field name).
    #[serde(default)]
    pub trace_im: Option<String>,
    #[serde(default)]
    pub interior_window: Option<WindowSpec>,
    #[serde(default)]
    pub exterior_window: Option<WindowSpec>,
    #[serde(default = "default_pitch")]
    pub pitch: f64,
    #[serde(default = "default_terms")]
    pub terms: usize,
    /// Neumann series sign: `+I/2` when true.
    #[serde(default)]
    pub sign_plus: bool,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

impl JobConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn require_mesh(&self) -> Result<BoundaryMesh> {
        self.mesh
            .as_ref()
            .ok_or_else(|| Error::Config("missing `mesh`".into()))?
            .build()
    }

    pub fn require_shape(&self) -> Result<ShapeOracle> {
        Ok(self
            .shape
            .as_ref()
            .ok_or_else(|| Error::Config("missing `shape`".into()))?
            .oracle())
    }

    pub fn require_root(&self) -> Result<DyadicIndex> {
        Ok(self
            .root
            .ok_or_else(|| Error::Config("missing `root`".into()))?
            .index())
    }

    pub fn require_levels(&self) -> Result<(u32, u32)> {
        let [a, b] = self
            .levels
            .ok_or_else(|| Error::Config("missing `levels`".into()))?;
        if a > b {
            return Err(Error::Config("levels must be [k_min, k_max]".into()));
        }
        Ok((a, b))
    }
}

/// Deterministic 64-bit SplitMix generator for seeded test data.
#[derive(Debug, Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = r#"{
            "mesh": {"kind": "ngon", "n": 256, "radius": 1.0},
            "trace": "re_z",
            "terms": 25,
            "sign_plus": true
        }"#;
        let cfg: JobConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.terms, 25);
        assert!(cfg.sign_plus);
        let mesh = cfg.require_mesh().unwrap();
        assert_eq!(mesh.n_panels(), 256);
        assert!(cfg.require_shape().is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = r#"{"mesh": {"kind": "ngon", "n": 4, "radius": 1.0}, "bogus": 1}"#;
        assert!(serde_json::from_str::<JobConfig>(text).is_err());
    }

    #[test]
    fn dyadic_mesh_spec_builds() {
        let text = r#"{
            "mesh": {"kind": "dyadic",
                     "shape": {"kind": "rect", "min": [0.0, 0.0], "max": [1.0, 1.0]},
                     "root": {"level": 2, "ix": 1, "iy": 1},
                     "level": 4}
        }"#;
        let cfg: JobConfig = serde_json::from_str(text).unwrap();
        let mesh = cfg.require_mesh().unwrap();
        assert!(mesh.n_panels() >= 4);
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64(42);
        let mut b = SplitMix64(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let v = SplitMix64(1).next_f64();
        assert!((-1.0..1.0).contains(&v));
    }
}
