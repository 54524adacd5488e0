//! Dyadic approximations of open sets and set-convergence metrics.
//!
//! A level-`k` dyadic cube is `[j1 2^-k, (j1+1) 2^-k] x [j2 2^-k, (j2+1) 2^-k]`.
//! The dyadic approximation of an open set `Omega` rooted in a cube `pi_0` is
//! the maximal union of level-`k` cubes contained in `Omega`, containing
//! `pi_0`, whose interior is connected. A union of closed axis-aligned
//! squares of equal side has connected interior exactly when its
//! face-adjacency graph is connected, so a flood fill over face-adjacent
//! Inside cubes starting from the root realizes the maximal set.

pub mod metrics;
pub mod region;
pub mod shapes;

pub use metrics::{set_convergence_metrics, SetMetrics, Window};
pub use region::{boundary_loops, dyadic_approximation, BoundaryLoop, DyadicIndex, DyadicRegion};
pub use shapes::{classify_cube, CubeClass, ShapeOracle};

/// 2D point/vector alias used throughout the crate.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Geometric tolerance for shape membership tests (cube coordinates are
/// exact dyadic rationals; only oracle evaluations carry this slack).
pub const EPS_GEOM: f64 = 1e-12;
