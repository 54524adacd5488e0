//! 2D computational potential theory on dyadic approximations of open sets.
//!
//! The crate builds level-`k` dyadic cube approximations of arbitrary open
//! sets (disks, polygons, Koch snowflakes and their prefractals), extracts
//! oriented polygonal boundary meshes, and assembles the harmonic
//! layer-potential calculus on those meshes: single/double layer potentials,
//! the Neumann-Poincaré operator and its adjoint, hypersingular and
//! single-layer Galerkin forms, Poincaré-Steklov forms, Calderón projectors,
//! Neumann series and Cauchy integrals. A level-sweep harness measures the
//! convergence of all of those objects as the dyadic level increases.

pub mod cauchy;
pub mod config;
pub mod converge;
pub mod fields;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod mesh;
pub mod operators;
pub mod transmission;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("root cube is not classified Inside")]
    RootNotInside,
    #[error("window does not intersect the region")]
    WindowEmpty,
    #[error("field produced a non-finite value at ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("trace and density live on different meshes")]
    MeshMismatch,
    #[error("degenerate panel (zero length)")]
    DegeneratePanel,
    #[error("target point lies on the panel in off-boundary mode")]
    TargetOnPanel,
    #[error("operator assembly requires a single closed loop, mesh has {0}")]
    MultiLoopUnsupported(usize),
    #[error("single layer Galerkin matrix is singular on the gauged subspace")]
    SingularV,
    #[error("quadratic form degenerates beyond the gauge kernel")]
    SingularForm,
    #[error("trace-side mass pairing is singular")]
    SingularMass,
    #[error("input violates the mean-zero gauge")]
    GaugeViolation,
    #[error("probe distance is below the machine-safe threshold")]
    ProbeTooClose,
    #[error("window touches a mesh boundary")]
    WindowTouchesBoundary,
    #[error("measured contraction constant is not below one (c = {0})")]
    NotContractive(f64),
    #[error("window is not compatible with the requested sweep levels")]
    WindowViolation,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
