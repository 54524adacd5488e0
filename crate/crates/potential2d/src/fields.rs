//! Named analytic reference fields used as sweep data: globally harmonic
//! functions with exact gradients, so every level of a sweep samples the
//! same continuum object.

use crate::geometry::Vec2;
use crate::kernels::GAUSS8;
use crate::mesh::{sample_trace, BoundaryMesh, DensityFn, TraceFn};
use crate::{Error, Result};

/// Globally harmonic polynomial reference fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefField {
    /// `Re z = x`
    ReZ,
    /// `Im z = y`
    ImZ,
    /// `Re z^2 = x^2 - y^2`
    ReZ2,
    /// `Im z^2 = 2xy`
    ImZ2,
    /// `Re z^3 = x^3 - 3xy^2`
    ReZ3,
    /// `Im z^3 = 3x^2 y - y^3`
    ImZ3,
}

impl RefField {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "re_z" => Ok(Self::ReZ),
            "im_z" => Ok(Self::ImZ),
            "re_z2" => Ok(Self::ReZ2),
            "im_z2" => Ok(Self::ImZ2),
            "re_z3" => Ok(Self::ReZ3),
            "im_z3" => Ok(Self::ImZ3),
            other => Err(Error::Config(format!("unknown reference field `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ReZ => "re_z",
            Self::ImZ => "im_z",
            Self::ReZ2 => "re_z2",
            Self::ImZ2 => "im_z2",
            Self::ReZ3 => "re_z3",
            Self::ImZ3 => "im_z3",
        }
    }

    pub fn value(self, p: Vec2) -> f64 {
        let (x, y) = (p.x, p.y);
        match self {
            Self::ReZ => x,
            Self::ImZ => y,
            Self::ReZ2 => x * x - y * y,
            Self::ImZ2 => 2.0 * x * y,
            Self::ReZ3 => x * x * x - 3.0 * x * y * y,
            Self::ImZ3 => 3.0 * x * x * y - y * y * y,
        }
    }

    pub fn gradient(self, p: Vec2) -> Vec2 {
        let (x, y) = (p.x, p.y);
        match self {
            Self::ReZ => Vec2::new(1.0, 0.0),
            Self::ImZ => Vec2::new(0.0, 1.0),
            Self::ReZ2 => Vec2::new(2.0 * x, -2.0 * y),
            Self::ImZ2 => Vec2::new(2.0 * y, 2.0 * x),
            Self::ReZ3 => Vec2::new(3.0 * (x * x - y * y), -6.0 * x * y),
            Self::ImZ3 => Vec2::new(6.0 * x * y, 3.0 * (x * x - y * y)),
        }
    }

    /// Gauged nodal trace of the field on a mesh.
    pub fn trace(self, mesh: &BoundaryMesh) -> Result<TraceFn> {
        sample_trace(mesh, |p| self.value(p))?.gauge(mesh)
    }

    /// Gauged panel density of the field's outward normal derivative
    /// (exact panel averages via Gauss quadrature).
    pub fn normal_density(self, mesh: &BoundaryMesh) -> Result<DensityFn> {
        let values = mesh
            .panels()
            .map(|panel| {
                let nu = panel.normal();
                GAUSS8
                    .iter()
                    .map(|&(t, w)| w * nu.dot(&self.gradient(panel.a + t * (panel.b - panel.a))))
                    .sum()
            })
            .collect();
        DensityFn { values }.gauge(mesh)
    }
}
