//! Closed-form panel integrals of the harmonic layer-potential kernels.
//!
//! Conventions, fixed once for the whole crate:
//! * single layer kernel `G(x, y) = -(1/2pi) ln|x - y|`;
//! * double layer kernel `d/dnu(y) G(x, y) = (1/2pi) <x - y, nu(y)> / |x - y|^2`,
//!   so the double layer of the constant density 1 equals `-1` inside a
//!   closed region, `0` outside and `-1/2` in the principal-value sense on
//!   the boundary.
//!
//! Every integral is returned for three panel densities at once: the
//! constant 1 and the two linear hat weights that vanish at one endpoint
//! (`hat_a` at `b`, `hat_b` at `a`), with `hat_a + hat_b = constant` exactly.
//!
//! All formulas work in the panel frame `u = tau - s`, `w = u^2 + d^2` with
//! `s = <x - a, t>`, `d = <x - a, nu>` and `tau` the arclength from `a`.

use num_complex::Complex64;

use crate::geometry::Vec2;
use crate::mesh::Panel;
use crate::{Error, Result};

/// Relative off-plane threshold below which a target counts as lying on the
/// panel's supporting line.
const ON_PLANE_REL: f64 = 1e-13;

/// Values of one panel integral for the three panel densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelWeights {
    pub constant: f64,
    pub hat_a: f64,
    pub hat_b: f64,
}

/// Gradients (with respect to the target) of one panel integral for the
/// three panel densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelGradients {
    pub constant: Vec2,
    pub hat_a: Vec2,
    pub hat_b: Vec2,
}

/// Local panel frame of a target point.
struct Frame {
    len: f64,
    t: Vec2,
    nu: Vec2,
    s: f64,
    /// Signed off-plane distance; exactly zero when the target is within the
    /// on-plane band.
    d: f64,
    u0: f64,
    u1: f64,
    w0: f64,
    w1: f64,
}

impl Frame {
    fn new(panel: &Panel, x: Vec2) -> Result<Self> {
        let len = panel.length();
        if len < 1e-300 {
            return Err(Error::DegeneratePanel);
        }
        let t = panel.tangent();
        let nu = panel.normal();
        let rel = x - panel.a;
        let s = rel.dot(&t);
        let mut d = rel.dot(&nu);
        if d.abs() <= ON_PLANE_REL * len {
            d = 0.0;
        }
        let (u0, u1) = (-s, len - s);
        Ok(Self {
            len,
            t,
            nu,
            s,
            d,
            u0,
            u1,
            w0: u0 * u0 + d * d,
            w1: u1 * u1 + d * d,
        })
    }

    fn on_panel(&self) -> bool {
        self.d == 0.0 && self.s >= -ON_PLANE_REL * self.len && self.s <= self.len * (1.0 + ON_PLANE_REL)
    }

    /// `atan(u1/d) - atan(u0/d)`; zero on the supporting line (the
    /// principal-value convention).
    fn datan(&self) -> f64 {
        if self.d == 0.0 {
            0.0
        } else {
            (self.u1 / self.d).atan() - (self.u0 / self.d).atan()
        }
    }

    fn dlnw(&self) -> f64 {
        self.w1.ln() - self.w0.ln()
    }
}

/// `u ln w - 2u + 2d atan(u/d)`, the antiderivative of `ln w`.
fn f_log(u: f64, d: f64, w: f64) -> f64 {
    if u == 0.0 && d == 0.0 {
        return 0.0;
    }
    let atan_term = if d == 0.0 { 0.0 } else { 2.0 * d * (u / d).atan() };
    u * w.ln() - 2.0 * u + atan_term
}

/// `(w ln w - w)/2`, the antiderivative of `u ln w`.
fn f_ulog(w: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        0.5 * (w * w.ln() - w)
    }
}

/// Single layer potential of the panel densities:
/// `-(1/2pi) \int weight(tau) ln|x - y(tau)| dtau`.
///
/// With `pv`, the target may lie on the panel (the integral is improper but
/// convergent); without it, an on-panel target is an error.
pub fn slp_panel(panel: &Panel, x: Vec2, pv: bool) -> Result<PanelWeights> {
    let fr = Frame::new(panel, x)?;
    if !pv && fr.on_panel() {
        return Err(Error::TargetOnPanel);
    }
    let i_log = 0.5 * (f_log(fr.u1, fr.d, fr.w1) - f_log(fr.u0, fr.d, fr.w0));
    let i_ulog = 0.5 * (f_ulog(fr.w1) - f_ulog(fr.w0)) + fr.s * i_log;
    let c = -1.0 / (2.0 * std::f64::consts::PI);
    let constant = c * i_log;
    let hat_b = c * i_ulog / fr.len;
    Ok(PanelWeights {
        constant,
        hat_a: constant - hat_b,
        hat_b,
    })
}

/// Double layer potential of the panel densities:
/// `(1/2pi) \int weight(tau) <x - y, nu> / |x - y|^2 dtau`.
///
/// With `pv`, an on-plane target uses the principal value (zero for a
/// straight panel).
pub fn dlp_panel(panel: &Panel, x: Vec2, pv: bool) -> Result<PanelWeights> {
    let fr = Frame::new(panel, x)?;
    if !pv && fr.on_panel() {
        return Err(Error::TargetOnPanel);
    }
    let c = 1.0 / (2.0 * std::f64::consts::PI);
    let datan = fr.datan();
    let constant = c * datan;
    let hat_b = c * (0.5 * fr.d * fr.dlnw() + fr.s * datan) / fr.len;
    Ok(PanelWeights {
        constant,
        hat_a: constant - hat_b,
        hat_b,
    })
}

/// Target-gradient of the single layer panel integrals. The target must be
/// off the panel.
pub fn grad_slp_panel(panel: &Panel, x: Vec2) -> Result<PanelGradients> {
    let fr = Frame::new(panel, x)?;
    if fr.on_panel() {
        return Err(Error::TargetOnPanel);
    }
    let c = -1.0 / (2.0 * std::f64::consts::PI);
    let datan = fr.datan();
    let dlnw = fr.dlnw();
    // \int (x - y)/w dtau = -t (ln w)/2 |_ + nu * d \int dtau/w.
    let g_const = (fr.t * (-0.5 * dlnw) + fr.nu * datan) * c;
    // \int tau (x - y)/w dtau, tau = u + s.
    let tx = -((fr.len - fr.d * datan) + 0.5 * fr.s * dlnw);
    let ty = 0.5 * fr.d * dlnw + fr.s * datan;
    let g_hat_b = (fr.t * tx + fr.nu * ty) * (c / fr.len);
    Ok(PanelGradients {
        constant: g_const,
        hat_a: g_const - g_hat_b,
        hat_b: g_hat_b,
    })
}

/// Target-gradient of the double layer panel integrals. The target must be
/// off the panel.
pub fn grad_dlp_panel(panel: &Panel, x: Vec2) -> Result<PanelGradients> {
    let fr = Frame::new(panel, x)?;
    if fr.on_panel() {
        return Err(Error::TargetOnPanel);
    }
    let c = 1.0 / (2.0 * std::f64::consts::PI);
    let datan = fr.datan();
    let dlnw = fr.dlnw();
    let d_inv_w = 1.0 / fr.w1 - 1.0 / fr.w0;
    let d_u_w = fr.u1 / fr.w1 - fr.u0 / fr.w0;
    let g_const = (fr.t * (-fr.d * d_inv_w) + fr.nu * (-d_u_w)) * c;
    let tx = datan - fr.d * d_u_w - fr.d * fr.s * d_inv_w;
    let ty = 0.5 * dlnw + fr.d * fr.d * d_inv_w - fr.s * d_u_w;
    let g_hat_b = (fr.t * tx + fr.nu * ty) * (c / fr.len);
    Ok(PanelGradients {
        constant: g_const,
        hat_a: g_const - g_hat_b,
        hat_b: g_hat_b,
    })
}

/// Cauchy integral of a linear-in-arclength complex density over one panel:
/// `(1/2pi i) \int h(zeta)/(zeta - z) dzeta` with `h` affine, `h(a) = fa`,
/// `h(b) = fb`.
///
/// With `pv`, `z` lies on the open panel and the principal value replaces
/// the logarithm's imaginary part.
pub fn cauchy_panel(
    a: Complex64,
    b: Complex64,
    fa: Complex64,
    fb: Complex64,
    z: Complex64,
    pv: bool,
) -> Result<Complex64> {
    let df = fb - fa;
    let lg = panel_log(a, b, z, pv)?;
    let h_z = fa + df * (z - a) / (b - a);
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    Ok((df + h_z * lg) / two_pi_i)
}

/// `z`-derivative of [`cauchy_panel`] (off-panel targets only).
pub fn cauchy_panel_deriv(
    a: Complex64,
    b: Complex64,
    fa: Complex64,
    fb: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    let df = fb - fa;
    let lg = panel_log(a, b, z, false)?;
    let h_z = fa + df * (z - a) / (b - a);
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    Ok((df / (b - a) * lg + h_z * (1.0 / (a - z) - 1.0 / (b - z))) / two_pi_i)
}

/// `log((b - z)/(a - z))`: principal branch off the panel (the subtended
/// angle stays in `(-pi, pi)`), real part only in the principal-value mode.
fn panel_log(a: Complex64, b: Complex64, z: Complex64, pv: bool) -> Result<Complex64> {
    if pv {
        let na = (z - a).norm();
        let nb = (b - z).norm();
        if na == 0.0 || nb == 0.0 {
            return Err(Error::TargetOnPanel);
        }
        return Ok(Complex64::new((nb / na).ln(), 0.0));
    }
    let len = (b - a).norm();
    // Reject targets on the closed panel: project and test the offset.
    let rel = (z - a) / (b - a);
    if rel.im.abs() * len <= ON_PLANE_REL * len && (-ON_PLANE_REL..=1.0 + ON_PLANE_REL).contains(&rel.re) {
        return Err(Error::TargetOnPanel);
    }
    Ok(((b - z) / (a - z)).ln())
}

/// 8-point Gauss-Legendre rule on `(0, 1)`: `(node, weight)` pairs.
pub const GAUSS8: [(f64, f64); 8] = [
    (0.5 - 0.480_144_928_248_768_2, 0.050_614_268_145_188_15),
    (0.5 - 0.398_333_238_706_813_35, 0.111_190_517_226_687_24),
    (0.5 - 0.262_766_204_958_164_5, 0.156_853_322_938_943_66),
    (0.5 - 0.091_717_321_247_824_9, 0.181_341_891_689_181_0),
    (0.5 + 0.091_717_321_247_824_9, 0.181_341_891_689_181_0),
    (0.5 + 0.262_766_204_958_164_5, 0.156_853_322_938_943_66),
    (0.5 + 0.398_333_238_706_813_35, 0.111_190_517_226_687_24),
    (0.5 + 0.480_144_928_248_768_2, 0.050_614_268_145_188_15),
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn panel(ax: f64, ay: f64, bx: f64, by: f64) -> Panel {
        Panel {
            a: Vec2::new(ax, ay),
            b: Vec2::new(bx, by),
            ia: 0,
            ib: 1,
        }
    }

    /// Adaptive Simpson quadrature, the independent oracle for the closed
    /// forms.
    fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let simpson = |a: f64, m: f64, b: f64| (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        let whole = simpson(a, m, b);
        let left = simpson(a, 0.5 * (a + m), m);
        let right = simpson(m, 0.5 * (m + b), b);
        if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            adaptive_simpson(f, a, m, tol / 2.0, depth - 1)
                + adaptive_simpson(f, m, b, tol / 2.0, depth - 1)
        }
    }

    fn quad_slp(p: &Panel, x: Vec2, weight: impl Fn(f64) -> f64) -> f64 {
        let len = p.length();
        let f = |tau: f64| {
            let y = p.a + p.tangent() * tau;
            -weight(tau / len) * (x - y).norm().ln() / (2.0 * PI)
        };
        adaptive_simpson(&f, 0.0, len, 1e-13, 30)
    }

    fn quad_dlp(p: &Panel, x: Vec2, weight: impl Fn(f64) -> f64) -> f64 {
        let len = p.length();
        let nu = p.normal();
        let f = |tau: f64| {
            let y = p.a + p.tangent() * tau;
            let r = x - y;
            weight(tau / len) * r.dot(&nu) / r.norm_squared() / (2.0 * PI)
        };
        adaptive_simpson(&f, 0.0, len, 1e-13, 30)
    }

    #[test]
    fn slp_pv_unit_panel_center() {
        // \int_{-1/2}^{1/2} -ln|t| dt / (2pi) = (1 + ln 2)/(2pi).
        let p = panel(-0.5, 0.0, 0.5, 0.0);
        let w = slp_panel(&p, Vec2::new(0.0, 0.0), true).unwrap();
        assert_relative_eq!(w.constant, (1.0 + 2.0f64.ln()) / (2.0 * PI), max_relative = 1e-14);
        // Symmetry splits the hats evenly.
        assert_relative_eq!(w.hat_a, w.hat_b, max_relative = 1e-13);
    }

    #[test]
    fn slp_matches_quadrature_off_panel() {
        let p = panel(0.2, -0.1, 0.9, 0.4);
        for x in [Vec2::new(1.3, 0.8), Vec2::new(-0.4, 0.05), Vec2::new(0.5, 0.10001)] {
            let w = slp_panel(&p, x, false).unwrap();
            assert_relative_eq!(w.constant, quad_slp(&p, x, |_| 1.0), max_relative = 1e-10);
            assert_relative_eq!(w.hat_b, quad_slp(&p, x, |l| l), max_relative = 1e-9);
            assert_relative_eq!(w.hat_a, quad_slp(&p, x, |l| 1.0 - l), max_relative = 1e-9);
        }
    }

    #[test]
    fn dlp_matches_quadrature_off_panel() {
        let p = panel(0.2, -0.1, 0.9, 0.4);
        for x in [Vec2::new(1.3, 0.8), Vec2::new(-0.4, 0.05), Vec2::new(0.3, -0.7)] {
            let w = dlp_panel(&p, x, false).unwrap();
            assert_relative_eq!(w.constant, quad_dlp(&p, x, |_| 1.0), max_relative = 1e-10);
            assert_relative_eq!(w.hat_b, quad_dlp(&p, x, |l| l), max_relative = 1e-9, epsilon = 1e-13);
            assert_relative_eq!(w.hat_a, quad_dlp(&p, x, |l| 1.0 - l), max_relative = 1e-9, epsilon = 1e-13);
        }
    }

    #[test]
    fn slp_far_field_logarithm() {
        let p = panel(-0.01, 0.0, 0.01, 0.0);
        let x = Vec2::new(200.0, 100.0);
        let w = slp_panel(&p, x, false).unwrap();
        let expect = -0.02 * x.norm().ln() / (2.0 * PI);
        assert_relative_eq!(w.constant, expect, max_relative = 1e-7);
    }

    #[test]
    fn dlp_winding_of_constant_density() {
        // Closed unit square, counterclockwise: double layer of 1 is -1
        // inside, 0 outside, -1/2 in the principal value on an edge.
        let sides = [
            panel(0.0, 0.0, 1.0, 0.0),
            panel(1.0, 0.0, 1.0, 1.0),
            panel(1.0, 1.0, 0.0, 1.0),
            panel(0.0, 1.0, 0.0, 0.0),
        ];
        let total = |x: Vec2, pv: bool| -> f64 {
            sides.iter().map(|p| dlp_panel(p, x, pv).unwrap().constant).sum()
        };
        assert_relative_eq!(total(Vec2::new(0.3, 0.6), false), -1.0, max_relative = 1e-13);
        assert_relative_eq!(total(Vec2::new(1.7, 0.4), false), 0.0, epsilon = 1e-13);
        assert_relative_eq!(total(Vec2::new(0.5, 0.0), true), -0.5, max_relative = 1e-13);
    }

    #[test]
    fn dlp_pv_vanishes_on_own_flat_panel() {
        let p = panel(0.0, 0.0, 1.0, 0.0);
        let w = dlp_panel(&p, Vec2::new(0.3, 0.0), true).unwrap();
        assert_eq!(w.constant, 0.0);
        assert_eq!(w.hat_a, 0.0);
        assert_eq!(w.hat_b, 0.0);
    }

    #[test]
    fn on_panel_rejected_without_pv() {
        let p = panel(0.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            slp_panel(&p, Vec2::new(0.3, 0.0), false),
            Err(Error::TargetOnPanel)
        ));
        assert!(matches!(
            grad_slp_panel(&p, Vec2::new(0.3, 0.0)),
            Err(Error::TargetOnPanel)
        ));
    }

    fn fd_grad(f: impl Fn(Vec2) -> f64, x: Vec2) -> Vec2 {
        let h = 1e-6;
        Vec2::new(
            (f(Vec2::new(x.x + h, x.y)) - f(Vec2::new(x.x - h, x.y))) / (2.0 * h),
            (f(Vec2::new(x.x, x.y + h)) - f(Vec2::new(x.x, x.y - h))) / (2.0 * h),
        )
    }

    #[test]
    fn gradients_match_finite_differences() {
        let p = panel(0.2, -0.1, 0.9, 0.4);
        for x in [Vec2::new(1.3, 0.8), Vec2::new(-0.4, 0.05), Vec2::new(0.4, -0.6)] {
            let gs = grad_slp_panel(&p, x).unwrap();
            let gd = grad_dlp_panel(&p, x).unwrap();
            let pick = |w: PanelWeights, which: usize| match which {
                0 => w.constant,
                1 => w.hat_a,
                _ => w.hat_b,
            };
            for which in 0..3 {
                let fds = fd_grad(|y| pick(slp_panel(&p, y, false).unwrap(), which), x);
                let fdd = fd_grad(|y| pick(dlp_panel(&p, y, false).unwrap(), which), x);
                let (cs, cd) = match which {
                    0 => (gs.constant, gd.constant),
                    1 => (gs.hat_a, gd.hat_a),
                    _ => (gs.hat_b, gd.hat_b),
                };
                assert_relative_eq!(cs.x, fds.x, max_relative = 1e-6, epsilon = 1e-9);
                assert_relative_eq!(cs.y, fds.y, max_relative = 1e-6, epsilon = 1e-9);
                assert_relative_eq!(cd.x, fdd.x, max_relative = 1e-5, epsilon = 1e-8);
                assert_relative_eq!(cd.y, fdd.y, max_relative = 1e-5, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn cauchy_winding_and_pv() {
        let verts = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 1.0),
        ];
        let one = Complex64::new(1.0, 0.0);
        let total = |z: Complex64, pv_edge: Option<usize>| -> Complex64 {
            (0..4)
                .map(|i| {
                    cauchy_panel(verts[i], verts[(i + 1) % 4], one, one, z, pv_edge == Some(i))
                        .unwrap()
                })
                .sum()
        };
        let inside = total(Complex64::new(0.3, 0.4), None);
        assert_relative_eq!(inside.re, 1.0, max_relative = 1e-13);
        assert_relative_eq!(inside.im, 0.0, epsilon = 1e-14);
        let outside = total(Complex64::new(2.0, -0.5), None);
        assert!(outside.norm() < 1e-14);
        let boundary = total(Complex64::new(0.5, 0.0), Some(0));
        assert_relative_eq!(boundary.re, 0.5, max_relative = 1e-13);
    }

    #[test]
    fn cauchy_reproduces_identity_function() {
        // h(zeta) = zeta is panel-affine, so the integral is exact: the
        // Cauchy integral of the identity over a closed contour is z.
        let n = 7;
        let verts: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
            .collect();
        let z = Complex64::new(0.2, -0.3);
        let total: Complex64 = (0..n)
            .map(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % n]);
                cauchy_panel(a, b, a, b, z, false).unwrap()
            })
            .sum();
        assert_relative_eq!(total.re, z.re, max_relative = 1e-13);
        assert_relative_eq!(total.im, z.im, max_relative = 1e-13);
    }

    #[test]
    fn cauchy_derivative_matches_finite_difference() {
        let a = Complex64::new(0.1, -0.2);
        let b = Complex64::new(0.8, 0.3);
        let fa = Complex64::new(1.5, 0.7);
        let fb = Complex64::new(-0.4, 0.2);
        let z = Complex64::new(1.4, 1.1);
        let h = 1e-6;
        let v = |z| cauchy_panel(a, b, fa, fb, z, false).unwrap();
        let fd = (v(z + h) - v(z - h)) / (2.0 * h);
        let an = cauchy_panel_deriv(a, b, fa, fb, z).unwrap();
        assert_relative_eq!(an.re, fd.re, max_relative = 1e-7);
        assert_relative_eq!(an.im, fd.im, max_relative = 1e-7);
    }

    #[test]
    fn gauss8_integrates_degree_seven() {
        // \int_0^1 x^7 dx = 1/8, exactly integrated by the 8-point rule.
        let quad: f64 = GAUSS8.iter().map(|&(x, w)| w * x.powi(7)).sum();
        assert_relative_eq!(quad, 0.125, max_relative = 1e-14);
        let total: f64 = GAUSS8.iter().map(|&(_, w)| w).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn panel_splitting_is_additive(
            t in 0.15f64..0.85,
            xx in -2.0f64..3.0,
            xy in 0.3f64..2.0,
        ) {
            let p = panel(0.0, 0.0, 1.0, 0.0);
            let c = Vec2::new(t, 0.0);
            let left = Panel { a: p.a, b: c, ia: 0, ib: 2 };
            let right = Panel { a: c, b: p.b, ia: 2, ib: 1 };
            let x = Vec2::new(xx, xy);

            for f in [slp_panel, dlp_panel] {
                let whole = f(&p, x, false).unwrap();
                let wl = f(&left, x, false).unwrap();
                let wr = f(&right, x, false).unwrap();
                prop_assert!((whole.constant - (wl.constant + wr.constant)).abs() < 1e-12);
                // The full hat_b is linear 0 -> 1: it restricts to t * hat_b
                // on the left and t * hat_a + hat_b on the right.
                let hat_b = t * wl.hat_b + t * wr.hat_a + wr.hat_b;
                prop_assert!((whole.hat_b - hat_b).abs() < 1e-12);
            }
        }
    }
}
