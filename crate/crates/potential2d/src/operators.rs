//! Galerkin boundary operators on a closed polygonal mesh.
//!
//! Discretization: traces are continuous piecewise-linear (nodal), densities
//! piecewise-constant (panel). Outer integrals use 8-point Gauss per panel,
//! inner integrals the closed forms of [`crate::kernels`]. The assembled
//! objects are
//! * `V` (panel x panel): single layer form `V[p,q] = \int_p S[1_q] ds`;
//! * `K` (panel x vertex): Neumann-Poincare form
//!   `K[p,v] = \int_p PV \int (1/2pi) <y-x, nu(y)>/|y-x|^2 hat_v(y) ds_y ds_x`;
//! * `Pi` (panel x vertex): mass pairing `\int_p hat_v ds`;
//! * `W = T' V T` (vertex x vertex): hypersingular form via the
//!   integration-by-parts identity, `T` the arclength derivative.
//!
//! Trace jumps of the crate's double layer `D` (see [`crate::kernels`]) give
//! the weak traces `\int_p tr_{i/e}(Df) = (∓Pi/2 - K) f`, and the interior /
//! exterior Poincare-Steklov (Dirichlet-to-Neumann) forms are
//! `Lambda_{i/e} = V^{-1}(Pi/2 ± K)`.
//!
//! Both discrete spaces are quotients: traces modulo constants, densities
//! modulo the `V`-kernel, and `Pi` additionally annihilates the alternating
//! vertex mode of an even closed loop. All spectral quantities are therefore
//! computed on the *visible subspace*: the span of eigenvectors of
//! `G = Pi' V^{-1} Pi` with non-negligible eigenvalues, renormalized so that
//! the reduced `G` is the identity. In that basis the trace norm
//! `|f|^2 = <V^{-1} f, f>` and the density norm `|g|^2 = <V g, g>` are both
//! Euclidean, and the Neumann-Poincare operator reduces to a single matrix
//! `A11` with `(±I/2 + K)` reducing to `A11 ± I/2`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::geometry::Vec2;
use crate::kernels::{dlp_panel, slp_panel, GAUSS8};
use crate::mesh::{BoundaryMesh, DensityFn, Panel, TraceFn};
use crate::{Error, Result};

/// Which side of the boundary an operator refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

/// Relative eigenvalue cutoff for the visible subspace of `G`.
const VISIBLE_CUTOFF: f64 = 1e-10;

/// Dimension of the resolved frequency band used for spectral suprema.
const RESOLVED_DIM: usize = 32;

/// Contraction diagnostics of the Neumann-Poincare operators `±I/2 + K` in
/// the `V^{-1}` trace norm.
#[derive(Debug, Clone, Copy)]
pub struct ContractionReport {
    /// `sup |(I/2 + K) f| / |f|`.
    pub c_plus: f64,
    /// `sup |(-I/2 + K) f| / |f|` (equivalently of `I/2 - K`).
    pub c_minus: f64,
    /// `inf |(I/2 + K) f| / |f|`; the two-sided band is
    /// `(1 - c) |f| <= |(±I/2 + K) f| <= c |f|`.
    pub lower_plus: f64,
    pub lower_minus: f64,
}

/// Convergence record of a truncated Neumann series against the direct
/// solve of `(I - A) u = f`, `A = ±I/2 + K`.
#[derive(Debug, Clone)]
pub struct NeumannReport {
    /// Contraction constant of `A`.
    pub c: f64,
    /// `|f|` in the trace norm.
    pub rhs_norm: f64,
    /// `errors[l] = |sum_{j<=l} A^j f - (I-A)^{-1} f|`.
    pub errors: Vec<f64>,
    /// A-priori remainder bounds `c^{l+1}/(1-c) |f|`.
    pub bounds: Vec<f64>,
    /// The final partial sum as a gauged trace.
    pub solution: TraceFn,
}

/// Assembled boundary operators and the visible-subspace reduction.
pub struct OperatorSet {
    pub mesh: BoundaryMesh,
    /// Single layer form, symmetric (panel x panel).
    pub v: DMatrix<f64>,
    /// Neumann-Poincare form (panel x vertex).
    pub k: DMatrix<f64>,
    /// Mass pairing (panel x vertex).
    pub pi: DMatrix<f64>,
    /// Hypersingular form, symmetric positive semidefinite (vertex x vertex).
    pub w: DMatrix<f64>,
    /// Arclength derivative (panel x vertex).
    pub t: DMatrix<f64>,
    /// Panel lengths (the arclength weight vector).
    pub lengths: DVector<f64>,
    /// LU of the augmented system `[[V, l], [l', 0]]` enforcing mean-zero
    /// densities (`l` = panel lengths); robust when `V` annihilates
    /// constants (unit-capacity boundaries).
    v_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    pi_svd: nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// Gram matrix `G = Pi' V^{-1} Pi` of the `V^{-1}` trace norm.
    g: DMatrix<f64>,
    /// Visible trace basis (`N x m`), `Wb' G Wb = I`.
    wb: DMatrix<f64>,
    /// Reduced Neumann-Poincare matrix `(Pi Wb)' V^{-1} K Wb`.
    a11: DMatrix<f64>,
    /// Reduced hypersingular form `Wb' W Wb`.
    a21: DMatrix<f64>,
    /// Resolved frequency band: the lowest eigenvectors of `sym(A21)`
    /// (`m x r`, orthonormal columns in reduced coordinates). The PL/PC
    /// Galerkin pair under-resolves near-Nyquist trace modes (the `Pi`
    /// pairing attenuates them), which inflates the hypersingular form
    /// relative to the `V^{-1}` norm by an unbounded factor; all spectral
    /// suprema are therefore taken over this fixed-size resolved band so
    /// they converge under mesh refinement.
    band: DMatrix<f64>,
    /// Gram matrices of `(±I/2 + K)` images in the `V^{-1}` norm.
    s_plus: DMatrix<f64>,
    s_minus: DMatrix<f64>,
}

impl OperatorSet {
    /// Assembles all operators on a single-loop mesh.
    pub fn assemble(mesh: BoundaryMesh) -> Result<Self> {
        if mesh.n_loops() != 1 {
            return Err(Error::MultiLoopUnsupported(mesh.n_loops()));
        }
        let n = mesh.n_panels();
        let panels: Vec<Panel> = mesh.panels().collect();

        // Row-parallel assembly with a fixed per-row summation order keeps
        // results independent of the thread count.
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut v_row = vec![0.0; n];
                let mut k_row = vec![0.0; n];
                let pp = &panels[p];
                let lp = pp.length();
                let tp = pp.tangent();
                for &(node, weight) in &GAUSS8 {
                    let x: Vec2 = pp.a + tp * (node * lp);
                    let scale = weight * lp;
                    for (q, pq) in panels.iter().enumerate() {
                        let ws = slp_panel(pq, x, true).expect("panel integral");
                        v_row[q] += scale * ws.constant;
                        let wd = dlp_panel(pq, x, true).expect("panel integral");
                        // K kernel is the negative of the D kernel.
                        k_row[pq.ia] -= scale * wd.hat_a;
                        k_row[pq.ib] -= scale * wd.hat_b;
                    }
                }
                (v_row, k_row)
            })
            .collect();

        let mut v = DMatrix::zeros(n, n);
        let mut k = DMatrix::zeros(n, n);
        for (p, (v_row, k_row)) in rows.into_iter().enumerate() {
            for q in 0..n {
                v[(p, q)] = v_row[q];
                k[(p, q)] = k_row[q];
            }
        }
        let v = (&v + v.transpose()) * 0.5;

        let mut pi = DMatrix::zeros(n, n);
        let mut t = DMatrix::zeros(n, n);
        let lengths = DVector::from_iterator(n, panels.iter().map(|p| p.length()));
        for (p, pp) in panels.iter().enumerate() {
            let half = 0.5 * pp.length();
            pi[(p, pp.ia)] += half;
            pi[(p, pp.ib)] += half;
            let inv = 1.0 / pp.length();
            t[(p, pp.ib)] += inv;
            t[(p, pp.ia)] -= inv;
        }
        let w = t.transpose() * &v * &t;

        // Augmented mean-zero solver for V.
        let mut aug = DMatrix::zeros(n + 1, n + 1);
        aug.view_mut((0, 0), (n, n)).copy_from(&v);
        for p in 0..n {
            aug[(p, n)] = lengths[p];
            aug[(n, p)] = lengths[p];
        }
        let v_lu = aug.lu();
        if !lu_is_regular(&v_lu) {
            return Err(Error::SingularV);
        }

        let pi_svd = pi.clone().svd(true, true);

        // X = V^{-1} Pi column by column, then G = Pi' X.
        let solve = |rhs: &DVector<f64>| -> DVector<f64> {
            let mut b = DVector::zeros(n + 1);
            b.rows_mut(0, n).copy_from(rhs);
            let sol = v_lu.solve(&b).expect("augmented V system");
            sol.rows(0, n).into_owned()
        };
        let mut x = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = solve(&pi.column(j).into_owned());
            x.set_column(j, &col);
        }
        let g = {
            let raw = pi.transpose() * &x;
            (&raw + raw.transpose()) * 0.5
        };

        // Visible subspace of G.
        let eig = g.clone().symmetric_eigen();
        let max_eig = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        if max_eig <= 0.0 {
            return Err(Error::SingularMass);
        }
        let kept: Vec<usize> = (0..n)
            .filter(|&i| eig.eigenvalues[i] > VISIBLE_CUTOFF * max_eig)
            .collect();
        let m = kept.len();
        let mut wb = DMatrix::zeros(n, m);
        for (jj, &i) in kept.iter().enumerate() {
            let scale = 1.0 / eig.eigenvalues[i].sqrt();
            wb.set_column(jj, &(eig.eigenvectors.column(i) * scale));
        }
        // Dual density basis `V^{-1} Pi Wb` (automatically V-orthonormal).
        let zd = &x * &wb;

        let pi_wb = &pi * &wb;
        let k_wb = &k * &wb;
        let a11 = zd.transpose() * &k_wb;
        let a21 = {
            let raw = wb.transpose() * &w * &wb;
            (&raw + raw.transpose()) * 0.5
        };

        // S± = (B± Wb)' V^{-1} (B± Wb), B± = ±Pi/2 + K.
        let mut s = [DMatrix::zeros(m, m), DMatrix::zeros(m, m)];
        for (idx, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let b_wb = &pi_wb * (0.5 * sign) + &k_wb;
            let mut u = DMatrix::zeros(n, m);
            for j in 0..m {
                u.set_column(j, &solve(&b_wb.column(j).into_owned()));
            }
            let raw = b_wb.transpose() * u;
            s[idx] = (&raw + raw.transpose()) * 0.5;
        }
        let [s_plus, s_minus] = s;

        // Resolved band: lowest modes of the hypersingular form relative to
        // the trace norm (ascending generalized frequency).
        let band = {
            let eig = a21.clone().symmetric_eigen();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&i, &j| {
                eig.eigenvalues[i]
                    .partial_cmp(&eig.eigenvalues[j])
                    .unwrap()
                    .then(i.cmp(&j))
            });
            let r = m.min(RESOLVED_DIM);
            let mut band = DMatrix::zeros(m, r);
            for (jj, &i) in order[..r].iter().enumerate() {
                band.set_column(jj, &eig.eigenvectors.column(i));
            }
            band
        };

        Ok(Self {
            mesh,
            v,
            k,
            pi,
            w,
            t,
            lengths,
            v_lu,
            pi_svd,
            g,
            wb,
            a11,
            a21,
            s_plus,
            s_minus,
            band,
        })
    }

    /// Dimension of the visible trace subspace.
    pub fn n_visible(&self) -> usize {
        self.wb.ncols()
    }

    /// Solves `V g = phi` for a mean-zero density, `phi` a panel functional.
    pub fn solve_v(&self, phi: &DVector<f64>) -> DVector<f64> {
        let n = self.v.nrows();
        let mut b = DVector::zeros(n + 1);
        b.rows_mut(0, n).copy_from(phi);
        let sol = self.v_lu.solve(&b).expect("augmented V system");
        sol.rows(0, n).into_owned()
    }

    /// Borrowed view of the underlying mesh.
    pub fn mesh(&self) -> &BoundaryMesh {
        &self.mesh
    }

    /// The density solving `V g = f` for a trace known by its panel-midpoint
    /// values (the weak functional is midpoint value times panel length).
    pub fn slp_density_from_midpoint_trace(&self, mids: &TraceFn) -> Result<DensityFn> {
        if mids.values.len() != self.mesh.n_panels() {
            return Err(Error::MeshMismatch);
        }
        let rhs = DVector::from_iterator(
            self.mesh.n_panels(),
            mids.values
                .iter()
                .zip(self.mesh.panels())
                .map(|(v, p)| v * p.length()),
        );
        let g = self.solve_v(&rhs);
        DensityFn {
            values: g.iter().cloned().collect(),
        }
        .gauge(&self.mesh)
    }

    /// The density `g = V^{-1} f` representing a trace by a single layer:
    /// `S g` has boundary trace `f` (up to the gauge).
    pub fn slp_density_from_trace(&self, f: &TraceFn) -> Result<DensityFn> {
        let fv = self.trace_vec(f)?;
        let g = self.solve_v(&(&self.pi * fv));
        DensityFn {
            values: g.iter().cloned().collect(),
        }
        .gauge(&self.mesh)
    }

    /// Dimension of the resolved frequency band.
    pub fn band_dim(&self) -> usize {
        self.band.ncols()
    }

    /// Gauged nodal trace with the given resolved-band coefficients
    /// (extra coefficients beyond the band dimension are ignored).
    pub fn band_trace(&self, coeffs: &[f64]) -> Result<TraceFn> {
        let r = self.band.ncols();
        let mut c = DVector::zeros(r);
        for (i, &v) in coeffs.iter().take(r).enumerate() {
            c[i] = v;
        }
        self.coords_to_trace(&(&self.band * c))
    }

    /// Coordinates of a trace in the visible basis.
    pub fn trace_coords(&self, f: &TraceFn) -> Result<DVector<f64>> {
        let fv = self.trace_vec(f)?;
        Ok(self.wb.transpose() * (&self.g * fv))
    }

    /// Reconstructs a gauged nodal trace from visible coordinates.
    pub fn coords_to_trace(&self, a: &DVector<f64>) -> Result<TraceFn> {
        let fv = &self.wb * a;
        TraceFn {
            values: fv.iter().cloned().collect(),
        }
        .gauge(&self.mesh)
    }

    /// Trace norm `|f| = <V^{-1} f, f>^{1/2}` (constants have norm zero).
    pub fn trace_norm(&self, f: &TraceFn) -> Result<f64> {
        let fv = self.trace_vec(f)?;
        Ok(fv.dot(&(&self.g * &fv)).max(0.0).sqrt())
    }

    /// Density norm `|g| = <V g, g>^{1/2}` on gauged densities.
    pub fn density_norm(&self, g: &DensityFn) -> Result<f64> {
        let gv = self.density_vec(g)?;
        Ok(gv.dot(&(&self.v * &gv)).max(0.0).sqrt())
    }

    /// Applies the Neumann-Poincare operator `K` to a trace; the result is
    /// recovered from its weak form by a truncated pseudo-solve of `Pi` and
    /// gauged.
    pub fn np_apply(&self, f: &TraceFn) -> Result<TraceFn> {
        let fv = self.trace_vec(f)?;
        let phi = &self.k * fv;
        let out = self.pi_pseudo_solve(&phi, false);
        TraceFn {
            values: out.iter().cloned().collect(),
        }
        .gauge(&self.mesh)
    }

    /// Applies the adjoint `K*` to a density (weak form on the vertex side,
    /// pseudo-solved through `Pi'`).
    pub fn np_adjoint_apply(&self, g: &DensityFn) -> Result<DensityFn> {
        let gv = self.density_vec(g)?;
        let psi = self.k.transpose() * gv;
        let out = self.pi_pseudo_solve(&psi, true);
        DensityFn {
            values: out.iter().cloned().collect(),
        }
        .gauge(&self.mesh)
    }

    /// Contraction band of `±I/2 + K` over the resolved subspace.
    pub fn contraction(&self) -> ContractionReport {
        let extremes = |s: &DMatrix<f64>| -> (f64, f64) {
            let sb = self.band.transpose() * s * &self.band;
            let eig = sb.symmetric_eigen();
            let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            (max.max(0.0).sqrt(), min.max(0.0).sqrt())
        };
        let (c_plus, lower_plus) = extremes(&self.s_plus);
        let (c_minus, lower_minus) = extremes(&self.s_minus);
        ContractionReport {
            c_plus,
            c_minus,
            lower_plus,
            lower_minus,
        }
    }

    /// Reduced Poincare-Steklov quadratic form of the requested side:
    /// `Q_i = I/2 + sym A11`, `Q_e = I/2 - sym A11`, with `Q_i + Q_e = I`.
    pub fn steklov_form(&self, side: Side) -> DMatrix<f64> {
        let m = self.a11.nrows();
        let sym = (&self.a11 + self.a11.transpose()) * 0.5;
        let half = DMatrix::identity(m, m) * 0.5;
        match side {
            Side::Interior => half + sym,
            Side::Exterior => half - sym,
        }
    }

    /// Dirichlet energy `<Lambda_{side} f, f>` of the harmonic extension of
    /// a trace to the requested side.
    pub fn dirichlet_energy(&self, f: &TraceFn, side: Side) -> Result<f64> {
        let a = self.trace_coords(f)?;
        Ok(a.dot(&(self.steklov_form(side) * &a)))
    }

    /// Norms of the energy-minimizing harmonic extension operators from the
    /// trace space into the interior / exterior Dirichlet energy spaces.
    pub fn extension_norms(&self) -> Result<(f64, f64)> {
        let minimum = |q: &DMatrix<f64>| -> Result<f64> {
            let eig = q.clone().symmetric_eigen();
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if min <= 0.0 {
                return Err(Error::SingularForm);
            }
            Ok(min)
        };
        let qi = self.band.transpose() * self.steklov_form(Side::Interior) * &self.band;
        let qe = self.band.transpose() * self.steklov_form(Side::Exterior) * &self.band;
        Ok((
            (1.0 / minimum(&qi)?).sqrt(),
            (1.0 / minimum(&qe)?).sqrt(),
        ))
    }

    /// Truncated Neumann series for `(I - A) u = f` with `A = ±I/2 + K`
    /// (`plus` selects the sign), compared against the direct solve.
    pub fn neumann_series(&self, f: &TraceFn, plus: bool, terms: usize) -> Result<NeumannReport> {
        let r = self.band.ncols();
        let half = DMatrix::identity(r, r) * if plus { 0.5 } else { -0.5 };
        let a_hat = self.band.transpose() * &self.a11 * &self.band + half;
        let con = self.contraction();
        let c = if plus { con.c_plus } else { con.c_minus };
        if c >= 1.0 {
            return Err(Error::NotContractive(c));
        }

        let rhs = self.band.transpose() * self.trace_coords(f)?;
        let rhs_norm = rhs.norm();
        let system = DMatrix::identity(r, r) - &a_hat;
        let direct = system
            .lu()
            .solve(&rhs)
            .ok_or(Error::NotContractive(c))?;

        let mut partial = rhs.clone();
        let mut term = rhs.clone();
        let mut errors = vec![(&partial - &direct).norm()];
        let mut bounds = vec![c / (1.0 - c) * rhs_norm];
        for l in 1..=terms {
            term = &a_hat * term;
            partial += &term;
            errors.push((&partial - &direct).norm());
            bounds.push(c.powi(l as i32 + 1) / (1.0 - c) * rhs_norm);
        }
        let solution = self.coords_to_trace(&(&self.band * &partial))?;
        Ok(NeumannReport {
            c,
            rhs_norm,
            errors,
            bounds,
            solution,
        })
    }

    /// Band-compressed Calderon remainder matrix `M` with `C_{i/e} = I/2 ± M`
    /// acting on resolved coordinates of Cauchy data `(trace, density)`.
    /// Blockwise `M = [[K, V], [W, -K*]]`; its square is `I/4` in the
    /// continuum (`K^2 + VW = 1/4` and the Plemelj identity `KV = VK*`).
    fn calderon_m(&self) -> DMatrix<f64> {
        let r = self.band.ncols();
        let a11_b = self.band.transpose() * &self.a11 * &self.band;
        let a21_b = self.band.transpose() * &self.a21 * &self.band;
        let mut out = DMatrix::zeros(2 * r, 2 * r);
        out.view_mut((0, 0), (r, r)).copy_from(&a11_b);
        out.view_mut((0, r), (r, r))
            .copy_from(&DMatrix::identity(r, r));
        out.view_mut((r, 0), (r, r)).copy_from(&a21_b);
        out.view_mut((r, r), (r, r))
            .copy_from(&(-a11_b.transpose()));
        out
    }

    /// Idempotence defect `|C_i^2 - C_i| = |M^2 - I/4|` of the Calderon
    /// projector over the resolved band, in the operator norm of the product
    /// metric (`V^{-1}` on traces, `V` on densities).
    pub fn calderon_residual(&self) -> f64 {
        let m2 = {
            let m = self.calderon_m();
            &m * &m
        };
        let dim = m2.nrows();
        let res = m2 - DMatrix::identity(dim, dim) * 0.25;
        spectral_norm(&res)
    }

    /// Applies the Calderon projector of the requested side to Cauchy data,
    /// returning gauged nodal data.
    pub fn calderon_apply(
        &self,
        f: &TraceFn,
        g: &DensityFn,
        side: Side,
    ) -> Result<(TraceFn, DensityFn)> {
        let fv = self.trace_vec(f)?;
        let gv = self.density_vec(g)?;
        let phi = &self.k * &fv + &self.v * &gv;
        let psi = &self.w * &fv - self.k.transpose() * &gv;
        let sign = match side {
            Side::Interior => 1.0,
            Side::Exterior => -1.0,
        };
        let f_out = &fv * 0.5 + self.pi_pseudo_solve(&phi, false) * sign;
        let g_out = &gv * 0.5 + self.pi_pseudo_solve(&psi, true) * sign;
        Ok((
            TraceFn {
                values: f_out.iter().cloned().collect(),
            }
            .gauge(&self.mesh)?,
            DensityFn {
                values: g_out.iter().cloned().collect(),
            }
            .gauge(&self.mesh)?,
        ))
    }

    fn trace_vec(&self, f: &TraceFn) -> Result<DVector<f64>> {
        if f.values.len() != self.mesh.n_vertices() {
            return Err(Error::MeshMismatch);
        }
        Ok(DVector::from_iterator(
            f.values.len(),
            f.values.iter().cloned(),
        ))
    }

    fn density_vec(&self, g: &DensityFn) -> Result<DVector<f64>> {
        if g.values.len() != self.mesh.n_panels() {
            return Err(Error::MeshMismatch);
        }
        Ok(DVector::from_iterator(
            g.values.len(),
            g.values.iter().cloned(),
        ))
    }

    /// Truncated-SVD pseudo-solve of `Pi x = b` (or `Pi' x = b`).
    fn pi_pseudo_solve(&self, b: &DVector<f64>, transpose: bool) -> DVector<f64> {
        let sv = &self.pi_svd.singular_values;
        let max_sv = sv.iter().cloned().fold(0.0, f64::max);
        let cutoff = 1e-10 * max_sv;
        let u = self.pi_svd.u.as_ref().expect("svd with u");
        let vt = self.pi_svd.v_t.as_ref().expect("svd with v_t");
        // Pi = U S V'; Pi^+ b = V S^+ U' b, (Pi')^+ b = U S^+ V b.
        let proj = if transpose { vt * b } else { u.transpose() * b };
        let mut scaled = DVector::zeros(sv.len());
        for i in 0..sv.len() {
            if sv[i] > cutoff {
                scaled[i] = proj[i] / sv[i];
            }
        }
        if transpose {
            u * scaled
        } else {
            vt.transpose() * scaled
        }
    }
}

fn lu_is_regular(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> bool {
    let m = lu.lu_internal();
    let n = m.nrows().min(m.ncols());
    (0..n).all(|i| m[(i, i)].abs() > 1e-300)
}

/// Spectral norm via the symmetric eigenproblem of `X' X`.
fn spectral_norm(x: &DMatrix<f64>) -> f64 {
    let sym = x.transpose() * x;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .sqrt()
}
