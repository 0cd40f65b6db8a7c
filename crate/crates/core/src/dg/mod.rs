//! Discontinuous Galerkin P2 discretization of `phi_t + div(v phi) = 0`
//! for divergence-free `v`, with an upwind flux and SSP RK3 time stepping.
//!
//! For every triangle `K` and test function `psi`:
//!
//! ```text
//! d/dt int_K phi psi = int_K phi v . grad psi - int_{dK} phi_up (v . n) psi
//! ```
//!
//! Volume integrals use a 7-point degree-5 rule, edge integrals 3-point
//! Gauss-Legendre with the edge centre as one of its points. The upwind side
//! is chosen at each edge Gauss point from the sign of `v . n` there.
//!
//! No slope limiter is applied.

mod basis;
mod mesh;

pub use basis::{edge_rule, p2_gradients, p2_values, triangle_rule, TriPoint, P2_NODES};
pub use mesh::{Edge, Triangle, Triangulation};

use nalgebra::{Matrix6, Vector6};

use crate::analytic::SmoothField;
use crate::error::{Error, Result};
use crate::grid::{Grid, Point};
use crate::jet::step_count;
use crate::velocity::VelocityField;

/// CFL safety constant `c` in `dt < h / (c (2k + 1))`.
pub const CFL_CONSTANT: f64 = 2.0;
/// Polynomial degree.
pub const DEGREE: usize = 2;

/// Per-element nodal P2 coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DGField {
    pub coeffs: Vec<[f64; 6]>,
}

impl DGField {
    pub fn zeros(elements: usize) -> Self {
        Self {
            coeffs: vec![[0.0; 6]; elements],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.is_finite())
    }

    fn axpy(&mut self, a: f64, x: &DGField) {
        for (c, d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            for (ci, di) in c.iter_mut().zip(d) {
                *ci += a * di;
            }
        }
    }

    fn scale(&mut self, a: f64) {
        for c in self.coeffs.iter_mut().flatten() {
            *c *= a;
        }
    }
}

/// Edge data precomputed for the flux integral.
#[derive(Clone, Debug)]
struct EdgeQuadrature {
    points: [Point; 3],
    /// Gauss weight times edge length.
    weights: [f64; 3],
    left_basis: [[f64; 6]; 3],
    right_basis: [[f64; 6]; 3],
}

/// Mesh plus everything the semi-discrete operator needs.
#[derive(Clone, Debug)]
pub struct DgSolver {
    mesh: Triangulation,
    rule: [TriPoint; 7],
    basis_at_qp: [[f64; 6]; 7],
    /// Physical basis gradients at each volume quadrature point, per element.
    grads_at_qp: Vec<[[[f64; 2]; 6]; 7]>,
    qp_points: Vec<[Point; 7]>,
    /// Inverse of the area-one mass matrix; element inverse is this over the area.
    unit_mass_inverse: Matrix6<f64>,
    edges: Vec<EdgeQuadrature>,
    cell_grid: Grid,
}

/// Reference coordinates in `tri` of the point at parameter `s` along `e`.
fn edge_reference(tri: &Triangle, e: &Edge, s: f64) -> [f64; 2] {
    let a = tri
        .corner_reference(e.vertices[0])
        .expect("edge endpoint is a corner");
    let b = tri
        .corner_reference(e.vertices[1])
        .expect("edge endpoint is a corner");
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Reference-space mass matrix scaled to unit element area.
pub fn unit_mass_matrix() -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    for qp in triangle_rule() {
        let n = p2_values(qp.rs);
        for i in 0..6 {
            for j in 0..6 {
                m[(i, j)] += qp.weight * n[i] * n[j];
            }
        }
    }
    m
}

impl DgSolver {
    pub fn new(mesh: Triangulation) -> Result<Self> {
        let rule = triangle_rule();
        let basis_at_qp = rule.map(|qp| p2_values(qp.rs));
        let ref_grads = rule.map(|qp| p2_gradients(qp.rs));

        let mut grads_at_qp = Vec::with_capacity(mesh.triangles().len());
        let mut qp_points = Vec::with_capacity(mesh.triangles().len());
        for tri in mesh.triangles() {
            let j = tri.jacobian();
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            // J^{-T}
            let inv_t = [
                [j[1][1] / det, -j[1][0] / det],
                [-j[0][1] / det, j[0][0] / det],
            ];
            let mut g = [[[0.0; 2]; 6]; 7];
            for q in 0..7 {
                for i in 0..6 {
                    let r = ref_grads[q][i];
                    g[q][i] = [
                        inv_t[0][0] * r[0] + inv_t[0][1] * r[1],
                        inv_t[1][0] * r[0] + inv_t[1][1] * r[1],
                    ];
                }
            }
            grads_at_qp.push(g);
            qp_points.push(rule.map(|qp| tri.physical(qp.rs)));
        }

        let unit_mass_inverse = unit_mass_matrix()
            .try_inverse()
            .ok_or_else(|| Error::Mesh("singular P2 mass matrix".into()))?;

        let tris = mesh.triangles();
        let edges = mesh
            .edges()
            .iter()
            .map(|e| {
                let rule = edge_rule();
                let points = rule.map(|(s, _)| e.point_at(s));
                let weights = rule.map(|(_, w)| w * e.length);
                let left = &tris[e.left];
                let right = &tris[e.right];
                let left_basis = rule.map(|(s, _)| p2_values(edge_reference(left, e, s)));
                let right_basis = rule.map(|(s, _)| p2_values(edge_reference(right, e, s)));
                EdgeQuadrature {
                    points,
                    weights,
                    left_basis,
                    right_basis,
                }
            })
            .collect();

        let cell_grid = Grid::unit(mesh.cells_per_side())?;
        Ok(Self {
            mesh,
            rule,
            basis_at_qp,
            grads_at_qp,
            qp_points,
            unit_mass_inverse,
            edges,
            cell_grid,
        })
    }

    pub fn mesh(&self) -> &Triangulation {
        &self.mesh
    }

    pub fn elements(&self) -> usize {
        self.mesh.triangles().len()
    }

    /// Largest step allowed by `dt <= h / (c (2k + 1))`, with `h` the shortest height.
    pub fn max_stable_dt(&self) -> f64 {
        self.mesh.min_height() / (CFL_CONSTANT * (2 * DEGREE + 1) as f64)
    }

    /// Element mass matrix of triangle `k`.
    pub fn mass_matrix(&self, k: usize) -> Matrix6<f64> {
        unit_mass_matrix() * self.mesh.triangles()[k].area
    }

    fn apply_inverse_mass(&self, k: usize, r: [f64; 6]) -> [f64; 6] {
        let x = self.unit_mass_inverse * Vector6::from(r) / self.mesh.triangles()[k].area;
        [x[0], x[1], x[2], x[3], x[4], x[5]]
    }

    /// Element-wise L2 projection computed with the volume quadrature.
    pub fn project<F: SmoothField + ?Sized>(&self, f: &F) -> DGField {
        let mut out = DGField::zeros(self.elements());
        for (k, tri) in self.mesh.triangles().iter().enumerate() {
            let mut b = [0.0; 6];
            for q in 0..7 {
                let w = self.rule[q].weight * tri.area * f.value(self.qp_points[k][q]);
                for i in 0..6 {
                    b[i] += w * self.basis_at_qp[q][i];
                }
            }
            out.coeffs[k] = self.apply_inverse_mass(k, b);
        }
        out
    }

    /// Time derivative of the coefficients.
    ///
    /// Counts `7` velocity evaluations per element and `3` per edge.
    pub fn rhs(&self, field: &DGField, t: f64, v: &VelocityField) -> DGField {
        let tris = self.mesh.triangles();
        let mut residual = vec![[0.0; 6]; tris.len()];

        for (k, tri) in tris.iter().enumerate() {
            let c = &field.coeffs[k];
            let r = &mut residual[k];
            for q in 0..7 {
                let phi: f64 = (0..6).map(|i| c[i] * self.basis_at_qp[q][i]).sum();
                let w = v.eval(self.qp_points[k][q], t);
                let scale = self.rule[q].weight * tri.area * phi;
                for i in 0..6 {
                    let g = self.grads_at_qp[k][q][i];
                    r[i] += scale * (w[0] * g[0] + w[1] * g[1]);
                }
            }
        }

        for (e, eq) in self.mesh.edges().iter().zip(&self.edges) {
            let w = eq.points.map(|p| v.eval(p, t));
            let vn = w.map(|w| w[0] * e.normal[0] + w[1] * e.normal[1]);
            let (cl, cr) = (&field.coeffs[e.left], &field.coeffs[e.right]);
            let mut fl = [0.0; 6];
            let mut fr = [0.0; 6];
            for g in 0..3 {
                let phi_up: f64 = if vn[g] >= 0.0 {
                    (0..6).map(|i| cl[i] * eq.left_basis[g][i]).sum()
                } else {
                    (0..6).map(|i| cr[i] * eq.right_basis[g][i]).sum()
                };
                let flux = phi_up * vn[g] * eq.weights[g];
                for i in 0..6 {
                    fl[i] += flux * eq.left_basis[g][i];
                    fr[i] += flux * eq.right_basis[g][i];
                }
            }
            for i in 0..6 {
                residual[e.left][i] -= fl[i];
                residual[e.right][i] += fr[i];
            }
        }

        DGField {
            coeffs: residual
                .into_iter()
                .enumerate()
                .map(|(k, r)| self.apply_inverse_mass(k, r))
                .collect(),
        }
    }

    /// Three-stage SSP Runge-Kutta step; rejects steps above [`Self::max_stable_dt`].
    pub fn ssp_rk3_step(
        &self,
        field: &DGField,
        t: f64,
        dt: f64,
        v: &VelocityField,
    ) -> Result<DGField> {
        let limit = self.max_stable_dt();
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit });
        }
        let mut u1 = field.clone();
        u1.axpy(dt, &self.rhs(field, t, v));

        let mut u2 = field.clone();
        u2.scale(0.75);
        u2.axpy(0.25, &u1);
        u2.axpy(0.25 * dt, &self.rhs(&u1, t + dt, v));

        let l2 = self.rhs(&u2, t + 0.5 * dt, v);
        let mut out = field.clone();
        out.scale(1.0 / 3.0);
        out.axpy(2.0 / 3.0, &u2);
        out.axpy(2.0 / 3.0 * dt, &l2);

        if let Some(k) = out
            .coeffs
            .iter()
            .position(|c| c.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::NonFinite {
                scheme: "dg",
                location: format!("element {k}"),
                time: t + dt,
            });
        }
        Ok(out)
    }

    /// Advance from `t0` to `t_end` with steps of `dt`, shortening the last one.
    pub fn advance(
        &self,
        field: &DGField,
        t0: f64,
        t_end: f64,
        dt: f64,
        v: &VelocityField,
    ) -> Result<(DGField, usize)> {
        let steps = step_count(t_end - t0, dt);
        let mut current = field.clone();
        for n in 0..steps {
            let t = t0 + n as f64 * dt;
            let this_dt = if n + 1 == steps { t_end - t } else { dt };
            current = self.ssp_rk3_step(&current, t, this_dt, v)?;
        }
        Ok((current, steps))
    }

    /// `int_Omega phi_h` by the volume quadrature.
    pub fn mass(&self, field: &DGField) -> f64 {
        let tris = self.mesh.triangles();
        field
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                (0..7)
                    .map(|q| {
                        let phi: f64 = (0..6).map(|i| c[i] * self.basis_at_qp[q][i]).sum();
                        self.rule[q].weight * phi
                    })
                    .sum::<f64>()
                    * tris[k].area
            })
            .sum()
    }

    /// Value of element `k`'s polynomial at `p` (translated to the element's period copy).
    pub fn eval_in_element(&self, field: &DGField, k: usize, p: Point) -> f64 {
        let tri = &self.mesh.triangles()[k];
        let n = p2_values(tri.reference_coords(tri.unwrap_point(p)));
        (0..6).map(|i| field.coeffs[k][i] * n[i]).sum()
    }

    /// Triangle containing `p`; on shared edges and vertices the lowest index wins.
    pub fn locate(&self, p: Point) -> usize {
        let loc = self.cell_grid.locate_cell(p);
        let [i, j] = loc.cell;
        let [s, t] = loc.local;
        let m = self.mesh.cells_per_side();
        let (il, jl) = ((i + m - 1) % m, (j + m - 1) % m);
        let mut candidates = Vec::with_capacity(6);
        if t <= s {
            candidates.push(self.mesh.triangle_index(i, j, false));
        }
        if t >= s {
            candidates.push(self.mesh.triangle_index(i, j, true));
        }
        if s == 0.0 {
            candidates.push(self.mesh.triangle_index(il, j, false));
        }
        if t == 0.0 {
            candidates.push(self.mesh.triangle_index(i, jl, true));
        }
        if s == 0.0 && t == 0.0 {
            candidates.push(self.mesh.triangle_index(il, jl, false));
            candidates.push(self.mesh.triangle_index(il, jl, true));
        }
        candidates
            .into_iter()
            .min()
            .expect("point lies in some triangle")
    }

    /// Piecewise-quadratic solution at `p`.
    pub fn eval(&self, field: &DGField, p: Point) -> f64 {
        self.eval_in_element(field, self.locate(p), p)
    }

    /// Sample points `(element, point)` on a `per_side` barycentric lattice of every element.
    pub fn sample_points(&self, per_side: usize) -> Vec<(usize, Point)> {
        let n = per_side.max(1);
        let mut out = Vec::new();
        for (k, tri) in self.mesh.triangles().iter().enumerate() {
            for a in 0..=n {
                for b in 0..=(n - a) {
                    out.push((k, tri.physical([a as f64 / n as f64, b as f64 / n as f64])));
                }
            }
        }
        out
    }

    /// Max over elements of `|phi_h - f|` on a `per_side` lattice per element.
    pub fn linf_error<F: SmoothField + ?Sized>(
        &self,
        field: &DGField,
        f: &F,
        per_side: usize,
    ) -> f64 {
        self.sample_points(per_side)
            .into_iter()
            .map(|(k, p)| (self.eval_in_element(field, k, p) - f.value(p)).abs())
            .fold(0.0, f64::max)
    }

    /// `int_e |phi_left - phi_right|` over edge `e`, by the edge quadrature.
    pub fn edge_jump(&self, field: &DGField, e: usize) -> f64 {
        let edge = &self.mesh.edges()[e];
        let eq = &self.edges[e];
        let (cl, cr) = (&field.coeffs[edge.left], &field.coeffs[edge.right]);
        (0..3)
            .map(|g| {
                let l: f64 = (0..6).map(|i| cl[i] * eq.left_basis[g][i]).sum();
                let r: f64 = (0..6).map(|i| cr[i] * eq.right_basis[g][i]).sum();
                (l - r).abs() * eq.weights[g]
            })
            .sum()
    }
}
