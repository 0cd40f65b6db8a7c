//! Bi-cubic Hermite interpolation of grid jets.
//!
//! On a cell `[a, a+h] x [b, b+h]` the interpolant is
//!
//! ```text
//! H(x, y) = sum_{q, alpha} phi^q_alpha h^(alpha1 + alpha2) w^q1_alpha1((x-a)/h) w^q2_alpha2((y-b)/h)
//! ```
//!
//! with corners `q in {0,1}^2` and derivative slots `alpha in {0,1}^2`
//! (value, `d_x`, `d_y`, `d_xy`). Node data is kept in physical units; the
//! powers of `h` are folded into the one-dimensional tables so that the
//! interpolant evaluated at a node returns that node's data bit-for-bit.

use crate::grid::{Grid, Jet, JetField, Point};

/// Univariate cubic Hermite basis `w^q_alpha(x)`.
///
/// ```
/// use advectlab::hermite::basis_1d;
/// assert_eq!(basis_1d(0, 0, 0.0), 1.0);
/// assert_eq!(basis_1d(1, 0, 0.5), 0.125);
/// ```
pub fn basis_1d(alpha: usize, q: usize, x: f64) -> f64 {
    let x2 = x * x;
    let x3 = x2 * x;
    match (alpha, q) {
        (0, 0) => 1.0 - 3.0 * x2 + 2.0 * x3,
        (0, 1) => 3.0 * x2 - 2.0 * x3,
        (1, 0) => x - 2.0 * x2 + x3,
        (1, 1) => -x2 + x3,
        _ => panic!("Hermite basis index out of range: alpha={alpha}, q={q}"),
    }
}

/// Value, first and second derivative of `w^q_alpha`.
#[inline]
fn basis_with_derivatives(alpha: usize, q: usize, x: f64) -> [f64; 3] {
    let x2 = x * x;
    match (alpha, q) {
        (0, 0) => [
            1.0 - 3.0 * x2 + 2.0 * x2 * x,
            -6.0 * x + 6.0 * x2,
            -6.0 + 12.0 * x,
        ],
        (0, 1) => [3.0 * x2 - 2.0 * x2 * x, 6.0 * x - 6.0 * x2, 6.0 - 12.0 * x],
        (1, 0) => [
            x - 2.0 * x2 + x2 * x,
            1.0 - 4.0 * x + 3.0 * x2,
            -4.0 + 6.0 * x,
        ],
        _ => [-x2 + x2 * x, -2.0 * x + 3.0 * x2, -2.0 + 6.0 * x],
    }
}

/// One axis worth of scaled basis values, indexed `[q][alpha]`.
///
/// `v = h^alpha w`, `d1 = h^(alpha-1) w'`, `d2 = h^(alpha-2) w''`: the
/// physical-space value and derivatives of each scaled basis function.
#[derive(Clone, Copy, Debug)]
struct AxisTable {
    v: [[f64; 2]; 2],
    d1: [[f64; 2]; 2],
    d2: [[f64; 2]; 2],
}

impl AxisTable {
    fn new(s: f64, h: f64) -> Self {
        let inv = 1.0 / h;
        let mut t = AxisTable {
            v: [[0.0; 2]; 2],
            d1: [[0.0; 2]; 2],
            d2: [[0.0; 2]; 2],
        };
        for q in 0..2 {
            let [w, dw, ddw] = basis_with_derivatives(0, q, s);
            t.v[q][0] = w;
            t.d1[q][0] = dw * inv;
            t.d2[q][0] = ddw * inv * inv;
            let [w, dw, ddw] = basis_with_derivatives(1, q, s);
            t.v[q][1] = w * h;
            t.d1[q][1] = dw;
            t.d2[q][1] = ddw * inv;
        }
        t
    }
}

/// Interpolant value with all first and second partial derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HermiteEval {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

impl HermiteEval {
    pub fn gradient(&self) -> [f64; 2] {
        [self.dx, self.dy]
    }

    pub fn hessian(&self) -> [[f64; 2]; 2] {
        [[self.dxx, self.dxy], [self.dxy, self.dyy]]
    }
}

/// The sixteen data values defining one cell's bi-cubic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellJet {
    /// `data[q1 + 2 q2][alpha1 + 2 alpha2]`; slot order is value, `d_x`, `d_y`, `d_xy`.
    pub data: [[f64; 4]; 4],
    pub origin: Point,
    pub h: f64,
}

impl CellJet {
    /// Corner jets in the order `(0,0), (1,0), (0,1), (1,1)`.
    pub fn from_corners(corners: [Jet; 4], origin: Point, h: f64) -> Self {
        let mut data = [[0.0; 4]; 4];
        for (slot, jet) in data.iter_mut().zip(corners.iter()) {
            *slot = [jet.value, jet.dx, jet.dy, jet.dxy];
        }
        Self { data, origin, h }
    }

    /// Cell `(ci, cj)` of a periodic jet field.
    pub fn from_field(field: &JetField, ci: usize, cj: usize) -> Self {
        let grid = field.grid();
        let (i, j) = (ci as isize, cj as isize);
        let corners = [
            field.get(grid.index(i, j)),
            field.get(grid.index(i + 1, j)),
            field.get(grid.index(i, j + 1)),
            field.get(grid.index(i + 1, j + 1)),
        ];
        Self::from_corners(corners, grid.node_position(i, j), grid.h())
    }

    /// Local coordinates of `p`; not clamped, so points outside extrapolate.
    #[inline]
    pub fn local(&self, p: Point) -> [f64; 2] {
        [
            (p[0] - self.origin[0]) / self.h,
            (p[1] - self.origin[1]) / self.h,
        ]
    }

    /// Interpolant and all partials up to second order at local coordinates.
    pub fn eval_local(&self, local: [f64; 2]) -> HermiteEval {
        let tx = AxisTable::new(local[0], self.h);
        let ty = AxisTable::new(local[1], self.h);
        let mut out = HermiteEval::default();
        for q2 in 0..2 {
            for q1 in 0..2 {
                let d = &self.data[q1 + 2 * q2];
                for a2 in 0..2 {
                    for a1 in 0..2 {
                        let c = d[a1 + 2 * a2];
                        let (xv, xd, xdd) = (tx.v[q1][a1], tx.d1[q1][a1], tx.d2[q1][a1]);
                        let (yv, yd, ydd) = (ty.v[q2][a2], ty.d1[q2][a2], ty.d2[q2][a2]);
                        out.value += c * xv * yv;
                        out.dx += c * xd * yv;
                        out.dy += c * xv * yd;
                        out.dxx += c * xdd * yv;
                        out.dxy += c * xd * yd;
                        out.dyy += c * xv * ydd;
                    }
                }
            }
        }
        out
    }

    /// Interpolant value only.
    pub fn value_local(&self, local: [f64; 2]) -> f64 {
        let mut xv = [[0.0; 2]; 2];
        let mut yv = [[0.0; 2]; 2];
        for q in 0..2 {
            xv[q] = [basis_1d(0, q, local[0]), self.h * basis_1d(1, q, local[0])];
            yv[q] = [basis_1d(0, q, local[1]), self.h * basis_1d(1, q, local[1])];
        }
        let mut acc = 0.0;
        for q2 in 0..2 {
            for q1 in 0..2 {
                let d = &self.data[q1 + 2 * q2];
                for a2 in 0..2 {
                    for a1 in 0..2 {
                        acc += d[a1 + 2 * a2] * xv[q1][a1] * yv[q2][a2];
                    }
                }
            }
        }
        acc
    }

    pub fn eval(&self, p: Point) -> HermiteEval {
        self.eval_local(self.local(p))
    }

    /// `d_xxyy H` at local coordinates; bilinear over the cell.
    pub fn dxxyy_local(&self, local: [f64; 2]) -> f64 {
        let tx = AxisTable::new(local[0], self.h);
        let ty = AxisTable::new(local[1], self.h);
        let mut acc = 0.0;
        for q2 in 0..2 {
            for q1 in 0..2 {
                let d = &self.data[q1 + 2 * q2];
                for a2 in 0..2 {
                    for a1 in 0..2 {
                        acc += d[a1 + 2 * a2] * tx.d2[q1][a1] * ty.d2[q2][a2];
                    }
                }
            }
        }
        acc
    }

    /// `int_cell (d_xxyy H)^2`; a 2x2 Gauss rule is exact for the bilinear-squared integrand.
    pub fn stability_integral(&self) -> f64 {
        let g = 0.5 / 3f64.sqrt();
        let nodes = [0.5 - g, 0.5 + g];
        let mut acc = 0.0;
        for &s in &nodes {
            for &t in &nodes {
                let v = self.dxxyy_local([s, t]);
                acc += 0.25 * v * v;
            }
        }
        acc * self.h * self.h
    }
}

/// The global piecewise bi-cubic interpolant at an arbitrary point.
pub fn interpolate(field: &JetField, p: Point) -> HermiteEval {
    let loc = field.grid().locate_cell(p);
    CellJet::from_field(field, loc.cell[0], loc.cell[1]).eval_local(loc.local)
}

/// Value of the global interpolant at `p`.
pub fn interpolate_value(field: &JetField, p: Point) -> f64 {
    let loc = field.grid().locate_cell(p);
    CellJet::from_field(field, loc.cell[0], loc.cell[1]).value_local(loc.local)
}

/// Re-sample the global interpolant's jet at every node.
///
/// The node data defines the interpolant, so this returns its input; it
/// exists to make the projection explicit and testable.
pub fn project(field: &JetField) -> JetField {
    let grid: Grid = *field.grid();
    let mut out = JetField::zeros(grid);
    for k in 0..grid.len() {
        let [i, j] = grid.node(k);
        let e = CellJet::from_field(field, i, j).eval_local([0.0, 0.0]);
        out.set(
            k,
            Jet {
                value: e.value,
                dx: e.dx,
                dy: e.dy,
                dxy: e.dxy,
            },
        );
    }
    out
}

/// `int_Omega (d_xxyy H_phi)^2` over the periodic unit square.
pub fn stability_functional(field: &JetField) -> f64 {
    let grid = field.grid();
    (0..grid.len())
        .map(|k| {
            let [i, j] = grid.node(k);
            CellJet::from_field(field, i, j).stability_integral()
        })
        .sum()
}
