//! Third-order jet schemes: semi-Lagrangian transport of `(phi, grad phi, d_xy phi)`
//! followed by bi-cubic Hermite projection.
//!
//! Characteristics are traced backwards over one step with the three-stage
//! Shu-Osher Runge-Kutta method. Two ways of obtaining the derivative data
//! at the arrival node are provided:
//!
//! * [`step_analytic`] differentiates the Runge-Kutta stages with respect to
//!   the arrival point and applies the chain rule to the interpolant;
//! * [`step_epsfd`] traces four characteristics offset by `+-eps` and
//!   differences the transported values.

use crate::error::{Error, Result};
use crate::grid::{Grid, Jet, JetField, Point};
use crate::hermite::CellJet;
use crate::velocity::{Mat2, Vec2, VelocityField};

/// Default offset for the epsilon finite differences, roughly the fourth
/// root of double precision round-off.
pub const DEFAULT_EPS: f64 = 1e-4;

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// Which derivative update a jet scheme uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JetVariant {
    Analytic,
    EpsFd { eps: f64 },
}

/// A Runge-Kutta stage position with its first derivatives (Jacobian
/// `grad[a][b] = d_b x_a`) and mixed second derivative with respect to the
/// arrival point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stage {
    pub point: Point,
    pub grad: Mat2,
    pub dxy: Vec2,
}

/// Backward trace from a node at `t + dt` to its foot at `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceResult {
    pub x1: Stage,
    pub x2: Stage,
    pub foot: Stage,
}

#[inline]
fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

#[inline]
fn mat_vec(a: &Mat2, v: Vec2) -> Vec2 {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// `((d_x x)^T (d_y x)) : D^2 f = sum_{c,d} (d_x x)_c (d_y x)_d d_cd f`
/// where `d_x x` and `d_y x` are the columns of the stage Jacobian.
#[inline]
fn contract(grad: &Mat2, hess: &Mat2) -> f64 {
    let mut acc = 0.0;
    for c in 0..2 {
        for d in 0..2 {
            acc += grad[c][0] * grad[d][1] * hess[c][d];
        }
    }
    acc
}

/// Foot point of the backward characteristic through `x` at `t + dt`.
pub fn trace_foot(x: Point, t: f64, dt: f64, v: &VelocityField) -> Point {
    let w = v.eval(x, t + dt);
    let x1 = [x[0] - dt * w[0], x[1] - dt * w[1]];
    let w = v.eval(x1, t);
    let x2 = [
        0.75 * x[0] + 0.25 * x1[0] - 0.25 * dt * w[0],
        0.75 * x[1] + 0.25 * x1[1] - 0.25 * dt * w[1],
    ];
    let w = v.eval(x2, t + 0.5 * dt);
    [
        x[0] / 3.0 + 2.0 / 3.0 * x2[0] - 2.0 / 3.0 * dt * w[0],
        x[1] / 3.0 + 2.0 / 3.0 * x2[1] - 2.0 / 3.0 * dt * w[1],
    ]
}

/// [`trace_foot`] together with the derivatives of every stage with respect to `x`.
pub fn trace_with_derivatives(x: Point, t: f64, dt: f64, v: &VelocityField) -> TraceResult {
    // x1 = x - dt v(x, t + dt)
    let t1 = t + dt;
    let w = v.eval(x, t1);
    let jv = v.jacobian(x, t1);
    let dv = v.dxy(x, t1);
    let x1 = Stage {
        point: [x[0] - dt * w[0], x[1] - dt * w[1]],
        grad: [
            [1.0 - dt * jv[0][0], -dt * jv[0][1]],
            [-dt * jv[1][0], 1.0 - dt * jv[1][1]],
        ],
        dxy: [-dt * dv[0], -dt * dv[1]],
    };

    // x2 = 3/4 x + 1/4 x1 - 1/4 dt v(x1, t)
    let x2 = combine(x, &x1, 0.75, 0.25, dt, t, v);
    // foot = 1/3 x + 2/3 x2 - 2/3 dt v(x2, t + dt/2)
    let foot = combine(x, &x2, 1.0 / 3.0, 2.0 / 3.0, dt, t + 0.5 * dt, v);
    TraceResult { x1, x2, foot }
}

/// `a x + b s - b dt v(s, t)` and its derivatives, for a previous stage `s`.
#[inline]
fn combine(x: Point, s: &Stage, a: f64, b: f64, dt: f64, t: f64, v: &VelocityField) -> Stage {
    let w = v.eval(s.point, t);
    let jv = v.jacobian(s.point, t);
    let hv = v.hessian(s.point, t);
    let bdt = b * dt;

    let jg = mat_mul(&jv, &s.grad);
    let mut grad = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            grad[r][c] = a * IDENTITY[r][c] + b * s.grad[r][c] - bdt * jg[r][c];
        }
    }

    // d_xy [v_a(s(x))] = grad v_a . d_xy s + (d_x s)^T D^2 v_a (d_y s)
    let chain = mat_vec(&jv, s.dxy);
    let dxy = [
        b * s.dxy[0] - bdt * (chain[0] + contract(&s.grad, &hv[0])),
        b * s.dxy[1] - bdt * (chain[1] + contract(&s.grad, &hv[1])),
    ];

    Stage {
        point: [
            a * x[0] + b * s.point[0] - bdt * w[0],
            a * x[1] + b * s.point[1] - bdt * w[1],
        ],
        grad,
        dxy,
    }
}

fn non_finite(grid: &Grid, k: usize, t: f64, scheme: &'static str) -> Error {
    let [i, j] = grid.node(k);
    Error::NonFinite {
        scheme,
        location: format!("node ({i}, {j})"),
        time: t,
    }
}

/// One jet-scheme step from `t` to `t + dt` with analytic derivative tracking.
pub fn step_analytic(field: &JetField, t: f64, dt: f64, v: &VelocityField) -> Result<JetField> {
    let grid = *field.grid();
    let mut out = JetField::zeros(grid);
    for k in 0..grid.len() {
        let [i, j] = grid.node(k);
        let x = grid.node_position(i as isize, j as isize);
        let tr = trace_with_derivatives(x, t, dt, v);
        let foot = &tr.foot;

        let loc = grid.locate_cell(foot.point);
        let h = CellJet::from_field(field, loc.cell[0], loc.cell[1]).eval_local(loc.local);
        let g = foot.grad;
        let jet = Jet {
            value: h.value,
            // d_b phi = sum_c d_c H (d_b foot)_c
            dx: h.dx * g[0][0] + h.dy * g[1][0],
            dy: h.dx * g[0][1] + h.dy * g[1][1],
            dxy: h.dx * foot.dxy[0] + h.dy * foot.dxy[1] + contract(&g, &h.hessian()),
        };
        if !jet.is_finite() {
            return Err(non_finite(&grid, k, t + dt, "jet-analytic"));
        }
        out.set(k, jet);
    }
    Ok(out)
}

/// Sign pattern of the four offset characteristics, in the order
/// `(1,1), (-1,1), (1,-1), (-1,-1)`.
const OFFSETS: [[f64; 2]; 4] = [[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]];

/// One jet-scheme step with epsilon finite-difference derivative tracking.
///
/// All four feet are evaluated with the single cell containing their centre
/// of mass, extrapolating that cell's bi-cubic if a foot lies just outside.
pub fn step_epsfd(
    field: &JetField,
    t: f64,
    dt: f64,
    eps: f64,
    v: &VelocityField,
) -> Result<JetField> {
    let grid = *field.grid();
    let h = grid.h();
    if !(eps > 0.0 && eps < 0.5 * h) {
        return Err(Error::Config(format!(
            "epsilon {eps} must lie in (0, h/2) = (0, {})",
            0.5 * h
        )));
    }
    let mut out = JetField::zeros(grid);
    for k in 0..grid.len() {
        let [i, j] = grid.node(k);
        let x = grid.node_position(i as isize, j as isize);

        let mut feet = [[0.0; 2]; 4];
        for (foot, q) in feet.iter_mut().zip(OFFSETS.iter()) {
            *foot = trace_foot([x[0] + q[0] * eps, x[1] + q[1] * eps], t, dt, v);
        }
        // bring every foot into the period copy of the first one
        let first = feet[0];
        for foot in feet.iter_mut().skip(1) {
            for a in 0..2 {
                foot[a] -= (foot[a] - first[a]).round();
            }
        }
        let com = [
            0.25 * (feet[0][0] + feet[1][0] + feet[2][0] + feet[3][0]),
            0.25 * (feet[0][1] + feet[1][1] + feet[2][1] + feet[3][1]),
        ];
        let loc = grid.locate_cell(com);
        let mut cell = CellJet::from_field(field, loc.cell[0], loc.cell[1]);
        // cell origin in the same period copy as the centre of mass
        for a in 0..2 {
            let approx = com[a] - loc.local[a] * h;
            cell.origin[a] += (approx - cell.origin[a]).round();
        }

        let [p11, pm1, p1m, pmm] = feet.map(|f| cell.value_local(cell.local(f)));
        let jet = Jet {
            value: 0.25 * (p11 + pm1 + p1m + pmm),
            dx: (p11 - pm1 + p1m - pmm) / (4.0 * eps),
            dy: (p11 + pm1 - p1m - pmm) / (4.0 * eps),
            dxy: (p11 - pm1 - p1m + pmm) / (4.0 * eps * eps),
        };
        if !jet.is_finite() {
            return Err(non_finite(&grid, k, t + dt, "jet-epsfd"));
        }
        out.set(k, jet);
    }
    Ok(out)
}

/// One step of the chosen variant.
pub fn step(
    field: &JetField,
    variant: JetVariant,
    t: f64,
    dt: f64,
    v: &VelocityField,
) -> Result<JetField> {
    match variant {
        JetVariant::Analytic => step_analytic(field, t, dt, v),
        JetVariant::EpsFd { eps } => step_epsfd(field, t, dt, eps, v),
    }
}

/// Number of steps of size `dt` needed to cover `span`, the last one possibly shortened.
pub fn step_count(span: f64, dt: f64) -> usize {
    if span <= 0.0 {
        return 0;
    }
    // tolerate round-off in span / dt landing just above an integer
    (span / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Advance from `t0` to `t_end` with steps of `dt`, shortening the last one.
///
/// Returns the final field and the number of steps taken.
pub fn advance(
    field: &JetField,
    variant: JetVariant,
    t0: f64,
    t_end: f64,
    dt: f64,
    v: &VelocityField,
) -> Result<(JetField, usize)> {
    if dt <= 0.0 {
        return Err(Error::Config(format!("time step {dt} must be positive")));
    }
    let steps = step_count(t_end - t0, dt);
    let mut current = field.clone();
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        let this_dt = if n + 1 == steps { t_end - t } else { dt };
        current = step(&current, variant, t, this_dt, v)?;
    }
    Ok((current, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{CosineProduct, FnField};
    use crate::velocity::RigidRotation;

    #[test]
    fn constant_velocity_trace_is_exact() {
        let v = VelocityField::constant([1.0, 0.0]);
        let foot = trace_foot([0.5, 0.5], 0.0, 0.1, &v);
        assert!((foot[0] - 0.4).abs() < 1e-15 && foot[1] == 0.5);
        assert_eq!(v.evals(), 3);
        let tr = trace_with_derivatives([0.5, 0.5], 0.0, 0.1, &v);
        assert_eq!(tr.foot.grad, IDENTITY);
        assert_eq!(tr.foot.dxy, [0.0, 0.0]);
    }

    #[test]
    fn trace_near_flow_reversal_barely_moves() {
        let v = VelocityField::swirl(1.0);
        let dt = 1e-4;
        let foot = trace_foot([0.3, 0.6], 0.5 - dt, dt, &v);
        assert!((foot[0] - 0.3).abs() < 1e-6 && (foot[1] - 0.6).abs() < 1e-6);
    }

    #[test]
    fn trace_is_fourth_order_locally() {
        let rot = RigidRotation {
            center: [0.5, 0.5],
            omega: 1.0,
        };
        let v = VelocityField::new(rot);
        let x = [0.8, 0.55];
        let err = |dt: f64| {
            let foot = trace_foot(x, 0.0, dt, &v);
            let exact = rot.exact(x, dt, 0.0);
            ((foot[0] - exact[0]).powi(2) + (foot[1] - exact[1]).powi(2)).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((14.0..=18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn trace_derivatives_match_finite_differences() {
        let v = VelocityField::swirl(1.0);
        let x = [0.31, 0.62];
        let (t, dt) = (0.2, 0.05);
        let tr = trace_with_derivatives(x, t, dt, &v);
        let d = 1e-4;
        let f = |a: f64, b: f64| trace_foot([x[0] + a, x[1] + b], t, dt, &v);
        for comp in 0..2 {
            let gx = (f(d, 0.0)[comp] - f(-d, 0.0)[comp]) / (2.0 * d);
            let gy = (f(0.0, d)[comp] - f(0.0, -d)[comp]) / (2.0 * d);
            let gxy =
                (f(d, d)[comp] - f(-d, d)[comp] - f(d, -d)[comp] + f(-d, -d)[comp]) / (4.0 * d * d);
            assert!((tr.foot.grad[comp][0] - gx).abs() < 1e-7);
            assert!((tr.foot.grad[comp][1] - gy).abs() < 1e-7);
            assert!(
                (tr.foot.dxy[comp] - gxy).abs() < 1e-5,
                "{} {}",
                tr.foot.dxy[comp],
                gxy
            );
        }
    }

    #[test]
    fn aligned_constant_transport_is_a_shift() {
        let grid = Grid::unit(16).unwrap();
        let field = JetField::sample(grid, &CosineProduct::benchmark());
        let v = VelocityField::constant([1.0, 0.0]);
        for variant in [JetVariant::Analytic, JetVariant::EpsFd { eps: 1e-4 }] {
            let next = step(&field, variant, 0.0, grid.h(), &v).unwrap();
            // epsilon differencing carries an O(eps^2) bias, e.g. eps^2/2 lap(H) in the value
            let tol = match variant {
                JetVariant::Analytic => [1e-13, 1e-12, 1e-12, 1e-11],
                JetVariant::EpsFd { .. } => [2e-6, 1e-4, 1e-4, 1e-2],
            };
            for k in 0..grid.len() {
                let [i, j] = grid.node(k);
                let src = field.get(grid.index(i as isize - 1, j as isize));
                let got = next.get(k);
                assert!((got.value - src.value).abs() < tol[0], "{variant:?}");
                assert!((got.dx - src.dx).abs() < tol[1], "{variant:?}");
                assert!((got.dy - src.dy).abs() < tol[2], "{variant:?}");
                assert!((got.dxy - src.dxy).abs() < tol[3], "{variant:?}");
            }
        }
    }

    #[test]
    fn zero_velocity_is_identity() {
        let grid = Grid::unit(10).unwrap();
        let field = JetField::sample(grid, &CosineProduct::benchmark());
        let v = VelocityField::constant([0.0, 0.0]);
        let a = step_analytic(&field, 0.0, 0.1, &v).unwrap();
        assert!(a.max_abs_diff(&field) < 1e-13);
    }

    #[test]
    fn epsfd_is_exact_on_linear_data_at_rest() {
        let grid = Grid::unit(8).unwrap();
        let lin = FnField::polynomial(|p: Point| p[0] + 2.0 * p[1], |_| 1.0, |_| 2.0, |_| 0.0);
        let field = JetField::sample(grid, &lin);
        let v = VelocityField::constant([0.0, 0.0]);
        for eps in [1e-2, 1e-3, 1e-4] {
            let out = step_epsfd(&field, 0.0, 0.1, eps, &v).unwrap();
            // the periodic wrap breaks linearity next to the boundary
            for k in 0..grid.len() {
                let [i, j] = grid.node(k);
                if i == 0 || j == 0 || i == grid.n() - 1 || j == grid.n() - 1 {
                    continue;
                }
                let (a, b) = (out.get(k), field.get(k));
                assert!((a.value - b.value).abs() < 1e-14);
                assert!((a.dx - b.dx).abs() < 1e-10 / eps);
                assert!((a.dy - b.dy).abs() < 1e-10 / eps);
                assert!(a.dxy.abs() < 1e-14 / (eps * eps));
            }
        }
    }

    #[test]
    fn epsfd_counts_twelve_evaluations_per_node() {
        let grid = Grid::unit(6).unwrap();
        let field = JetField::sample(grid, &CosineProduct::benchmark());
        let v = VelocityField::swirl(1.0);
        step_epsfd(&field, 0.0, grid.h(), 1e-4, &v).unwrap();
        assert_eq!(v.evals(), 12 * 36);
        v.reset_evals();
        step_analytic(&field, 0.0, grid.h(), &v).unwrap();
        assert_eq!(v.evals(), 3 * 36);
    }

    #[test]
    fn epsfd_rejects_bad_epsilon() {
        let grid = Grid::unit(4).unwrap();
        let field = JetField::zeros(grid);
        let v = VelocityField::constant([0.0, 0.0]);
        assert!(step_epsfd(&field, 0.0, 0.1, 0.2, &v).is_err());
        assert!(step_epsfd(&field, 0.0, 0.1, 0.0, &v).is_err());
    }

    #[test]
    fn non_finite_data_aborts() {
        let grid = Grid::unit(4).unwrap();
        let mut field = JetField::zeros(grid);
        field.value[5] = f64::NAN;
        let v = VelocityField::constant([0.0, 0.0]);
        let err = step_analytic(&field, 0.0, 0.1, &v).unwrap_err();
        assert!(err.is_abort());
        assert!(err.to_string().contains("node"));
    }

    #[test]
    fn advance_loop_contract() {
        let grid = Grid::unit(8).unwrap();
        let field = JetField::sample(grid, &CosineProduct::benchmark());
        let v = VelocityField::swirl(1.0);
        let (same, steps) = advance(&field, JetVariant::Analytic, 0.3, 0.3, 0.125, &v).unwrap();
        assert_eq!(steps, 0);
        assert_eq!(same, field);
        assert_eq!(step_count(1.0, 1.0 / 40.0), 40);
        assert_eq!(step_count(1.0, 1.0 / 3.0), 3);
        assert_eq!(step_count(1.0, 0.3), 4);
        let (_, steps) = advance(&field, JetVariant::Analytic, 0.0, 1.0, 0.3, &v).unwrap();
        assert_eq!(steps, 4);
    }
}
