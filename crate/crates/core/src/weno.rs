//! Third-order WENO finite differences for `phi_t = -u d_x phi - v d_y phi`,
//! advanced with the three-stage SSP Runge-Kutta method.
//!
//! Each derivative uses four points along its axis: two upwind, the node
//! itself and one downwind. The two second-order candidates
//!
//! ```text
//! d0 = (phi_p - phi_m) / 2h            (central)
//! d1 = (3 phi_0 - 4 phi_m + phi_mm) / 2h   (one-sided upwind)
//! ```
//!
//! combine with linear weights 2/3, 1/3 into the third-order upwind-biased
//! formula. The limited variant replaces the linear weights by
//! `gamma_k / (eps + beta_k)^2` (normalised) with smoothness indicators
//! `beta0 = (phi_p - phi_0)^2`, `beta1 = (phi_0 - phi_m)^2`.

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::jet::step_count;
use crate::velocity::VelocityField;

const GAMMA: [f64; 2] = [2.0 / 3.0, 1.0 / 3.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WenoConfig {
    pub limited: bool,
    /// Regulariser in the nonlinear weights.
    pub eps: f64,
}

impl Default for WenoConfig {
    fn default() -> Self {
        Self::limited()
    }
}

impl WenoConfig {
    pub fn limited() -> Self {
        Self {
            limited: true,
            eps: 1e-6,
        }
    }

    /// Linear weights only: a linear third-order upwind-biased scheme.
    pub fn unlimited() -> Self {
        Self {
            limited: false,
            eps: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "WENO epsilon {} must be positive",
                self.eps
            )))
        }
    }
}

/// Nonlinear weights `(w0, w1)` for the central and upwind candidates.
pub fn limited_weights(phi_m: f64, phi_0: f64, phi_p: f64, eps: f64) -> [f64; 2] {
    let b0 = (phi_p - phi_0) * (phi_p - phi_0);
    let b1 = (phi_0 - phi_m) * (phi_0 - phi_m);
    let a0 = GAMMA[0] / ((eps + b0) * (eps + b0));
    let a1 = GAMMA[1] / ((eps + b1) * (eps + b1));
    let s = a0 + a1;
    [a0 / s, a1 / s]
}

/// Upwind-biased derivative at offset 0 from values at offsets -2, -1, 0, +1,
/// where the negative direction is upwind.
#[inline]
pub fn weno3_derivative(
    phi_mm: f64,
    phi_m: f64,
    phi_0: f64,
    phi_p: f64,
    h: f64,
    cfg: &WenoConfig,
) -> f64 {
    if !cfg.limited {
        return (2.0 * phi_p + 3.0 * phi_0 - 6.0 * phi_m + phi_mm) / (6.0 * h);
    }
    let d0 = (phi_p - phi_m) / (2.0 * h);
    let d1 = (3.0 * phi_0 - 4.0 * phi_m + phi_mm) / (2.0 * h);
    let [w0, w1] = limited_weights(phi_m, phi_0, phi_p, cfg.eps);
    w0 * d0 + w1 * d1
}

/// Derivative along one axis, with the stencil mirrored for negative speed.
/// `s(k)` returns the value at offset `k`.
#[inline]
fn upwind_derivative(speed: f64, h: f64, cfg: &WenoConfig, s: impl Fn(isize) -> f64) -> f64 {
    if speed >= 0.0 {
        weno3_derivative(s(-2), s(-1), s(0), s(1), h, cfg)
    } else {
        -weno3_derivative(s(2), s(1), s(0), s(-1), h, cfg)
    }
}

/// Semi-discrete right-hand side `-v . grad phi`, one velocity evaluation per node.
pub fn rhs(field: &ScalarField, t: f64, v: &VelocityField, cfg: &WenoConfig) -> ScalarField {
    let grid = *field.grid();
    let h = grid.h();
    let mut out = ScalarField::zeros(grid);
    for k in 0..grid.len() {
        let [i, j] = grid.node(k);
        let (i, j) = (i as isize, j as isize);
        let w = v.eval(grid.node_position(i, j), t);
        let dx = upwind_derivative(w[0], h, cfg, |o| field.at(i + o, j));
        let dy = upwind_derivative(w[1], h, cfg, |o| field.at(i, j + o));
        out.values[k] = -w[0] * dx - w[1] * dy;
    }
    out
}

/// Three-stage SSP Runge-Kutta (Shu-Osher) step.
pub fn ssp_rk3_step(
    field: &ScalarField,
    t: f64,
    dt: f64,
    v: &VelocityField,
    cfg: &WenoConfig,
) -> Result<ScalarField> {
    let u = &field.values;
    let l0 = rhs(field, t, v, cfg);
    let mut u1 = field.clone();
    for (k, x) in u1.values.iter_mut().enumerate() {
        *x = u[k] + dt * l0.values[k];
    }
    let l1 = rhs(&u1, t + dt, v, cfg);
    let mut u2 = field.clone();
    for (k, x) in u2.values.iter_mut().enumerate() {
        *x = 0.75 * u[k] + 0.25 * u1.values[k] + 0.25 * dt * l1.values[k];
    }
    let l2 = rhs(&u2, t + 0.5 * dt, v, cfg);
    let mut out = field.clone();
    for (k, x) in out.values.iter_mut().enumerate() {
        *x = u[k] / 3.0 + 2.0 / 3.0 * u2.values[k] + 2.0 / 3.0 * dt * l2.values[k];
    }
    if let Some(k) = out.values.iter().position(|x| !x.is_finite()) {
        let [i, j] = field.grid().node(k);
        return Err(Error::NonFinite {
            scheme: if cfg.limited { "weno" } else { "weno-nolimit" },
            location: format!("node ({i}, {j})"),
            time: t + dt,
        });
    }
    Ok(out)
}

/// Advance from `t0` to `t_end` with steps of `dt`, shortening the last one.
pub fn advance(
    field: &ScalarField,
    t0: f64,
    t_end: f64,
    dt: f64,
    v: &VelocityField,
    cfg: &WenoConfig,
) -> Result<(ScalarField, usize)> {
    cfg.validate()?;
    if dt <= 0.0 {
        return Err(Error::Config(format!("time step {dt} must be positive")));
    }
    let steps = step_count(t_end - t0, dt);
    let mut current = field.clone();
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        let this_dt = if n + 1 == steps { t_end - t } else { dt };
        current = ssp_rk3_step(&current, t, this_dt, v, cfg)?;
    }
    Ok((current, steps))
}
