//! Velocity fields with analytic first and second spatial derivatives.
//!
//! Matrices follow the Jacobian convention: `jacobian[a][b] = d_b v_a`, and
//! `hessian[a][b][c] = d_b d_c v_a`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::grid::Point;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// A velocity field `v(x, t)` with exact derivatives.
pub trait Flow: Send + Sync {
    fn velocity(&self, p: Point, t: f64) -> Vec2;

    fn jacobian(&self, p: Point, t: f64) -> Mat2;

    /// Second derivatives of each component.
    fn hessian(&self, p: Point, t: f64) -> [Mat2; 2];
}

/// A [`Flow`] together with a counter of velocity evaluations.
///
/// Only [`VelocityField::eval`] is counted; derivative evaluations are free,
/// matching the cost model which counts evaluations of the velocity itself.
pub struct VelocityField {
    flow: Box<dyn Flow>,
    evals: AtomicU64,
}

impl std::fmt::Debug for VelocityField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VelocityField")
            .field("evals", &self.evals())
            .finish_non_exhaustive()
    }
}

impl VelocityField {
    pub fn new(flow: impl Flow + 'static) -> Self {
        Self {
            flow: Box::new(flow),
            evals: AtomicU64::new(0),
        }
    }

    /// Vortex-in-a-box: swirls for `t < period/2` and unswirls back to the start at `t = period`.
    pub fn swirl(period: f64) -> Self {
        assert!(period > 0.0, "swirl period must be positive");
        Self::new(Swirl { period })
    }

    pub fn constant(c: Vec2) -> Self {
        Self::new(Constant(c))
    }

    /// Solid-body rotation about `center` with angular speed `omega`.
    pub fn rigid_rotation(center: Point, omega: f64) -> Self {
        Self::new(RigidRotation { center, omega })
    }

    #[inline]
    pub fn eval(&self, p: Point, t: f64) -> Vec2 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.flow.velocity(p, t)
    }

    #[inline]
    pub fn jacobian(&self, p: Point, t: f64) -> Mat2 {
        self.flow.jacobian(p, t)
    }

    #[inline]
    pub fn hessian(&self, p: Point, t: f64) -> [Mat2; 2] {
        self.flow.hessian(p, t)
    }

    /// `d_xy v`.
    pub fn dxy(&self, p: Point, t: f64) -> Vec2 {
        let h = self.flow.hessian(p, t);
        [h[0][0][1], h[1][0][1]]
    }

    /// Number of counted evaluations so far.
    pub fn evals(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset_evals(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }

    /// Worst relative discrepancy between the analytic derivatives and
    /// central differences (step `1e-5`) at `n` random points in
    /// `[0,1]^2 x [0,1]`.
    ///
    /// Each entry's error is scaled by `max(1, |analytic entry|)`.
    pub fn verify_derivatives(&self, n: usize, seed: u64) -> f64 {
        let d = 1e-5;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut compare = |exact: f64, approx: f64| {
            let err = (exact - approx).abs() / exact.abs().max(1.0);
            worst = worst.max(err);
        };
        for _ in 0..n.max(1) {
            let p = [rng.random::<f64>(), rng.random::<f64>()];
            let t = rng.random::<f64>();
            let jac = self.flow.jacobian(p, t);
            let hess = self.flow.hessian(p, t);
            for b in 0..2 {
                let mut plus = p;
                let mut minus = p;
                plus[b] += d;
                minus[b] -= d;
                let vp = self.flow.velocity(plus, t);
                let vm = self.flow.velocity(minus, t);
                let jp = self.flow.jacobian(plus, t);
                let jm = self.flow.jacobian(minus, t);
                for a in 0..2 {
                    compare(jac[a][b], (vp[a] - vm[a]) / (2.0 * d));
                    for c in 0..2 {
                        // d_b (d_c v_a)
                        compare(hess[a][b][c], (jp[a][c] - jm[a][c]) / (2.0 * d));
                    }
                }
            }
        }
        worst
    }
}

/// `cos(pi t / T) (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y))`.
#[derive(Clone, Copy, Debug)]
pub struct Swirl {
    pub period: f64,
}

struct SwirlTrig {
    time: f64,
    s1x: f64,
    s2x: f64,
    c2x: f64,
    s1y: f64,
    s2y: f64,
    c2y: f64,
}

impl Swirl {
    #[inline]
    fn trig(&self, p: Point, t: f64) -> SwirlTrig {
        let (sx, cx) = (PI * p[0]).sin_cos();
        let (sy, cy) = (PI * p[1]).sin_cos();
        SwirlTrig {
            time: (PI * t / self.period).cos(),
            s1x: sx,
            s2x: 2.0 * sx * cx,
            c2x: cx * cx - sx * sx,
            s1y: sy,
            s2y: 2.0 * sy * cy,
            c2y: cy * cy - sy * sy,
        }
    }
}

impl Flow for Swirl {
    fn velocity(&self, p: Point, t: f64) -> Vec2 {
        let s = self.trig(p, t);
        [
            s.time * s.s1x * s.s1x * s.s2y,
            -s.time * s.s2x * s.s1y * s.s1y,
        ]
    }

    fn jacobian(&self, p: Point, t: f64) -> Mat2 {
        let s = self.trig(p, t);
        let c = s.time;
        [
            [c * PI * s.s2x * s.s2y, c * 2.0 * PI * s.s1x * s.s1x * s.c2y],
            [
                -c * 2.0 * PI * s.c2x * s.s1y * s.s1y,
                -c * PI * s.s2x * s.s2y,
            ],
        ]
    }

    fn hessian(&self, p: Point, t: f64) -> [Mat2; 2] {
        let s = self.trig(p, t);
        let c = s.time * PI * PI;
        let uxx = c * 2.0 * s.c2x * s.s2y;
        let uxy = c * 2.0 * s.s2x * s.c2y;
        let uyy = -c * 4.0 * s.s1x * s.s1x * s.s2y;
        let vxx = c * 4.0 * s.s2x * s.s1y * s.s1y;
        let vxy = -c * 2.0 * s.c2x * s.s2y;
        let vyy = -c * 2.0 * s.s2x * s.c2y;
        [[[uxx, uxy], [uxy, uyy]], [[vxx, vxy], [vxy, vyy]]]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub Vec2);

impl Flow for Constant {
    fn velocity(&self, _p: Point, _t: f64) -> Vec2 {
        self.0
    }

    fn jacobian(&self, _p: Point, _t: f64) -> Mat2 {
        [[0.0; 2]; 2]
    }

    fn hessian(&self, _p: Point, _t: f64) -> [Mat2; 2] {
        [[[0.0; 2]; 2]; 2]
    }
}

/// `omega (-(y - cy), x - cx)`; not periodic, used for trace accuracy checks.
#[derive(Clone, Copy, Debug)]
pub struct RigidRotation {
    pub center: Point,
    pub omega: f64,
}

impl RigidRotation {
    /// Exact position at time `t1` of the particle at `p` at time `t0`.
    pub fn exact(&self, p: Point, t0: f64, t1: f64) -> Point {
        let (s, c) = (self.omega * (t1 - t0)).sin_cos();
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        [
            self.center[0] + c * dx - s * dy,
            self.center[1] + s * dx + c * dy,
        ]
    }
}

impl Flow for RigidRotation {
    fn velocity(&self, p: Point, _t: f64) -> Vec2 {
        [
            -self.omega * (p[1] - self.center[1]),
            self.omega * (p[0] - self.center[0]),
        ]
    }

    fn jacobian(&self, _p: Point, _t: f64) -> Mat2 {
        [[0.0, -self.omega], [self.omega, 0.0]]
    }

    fn hessian(&self, _p: Point, _t: f64) -> [Mat2; 2] {
        [[[0.0; 2]; 2]; 2]
    }
}
