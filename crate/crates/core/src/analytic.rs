//! Closed-form scalar fields used as initial conditions and oracles.

use std::f64::consts::PI;

use crate::grid::{Jet, Point};

/// A smooth scalar field that can report its value and its mixed jet.
pub trait SmoothField: Sync {
    fn value(&self, p: Point) -> f64;

    /// `(phi, d_x phi, d_y phi, d_xy phi)` at `p`.
    fn jet(&self, p: Point) -> Jet;
}

/// `cos(2 pi a x) cos(2 pi b y)`; periodic on the unit square for integer `a`, `b`.
#[derive(Clone, Copy, Debug)]
pub struct CosineProduct {
    kx: f64,
    ky: f64,
}

impl CosineProduct {
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            kx: 2.0 * PI * a,
            ky: 2.0 * PI * b,
        }
    }

    /// The efficiency benchmark's initial condition `cos(2 pi x) cos(4 pi y)`.
    pub fn benchmark() -> Self {
        Self::new(1.0, 2.0)
    }
}

impl SmoothField for CosineProduct {
    fn value(&self, p: Point) -> f64 {
        (self.kx * p[0]).cos() * (self.ky * p[1]).cos()
    }

    fn jet(&self, p: Point) -> Jet {
        let (sx, cx) = (self.kx * p[0]).sin_cos();
        let (sy, cy) = (self.ky * p[1]).sin_cos();
        Jet {
            value: cx * cy,
            dx: -self.kx * sx * cy,
            dy: -self.ky * cx * sy,
            dxy: self.kx * self.ky * sx * sy,
        }
    }
}

/// Isotropic Gaussian `exp(-k |p - c|^2)`.
#[derive(Clone, Copy, Debug)]
pub struct Gaussian {
    pub center: Point,
    pub k: f64,
}

impl Gaussian {
    /// The contour benchmark's initial condition, centred at `(0.5, 0.75)` with `k = 10`.
    pub fn contour_benchmark() -> Self {
        Self {
            center: [0.5, 0.75],
            k: 10.0,
        }
    }

    /// Level at which the zero-time contour is a circle of radius `r`.
    pub fn level_for_radius(&self, r: f64) -> f64 {
        (-self.k * r * r).exp()
    }
}

impl SmoothField for Gaussian {
    fn value(&self, p: Point) -> f64 {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        (-self.k * (dx * dx + dy * dy)).exp()
    }

    fn jet(&self, p: Point) -> Jet {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let g = (-self.k * (dx * dx + dy * dy)).exp();
        let gx = -2.0 * self.k * dx;
        let gy = -2.0 * self.k * dy;
        Jet {
            value: g,
            dx: gx * g,
            dy: gy * g,
            dxy: gx * gy * g,
        }
    }
}

/// A field assembled from four closures; handy for polynomials in tests and docs.
pub struct FnField<F, Fx, Fy, Fxy> {
    value: F,
    dx: Fx,
    dy: Fy,
    dxy: Fxy,
}

impl<F, Fx, Fy, Fxy> FnField<F, Fx, Fy, Fxy>
where
    F: Fn(Point) -> f64 + Sync,
    Fx: Fn(Point) -> f64 + Sync,
    Fy: Fn(Point) -> f64 + Sync,
    Fxy: Fn(Point) -> f64 + Sync,
{
    pub fn polynomial(value: F, dx: Fx, dy: Fy, dxy: Fxy) -> Self {
        Self { value, dx, dy, dxy }
    }
}

impl<F, Fx, Fy, Fxy> SmoothField for FnField<F, Fx, Fy, Fxy>
where
    F: Fn(Point) -> f64 + Sync,
    Fx: Fn(Point) -> f64 + Sync,
    Fy: Fn(Point) -> f64 + Sync,
    Fxy: Fn(Point) -> f64 + Sync,
{
    fn value(&self, p: Point) -> f64 {
        (self.value)(p)
    }

    fn jet(&self, p: Point) -> Jet {
        Jet {
            value: (self.value)(p),
            dx: (self.dx)(p),
            dy: (self.dy)(p),
            dxy: (self.dxy)(p),
        }
    }
}
