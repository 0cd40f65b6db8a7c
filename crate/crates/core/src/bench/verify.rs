//! Self-checks of the building blocks against independent oracles.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::analytic::{CosineProduct, FnField, Gaussian, SmoothField};
use crate::dg::{DgSolver, Triangulation};
use crate::grid::{Grid, Jet, JetField, Point};
use crate::hermite::{interpolate, project};
use crate::jet::{step_analytic, step_epsfd, DEFAULT_EPS};
use crate::velocity::VelocityField;
use crate::weno::{weno3_derivative, WenoConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// `sum c[m][n] x^m y^n` with `m, n <= 3`.
#[derive(Clone, Copy, Debug)]
pub struct Bicubic {
    pub c: [[f64; 4]; 4],
}

impl Bicubic {
    pub fn random(rng: &mut impl Rng) -> Self {
        Self {
            c: std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))),
        }
    }

    /// `d^a/dx^a d^b/dy^b` at `p`.
    pub fn partial(&self, a: usize, b: usize, p: Point) -> f64 {
        self.partial_with(a, b, p, |c| c)
    }

    /// The same partial with every term taken in absolute value; the natural
    /// scale for its rounding error.
    pub fn partial_magnitude(&self, a: usize, b: usize, p: Point) -> f64 {
        self.partial_with(a, b, [p[0].abs(), p[1].abs()], f64::abs)
    }

    fn partial_with(&self, a: usize, b: usize, p: Point, coeff: impl Fn(f64) -> f64) -> f64 {
        // d^k/dx^k x^m = m!/(m-k)! x^(m-k)
        let falling = |m: usize, k: usize| -> f64 { ((m - k + 1)..=m).map(|f| f as f64).product() };
        let mut s = 0.0;
        for m in a..4 {
            for n in b..4 {
                s += coeff(self.c[m][n])
                    * falling(m, a)
                    * falling(n, b)
                    * p[0].powi((m - a) as i32)
                    * p[1].powi((n - b) as i32);
            }
        }
        s
    }
}

impl SmoothField for Bicubic {
    fn value(&self, p: Point) -> f64 {
        self.partial(0, 0, p)
    }

    fn jet(&self, p: Point) -> Jet {
        Jet {
            value: self.partial(0, 0, p),
            dx: self.partial(1, 0, p),
            dy: self.partial(0, 1, p),
            dxy: self.partial(1, 1, p),
        }
    }
}

/// Worst deviation of the Hermite interpolant (value and all first and
/// second partials) from random bi-cubics, in units of machine epsilon
/// times the rounding scale of each quantity: the magnitude of its terms, or
/// of the node data divided by `h^k` for a `k`-th derivative if larger.
pub fn bicubic_reproduction(trials: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let grid = Grid::unit(4).expect("valid grid");
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = Bicubic::random(&mut rng);
        let field = JetField::sample(grid, &f);
        for _ in 0..10 {
            // stay inside the square so periodic wrap is not exercised
            let p = [rng.random_range(0.0..0.75), rng.random_range(0.0..0.75)];
            let e = interpolate(&field, p);
            let got = [e.value, e.dx, e.dy, e.dxx, e.dxy, e.dyy];
            let orders = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
            for (g, (a, b)) in got.into_iter().zip(orders) {
                // a k-th derivative of the interpolant divides node data by h^k
                let amplified = f.partial_magnitude(0, 0, p) / grid.h().powi((a + b) as i32);
                let scale = f.partial_magnitude(a, b, p).max(amplified).max(1.0) * f64::EPSILON;
                worst = worst.max((g - f.partial(a, b, p)).abs() / scale);
            }
        }
    }
    worst
}

/// Largest `|weno(x^3) - 3 x0^2|` over random points and spacings.
pub fn weno_cubic_exactness(trials: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let cfg = WenoConfig::unlimited();
    (0..trials)
        .map(|_| {
            let x0: f64 = rng.random_range(-1.0..1.0);
            let h: f64 = rng.random_range(0.01..0.1);
            let f = |x: f64| x * x * x;
            let d = weno3_derivative(f(x0 - 2.0 * h), f(x0 - h), f(x0), f(x0 + h), h, &cfg);
            (d - 3.0 * x0 * x0).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest coefficient of the DG time derivative of a constant field under
/// a constant velocity.
pub fn dg_constant_rhs(cells: usize) -> f64 {
    let solver =
        DgSolver::new(Triangulation::with_cells(cells).expect("valid mesh")).expect("valid solver");
    let one = solver.project(&FnField::polynomial(|_| 1.0, |_| 0.0, |_| 0.0, |_| 0.0));
    let v = VelocityField::constant([0.8, -0.35]);
    solver
        .rhs(&one, 0.0, &v)
        .coeffs
        .iter()
        .flatten()
        .fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Relative change of the DG mass over `steps` swirl steps from a Gaussian.
pub fn dg_mass_drift(cells: usize, steps: usize) -> f64 {
    let solver =
        DgSolver::new(Triangulation::with_cells(cells).expect("valid mesh")).expect("valid solver");
    let mut field = solver.project(&Gaussian::contour_benchmark());
    let v = VelocityField::swirl(1.0);
    let m0 = solver.mass(&field);
    let dt = solver.max_stable_dt();
    for k in 0..steps {
        field = solver
            .ssp_rk3_step(&field, k as f64 * dt, dt, &v)
            .expect("stable step");
    }
    ((solver.mass(&field) - m0) / m0).abs()
}

/// Max difference of the value arrays after one swirl step of the two jet variants.
pub fn epsfd_one_step_difference(n: usize) -> f64 {
    let grid = Grid::unit(n).expect("valid grid");
    let field = JetField::sample(grid, &CosineProduct::benchmark());
    let v = VelocityField::swirl(1.0);
    let h = grid.h();
    let a = step_analytic(&field, 0.0, h, &v).expect("finite step");
    let b = step_epsfd(&field, 0.0, h, DEFAULT_EPS, &v).expect("finite step");
    a.value
        .iter()
        .zip(&b.value)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Largest change of any jet component under re-projection of random fields.
pub fn projection_idempotence(trials: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let mut field =
                JetField::zeros(Grid::unit(rng.random_range(3..12)).expect("valid grid"));
            for arr in [
                &mut field.value,
                &mut field.dx,
                &mut field.dy,
                &mut field.dxy,
            ] {
                arr.iter_mut()
                    .for_each(|x| *x = rng.random_range(-10.0..10.0));
            }
            project(&field).max_abs_diff(&field)
        })
        .fold(0.0, f64::max)
}

/// The full suite run by `advectlab verify`.
pub fn run_checks(seed: u64) -> Vec<Check> {
    vec![
        Check {
            name: "swirl derivatives match central differences",
            value: VelocityField::swirl(1.0).verify_derivatives(100, seed),
            tolerance: 1e-6,
        },
        Check {
            name: "constant velocity has zero derivatives",
            value: VelocityField::constant([2.0, 3.0]).verify_derivatives(10, seed),
            tolerance: 0.0,
        },
        Check {
            name: "Hermite interpolation reproduces bi-cubics (units of eps)",
            value: bicubic_reproduction(20, seed),
            tolerance: 100.0,
        },
        Check {
            name: "projection is idempotent",
            value: projection_idempotence(10, seed),
            tolerance: 0.0,
        },
        Check {
            name: "unlimited WENO3 is exact on cubics",
            value: weno_cubic_exactness(100, seed),
            tolerance: 1e-12,
        },
        Check {
            name: "DG rhs of a constant field vanishes",
            value: dg_constant_rhs(8),
            tolerance: 1e-12,
        },
        Check {
            name: "DG mass is conserved over 20 swirl steps",
            value: dg_mass_drift(8, 20),
            tolerance: 1e-12,
        },
        Check {
            name: "eps-FD and analytic jet steps agree (h = 1/40)",
            value: epsfd_one_step_difference(40),
            tolerance: 1e-6,
        },
    ]
}
