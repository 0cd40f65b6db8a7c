//! Periodic Cartesian grid on the unit square and node-based field storage.
//!
//! Nodes sit at `(i h, j h)` for `0 <= i, j < n`; node `(n, j)` is node
//! `(0, j)`. Cell `(i, j)` is the square with lower-left corner at node
//! `(i, j)`. Field arrays are stored row-major: index `j * n + i`.

use crate::analytic::SmoothField;
use crate::error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// Uniform periodic grid on `[0, 1)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

/// Cell index and local coordinates `(xi, eta)` in `[0, 1)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellLocation {
    pub cell: [usize; 2],
    pub local: [f64; 2],
}

impl Grid {
    /// Grid with `n` cells per axis, `h = 1/n`.
    pub fn unit(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config(
                "grid needs at least one cell per axis".into(),
            ));
        }
        Ok(Self {
            n,
            h: 1.0 / n as f64,
        })
    }

    /// Grid with spacing `h`; `1/h` must be an integer (to round-off).
    pub fn with_spacing(h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::Config(format!("grid spacing {h} outside (0, 1]")));
        }
        let n = (1.0 / h).round();
        if (n * h - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "grid spacing {h} does not tile the unit square"
            )));
        }
        Self::unit(n as usize)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Flat index of node `(i, j)`, wrapped periodically.
    #[inline]
    pub fn index(&self, i: isize, j: isize) -> usize {
        let n = self.n as isize;
        (j.rem_euclid(n) * n + i.rem_euclid(n)) as usize
    }

    /// Node indices of flat index `k`.
    #[inline]
    pub fn node(&self, k: usize) -> [usize; 2] {
        [k % self.n, k / self.n]
    }

    pub fn node_position(&self, i: isize, j: isize) -> Point {
        let n = self.n as isize;
        [
            i.rem_euclid(n) as f64 * self.h,
            j.rem_euclid(n) as f64 * self.h,
        ]
    }

    /// Containing cell of `p` after periodic wrapping.
    ///
    /// Coordinates within a few ulps of a grid line snap onto it, so every
    /// node maps to its own cell with local coordinates exactly `(0, 0)`.
    pub fn locate_cell(&self, p: Point) -> CellLocation {
        let (ci, xi) = self.locate_axis(p[0]);
        let (cj, eta) = self.locate_axis(p[1]);
        CellLocation {
            cell: [ci, cj],
            local: [xi, eta],
        }
    }

    fn locate_axis(&self, x: f64) -> (usize, f64) {
        let s = wrap_unit(x) * self.n as f64;
        let mut c = s.floor();
        let mut frac = s - c;
        let snap = 64.0 * f64::EPSILON * s.max(1.0);
        if frac < snap {
            frac = 0.0;
        } else if 1.0 - frac < snap {
            c += 1.0;
            frac = 0.0;
        }
        let c = (c as usize) % self.n;
        (c, frac)
    }
}

/// Wrap a coordinate into `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Value and the derivatives a jet scheme stores at a node.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxy: f64,
}

impl Jet {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.dx.is_finite() && self.dy.is_finite() && self.dxy.is_finite()
    }
}

/// Node values of `(phi, d_x phi, d_y phi, d_xy phi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetField {
    grid: Grid,
    pub value: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dxy: Vec<f64>,
}

impl JetField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            value: vec![0.0; n],
            dx: vec![0.0; n],
            dy: vec![0.0; n],
            dxy: vec![0.0; n],
        }
    }

    /// Samples the exact jet of `f` at every node.
    pub fn sample<F: SmoothField + ?Sized>(grid: Grid, f: &F) -> Self {
        let mut out = Self::zeros(grid);
        for k in 0..grid.len() {
            let [i, j] = grid.node(k);
            let jet = f.jet(grid.node_position(i as isize, j as isize));
            out.set(k, jet);
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, k: usize) -> Jet {
        Jet {
            value: self.value[k],
            dx: self.dx[k],
            dy: self.dy[k],
            dxy: self.dxy[k],
        }
    }

    #[inline]
    pub fn set(&mut self, k: usize, jet: Jet) {
        self.value[k] = jet.value;
        self.dx[k] = jet.dx;
        self.dy[k] = jet.dy;
        self.dxy[k] = jet.dxy;
    }

    pub fn is_finite(&self) -> bool {
        (0..self.grid.len()).all(|k| self.get(k).is_finite())
    }

    /// Largest absolute difference over all four arrays.
    pub fn max_abs_diff(&self, other: &JetField) -> f64 {
        let pairs = [
            (&self.value, &other.value),
            (&self.dx, &other.dx),
            (&self.dy, &other.dy),
            (&self.dxy, &other.dxy),
        ];
        pairs
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Node values only.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn sample<F: SmoothField + ?Sized>(grid: Grid, f: &F) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let [i, j] = grid.node(k);
                f.value(grid.node_position(i as isize, j as isize))
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Bilinear interpolant of the node values, periodic.
    pub fn bilinear(&self, p: Point) -> f64 {
        let loc = self.grid.locate_cell(p);
        let [i, j] = [loc.cell[0] as isize, loc.cell[1] as isize];
        let [s, t] = loc.local;
        let f00 = self.at(i, j);
        let f10 = self.at(i + 1, j);
        let f01 = self.at(i, j + 1);
        let f11 = self.at(i + 1, j + 1);
        (1.0 - t) * ((1.0 - s) * f00 + s * f10) + t * ((1.0 - s) * f01 + s * f11)
    }
}
