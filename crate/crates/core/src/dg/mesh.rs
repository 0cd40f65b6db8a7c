//! Structured periodic triangulation of the unit square.
//!
//! A Cartesian grid of `m x m` cells with side `H` is split along each
//! cell's lower-left to upper-right diagonal. With `H = sqrt(2) h` the mesh
//! has `1/h^2` triangles, each of area `h^2` and shortest height `h`.

use crate::error::{Error, Result};
use crate::grid::Point;

/// A triangle with counter-clockwise vertices in unwrapped coordinates
/// (all inside `[0, 1]^2`).
#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub coords: [Point; 3],
    /// Signed area; positive for counter-clockwise orientation.
    pub area: f64,
    jac: [[f64; 2]; 2],
}

impl Triangle {
    pub fn centroid(&self) -> Point {
        let c = &self.coords;
        [
            (c[0][0] + c[1][0] + c[2][0]) / 3.0,
            (c[0][1] + c[1][1] + c[2][1]) / 3.0,
        ]
    }

    /// Columns `v1 - v0` and `v2 - v0` of the affine map from the reference
    /// triangle, taken from lattice offsets rather than rounded coordinates.
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        self.jac
    }

    /// Reference coordinates of the corner with global index `vertex`.
    pub fn corner_reference(&self, vertex: usize) -> Option<[f64; 2]> {
        const CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        self.vertices
            .iter()
            .position(|&v| v == vertex)
            .map(|k| CORNERS[k])
    }

    /// Translate `p` by a period vector so that it lies next to this triangle.
    pub fn unwrap_point(&self, p: Point) -> Point {
        let c = self.centroid();
        [p[0] + (c[0] - p[0]).round(), p[1] + (c[1] - p[1]).round()]
    }

    /// Reference coordinates of a point already in this triangle's period copy.
    pub fn reference_coords(&self, p: Point) -> [f64; 2] {
        let j = self.jacobian();
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let d = [p[0] - self.coords[0][0], p[1] - self.coords[0][1]];
        [
            (j[1][1] * d[0] - j[0][1] * d[1]) / det,
            (-j[1][0] * d[0] + j[0][0] * d[1]) / det,
        ]
    }

    pub fn physical(&self, rs: [f64; 2]) -> Point {
        let j = self.jacobian();
        [
            self.coords[0][0] + j[0][0] * rs[0] + j[0][1] * rs[1],
            self.coords[0][1] + j[1][0] * rs[0] + j[1][1] * rs[1],
        ]
    }
}

/// An edge shared by two triangles. `normal` is the unit normal pointing out
/// of `left` and into `right`; `endpoints` are in `left`'s coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: usize,
    pub normal: [f64; 2],
    pub length: f64,
    pub endpoints: [Point; 2],
}

impl Edge {
    pub fn point_at(&self, s: f64) -> Point {
        let [a, b] = self.endpoints;
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    cells: usize,
    vertices: Vec<Point>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
}

impl Triangulation {
    /// Mesh with nominal resolution `h`; `1/(sqrt(2) h)` must be an integer.
    pub fn build(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Mesh(format!("resolution {h} must be positive")));
        }
        let m = 1.0 / (std::f64::consts::SQRT_2 * h);
        let rounded = m.round();
        if rounded < 2.0 || (m - rounded).abs() > 1e-9 * m.max(1.0) {
            return Err(Error::Mesh(format!(
                "h = {h} gives 1/(sqrt(2) h) = {m}, which is not an integer"
            )));
        }
        Self::with_cells(rounded as usize)
    }

    /// Finest tiling mesh whose shortest height is at least `h`:
    /// `m = floor(1/(sqrt(2) h))` cells per side.
    pub fn covering(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Mesh(format!("resolution {h} must be positive")));
        }
        let m = (1.0 / (std::f64::consts::SQRT_2 * h) * (1.0 + 1e-12)).floor();
        if m < 2.0 {
            return Err(Error::Mesh(format!(
                "resolution {h} gives fewer than two cells per side"
            )));
        }
        Self::with_cells(m as usize)
    }

    /// `m x m` Cartesian cells, each split into two triangles.
    pub fn with_cells(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Mesh(format!(
                "need at least two cells per side, got {m}"
            )));
        }
        let side = 1.0 / m as f64;
        let vid = |i: usize, j: usize| (j % m) * m + (i % m);
        let pos = |i: usize, j: usize| [i as f64 * side, j as f64 * side];
        let lower = |i: usize, j: usize| 2 * ((j % m) * m + (i % m));
        let upper = |i: usize, j: usize| lower(i, j) + 1;

        let vertices = (0..m * m).map(|k| pos(k % m, k / m)).collect();

        let mut triangles = Vec::with_capacity(2 * m * m);
        for j in 0..m {
            for i in 0..m {
                let area = 0.5 * side * side;
                triangles.push(Triangle {
                    vertices: [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)],
                    coords: [pos(i, j), pos(i + 1, j), pos(i + 1, j + 1)],
                    area,
                    jac: [[side, side], [0.0, side]],
                });
                triangles.push(Triangle {
                    vertices: [vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)],
                    coords: [pos(i, j), pos(i + 1, j + 1), pos(i, j + 1)],
                    area,
                    jac: [[side, 0.0], [side, side]],
                });
            }
        }

        let diag = std::f64::consts::FRAC_1_SQRT_2;
        let mut edges = Vec::with_capacity(3 * m * m);
        for j in 0..m {
            for i in 0..m {
                // bottom: lower(i, j) above, upper(i, j - 1) below
                edges.push(Edge {
                    vertices: [vid(i, j), vid(i + 1, j)],
                    left: lower(i, j),
                    right: upper(i, j + m - 1),
                    normal: [0.0, -1.0],
                    length: side,
                    endpoints: [pos(i, j), pos(i + 1, j)],
                });
                // left side: upper(i, j) to the right, lower(i - 1, j) to the left
                edges.push(Edge {
                    vertices: [vid(i, j), vid(i, j + 1)],
                    left: upper(i, j),
                    right: lower(i + m - 1, j),
                    normal: [-1.0, 0.0],
                    length: side,
                    endpoints: [pos(i, j), pos(i, j + 1)],
                });
                // diagonal: lower below-right, upper above-left
                edges.push(Edge {
                    vertices: [vid(i, j), vid(i + 1, j + 1)],
                    left: lower(i, j),
                    right: upper(i, j),
                    normal: [-diag, diag],
                    length: std::f64::consts::SQRT_2 * side,
                    endpoints: [pos(i, j), pos(i + 1, j + 1)],
                });
            }
        }

        Ok(Self {
            cells: m,
            vertices,
            triangles,
            edges,
        })
    }

    /// Cells per side of the underlying Cartesian grid.
    pub fn cells_per_side(&self) -> usize {
        self.cells
    }

    /// Side of the underlying Cartesian cells, `sqrt(2) h`.
    pub fn cell_side(&self) -> f64 {
        1.0 / self.cells as f64
    }

    /// Shortest triangle height; the mesh's effective `h`.
    pub fn min_height(&self) -> f64 {
        self.cell_side() * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index of the lower (`upper = false`) or upper triangle of cell `(i, j)`.
    pub fn triangle_index(&self, i: usize, j: usize, upper: bool) -> usize {
        let m = self.cells;
        2 * ((j % m) * m + (i % m)) + usize::from(upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_counts() {
        let h = 1.0 / (std::f64::consts::SQRT_2 * 2.0);
        let mesh = Triangulation::build(h).unwrap();
        assert_eq!(mesh.triangles().len(), 8);
        assert_eq!(mesh.edges().len(), 12);
        assert_eq!(mesh.vertices().len(), 4);
    }

    #[test]
    fn counts_and_geometry_follow_h() {
        assert!(Triangulation::with_cells(1).is_err());
        for m in [2usize, 3, 7] {
            let mesh = Triangulation::with_cells(m).unwrap();
            let h = mesh.min_height();
            let nt = mesh.triangles().len();
            assert_eq!(nt, 2 * m * m);
            assert!((nt as f64 - 1.0 / (h * h)).abs() < 1e-9);
            assert_eq!(mesh.edges().len() * 2, 3 * nt);
            for t in mesh.triangles() {
                assert!((t.area - h * h).abs() < 1e-15);
                let j = t.jacobian();
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                assert!((0.5 * det - t.area).abs() < 1e-15);
                let c = t.coords;
                for (k, col) in [(1, 0), (2, 1)] {
                    assert!((c[k][0] - c[0][0] - j[0][col]).abs() < 1e-15);
                    assert!((c[k][1] - c[0][1] - j[1][col]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn every_triangle_has_three_edges() {
        let mesh = Triangulation::with_cells(4).unwrap();
        let mut count = vec![0; mesh.triangles().len()];
        for e in mesh.edges() {
            assert_ne!(e.left, e.right);
            count[e.left] += 1;
            count[e.right] += 1;
        }
        assert!(count.iter().all(|&c| c == 3));
    }

    #[test]
    fn normals_point_from_left_to_right() {
        let mesh = Triangulation::with_cells(5).unwrap();
        for e in mesh.edges() {
            let mid = e.point_at(0.5);
            let cl = mesh.triangles()[e.left].centroid();
            let cr = mesh.triangles()[e.right].centroid();
            // right centroid translated to the period copy next to the edge
            let cr = [
                cr[0] + (mid[0] - cr[0]).round(),
                cr[1] + (mid[1] - cr[1]).round(),
            ];
            let to_left = (cl[0] - mid[0]) * e.normal[0] + (cl[1] - mid[1]) * e.normal[1];
            let to_right = (cr[0] - mid[0]) * e.normal[0] + (cr[1] - mid[1]) * e.normal[1];
            assert!(to_left < 0.0 && to_right > 0.0);
            let n2 = e.normal[0].powi(2) + e.normal[1].powi(2);
            assert!((n2 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn edge_lies_on_both_triangles() {
        let mesh = Triangulation::with_cells(3).unwrap();
        for e in mesh.edges() {
            for &t in &[e.left, e.right] {
                let tri = &mesh.triangles()[t];
                for s in [0.0, 0.3, 1.0] {
                    let rs = tri.reference_coords(tri.unwrap_point(e.point_at(s)));
                    let l1 = 1.0 - rs[0] - rs[1];
                    let on_boundary = [rs[0], rs[1], l1].iter().any(|x| x.abs() < 1e-12);
                    assert!(on_boundary && rs.iter().chain([&l1]).all(|&x| x > -1e-12));
                }
            }
        }
    }

    #[test]
    fn build_rejects_non_tiling_h() {
        assert!(Triangulation::build(0.05).is_err());
        assert!(Triangulation::build(-1.0).is_err());
        let covering = Triangulation::covering(0.05).unwrap();
        assert_eq!(covering.cells_per_side(), 14);
        assert!(covering.min_height() >= 0.05);
        assert_eq!(
            Triangulation::covering(1.0 / 80.0)
                .unwrap()
                .cells_per_side(),
            56
        );
    }
}
