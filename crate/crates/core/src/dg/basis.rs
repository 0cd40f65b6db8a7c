//! Quadrature rules and the nodal P2 basis on the reference triangle
//! `(0,0), (1,0), (0,1)`.
//!
//! Node order: the three vertices, then the midpoints of edges 0-1, 1-2, 2-0.

/// Triangle quadrature point: reference coordinates and a weight.
/// Weights sum to one; multiply by the element area.
#[derive(Clone, Copy, Debug)]
pub struct TriPoint {
    pub rs: [f64; 2],
    pub weight: f64,
}

/// The 7-point symmetric rule, exact for polynomials of degree 5.
pub fn triangle_rule() -> [TriPoint; 7] {
    let sq = 15f64.sqrt();
    let a1 = (6.0 - sq) / 21.0;
    let b1 = 1.0 - 2.0 * a1;
    let w1 = (155.0 - sq) / 1200.0;
    let a2 = (6.0 + sq) / 21.0;
    let b2 = 1.0 - 2.0 * a2;
    let w2 = (155.0 + sq) / 1200.0;
    let p = |r: f64, s: f64, weight: f64| TriPoint { rs: [r, s], weight };
    [
        p(1.0 / 3.0, 1.0 / 3.0, 0.225),
        p(a1, a1, w1),
        p(b1, a1, w1),
        p(a1, b1, w1),
        p(a2, a2, w2),
        p(b2, a2, w2),
        p(a2, b2, w2),
    ]
}

/// 3-point Gauss-Legendre on `[0, 1]` as `(parameter, weight)`, midpoint
/// first. Exact for degree 5; weights sum to one.
pub fn edge_rule() -> [(f64, f64); 3] {
    let d = 0.5 * (0.6f64).sqrt();
    [
        (0.5, 4.0 / 9.0),
        (0.5 - d, 5.0 / 18.0),
        (0.5 + d, 5.0 / 18.0),
    ]
}

/// P2 basis values at reference coordinates.
pub fn p2_values(rs: [f64; 2]) -> [f64; 6] {
    let l1 = 1.0 - rs[0] - rs[1];
    let l2 = rs[0];
    let l3 = rs[1];
    [
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        l3 * (2.0 * l3 - 1.0),
        4.0 * l1 * l2,
        4.0 * l2 * l3,
        4.0 * l3 * l1,
    ]
}

/// P2 basis gradients with respect to the reference coordinates.
pub fn p2_gradients(rs: [f64; 2]) -> [[f64; 2]; 6] {
    let l1 = 1.0 - rs[0] - rs[1];
    let l2 = rs[0];
    let l3 = rs[1];
    let g1 = [-1.0, -1.0];
    let g2 = [1.0, 0.0];
    let g3 = [0.0, 1.0];
    let scale = |g: [f64; 2], f: f64| [g[0] * f, g[1] * f];
    let add = |a: [f64; 2], b: [f64; 2]| [a[0] + b[0], a[1] + b[1]];
    [
        scale(g1, 4.0 * l1 - 1.0),
        scale(g2, 4.0 * l2 - 1.0),
        scale(g3, 4.0 * l3 - 1.0),
        add(scale(g1, 4.0 * l2), scale(g2, 4.0 * l1)),
        add(scale(g2, 4.0 * l3), scale(g3, 4.0 * l2)),
        add(scale(g3, 4.0 * l1), scale(g1, 4.0 * l3)),
    ]
}

/// Reference-coordinate positions of the six P2 nodes.
pub const P2_NODES: [[f64; 2]; 6] = [
    [0.0, 0.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [0.5, 0.0],
    [0.5, 0.5],
    [0.0, 0.5],
];

#[cfg(test)]
mod tests {
    use super::*;

    /// `int_ref r^a s^b = a! b! / (a + b + 2)!`
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
        f(a) * f(b) / f(a + b + 2)
    }

    #[test]
    fn triangle_rule_is_degree_five() {
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                let q: f64 = triangle_rule()
                    .iter()
                    .map(|p| 0.5 * p.weight * p.rs[0].powi(a as i32) * p.rs[1].powi(b as i32))
                    .sum();
                assert!((q - monomial_integral(a, b)).abs() < 1e-15, "r^{a} s^{b}");
            }
        }
    }

    #[test]
    fn edge_rule_is_degree_five() {
        for k in 0..=5 {
            let q: f64 = edge_rule().iter().map(|(s, w)| w * s.powi(k)).sum();
            assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
        assert_eq!(edge_rule()[0].0, 0.5);
    }

    #[test]
    fn nodal_basis_is_cardinal_and_sums_to_one() {
        for (i, &node) in P2_NODES.iter().enumerate() {
            let v = p2_values(node);
            for (j, &x) in v.iter().enumerate() {
                assert_eq!(x, if i == j { 1.0 } else { 0.0 });
            }
        }
        for rs in [[0.2, 0.3], [0.6, 0.1]] {
            let s: f64 = p2_values(rs).iter().sum();
            assert!((s - 1.0).abs() < 1e-15);
            let g = p2_gradients(rs);
            let gx: f64 = g.iter().map(|d| d[0]).sum();
            let gy: f64 = g.iter().map(|d| d[1]).sum();
            assert!(gx.abs() < 1e-14 && gy.abs() < 1e-14);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let rs = [0.27, 0.41];
        let d = 1e-6;
        let g = p2_gradients(rs);
        let px = p2_values([rs[0] + d, rs[1]]);
        let mx = p2_values([rs[0] - d, rs[1]]);
        let py = p2_values([rs[0], rs[1] + d]);
        let my = p2_values([rs[0], rs[1] - d]);
        for i in 0..6 {
            assert!((g[i][0] - (px[i] - mx[i]) / (2.0 * d)).abs() < 1e-8);
            assert!((g[i][1] - (py[i] - my[i]) / (2.0 * d)).abs() < 1e-8);
        }
    }
}
