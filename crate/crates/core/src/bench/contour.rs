//! Marching squares on a sampled lattice and a polyline Hausdorff distance.

use std::collections::HashMap;

use crate::grid::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub level: f64,
    pub points: Vec<Point>,
    /// The last point connects back to the first.
    pub closed: bool,
}

/// Contours of one solution, tagged with the scheme that produced it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContourSet {
    pub scheme: String,
    pub polylines: Vec<Polyline>,
}

impl ContourSet {
    pub fn at_level(&self, level: f64) -> impl Iterator<Item = &Polyline> {
        self.polylines.iter().filter(move |p| p.level == level)
    }
}

/// Values of a function on the `(m + 1) x (m + 1)` lattice spanning `[0, 1]^2`.
#[derive(Clone, Debug)]
pub struct Lattice {
    m: usize,
    values: Vec<f64>,
}

impl Lattice {
    pub fn sample(m: usize, f: impl Fn(Point) -> f64) -> Self {
        let step = 1.0 / m as f64;
        let mut values = Vec::with_capacity((m + 1) * (m + 1));
        for j in 0..=m {
            for i in 0..=m {
                values.push(f([i as f64 * step, j as f64 * step]));
            }
        }
        Self { m, values }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.m + 1) + i]
    }

    fn position(&self, i: usize, j: usize) -> Point {
        let step = 1.0 / self.m as f64;
        [i as f64 * step, j as f64 * step]
    }
}

/// A lattice edge: `(i, j, vertical)`; horizontal edges run from `(i, j)` to
/// `(i + 1, j)`, vertical ones from `(i, j)` to `(i, j + 1)`.
type EdgeKey = (usize, usize, bool);

/// Level curves of `lattice` as polylines, using linear interpolation along
/// lattice edges. Saddle cells are resolved by the cell-centre average.
pub fn extract(lattice: &Lattice, level: f64) -> Vec<Polyline> {
    let m = lattice.size();
    let mut points: HashMap<EdgeKey, Point> = HashMap::new();
    let mut crossing = |key: EdgeKey| -> EdgeKey {
        points.entry(key).or_insert_with(|| {
            let (i, j, vertical) = key;
            let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
            let (a, b) = (lattice.at(i, j), lattice.at(i2, j2));
            let s = (level - a) / (b - a);
            let (p, q) = (lattice.position(i, j), lattice.position(i2, j2));
            [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
        });
        key
    };

    let mut segments: Vec<[EdgeKey; 2]> = Vec::new();
    for j in 0..m {
        for i in 0..m {
            let corners = [
                lattice.at(i, j),
                lattice.at(i + 1, j),
                lattice.at(i + 1, j + 1),
                lattice.at(i, j + 1),
            ];
            let case = corners
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &v)| acc | (u8::from(v >= level) << k));
            let bottom = (i, j, false);
            let right = (i + 1, j, true);
            let top = (i, j + 1, false);
            let left = (i, j, true);
            let pairs: &[[EdgeKey; 2]] = match case {
                0 | 15 => &[],
                1 | 14 => &[[left, bottom]],
                2 | 13 => &[[bottom, right]],
                3 | 12 => &[[left, right]],
                4 | 11 => &[[right, top]],
                6 | 9 => &[[bottom, top]],
                7 | 8 => &[[left, top]],
                5 | 10 => {
                    let centre = 0.25 * corners.iter().sum::<f64>();
                    // corners 0 and 2 share a side of the level in case 5
                    if (centre >= level) == (case == 5) {
                        &[[left, top], [bottom, right]]
                    } else {
                        &[[left, bottom], [right, top]]
                    }
                }
                _ => unreachable!(),
            };
            for &[a, b] in pairs {
                segments.push([crossing(a), crossing(b)]);
            }
        }
    }

    assemble(&segments, &points, level)
}

fn assemble(
    segments: &[[EdgeKey; 2]],
    points: &HashMap<EdgeKey, Point>,
    level: f64,
) -> Vec<Polyline> {
    let mut touching: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for key in seg {
            touching.entry(*key).or_default().push(s);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start: EdgeKey, used: &mut Vec<bool>, chain: &mut Vec<EdgeKey>| {
        let mut at = start;
        while let Some(&s) = touching[&at].iter().find(|&&s| !used[s]) {
            used[s] = true;
            let [a, b] = segments[s];
            at = if a == at { b } else { a };
            chain.push(at);
        }
    };

    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        let [a, b] = segments[s];
        let mut forward = vec![a, b];
        walk(b, &mut used, &mut forward);
        let closed = forward.len() > 2 && forward.first() == forward.last();
        let keys = if closed {
            forward.pop();
            forward
        } else {
            let mut backward = Vec::new();
            walk(a, &mut used, &mut backward);
            backward.reverse();
            backward.extend(forward);
            backward
        };

        let mut pts: Vec<Point> = Vec::with_capacity(keys.len());
        for key in keys {
            let p = points[&key];
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        if closed && pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        if pts.len() >= 3 {
            out.push(Polyline {
                level,
                points: pts,
                closed,
            });
        }
    }
    out
}

/// Contours of `f` at each level, sampled `subgrid` times per cell of an
/// `n x n` grid.
pub fn extract_contours(
    scheme: &str,
    f: impl Fn(Point) -> f64,
    n: usize,
    subgrid: usize,
    levels: &[f64],
) -> ContourSet {
    let lattice = Lattice::sample(n * subgrid.max(1), f);
    ContourSet {
        scheme: scheme.to_string(),
        polylines: levels.iter().flat_map(|&l| extract(&lattice, l)).collect(),
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + s * d[0] - p[0], a[1] + s * d[1] - p[1]];
    q[0].hypot(q[1])
}

fn segments<'a>(lines: &'a [&Polyline]) -> impl Iterator<Item = (Point, Point)> + 'a {
    lines.iter().flat_map(|l| {
        let n = l.points.len();
        let count = if l.closed { n } else { n - 1 };
        (0..count).map(move |k| (l.points[k], l.points[(k + 1) % n]))
    })
}

/// Points along the polylines with spacing at most `spacing`, vertices included.
pub fn resample(lines: &[&Polyline], spacing: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for (a, b) in segments(lines) {
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let pieces = (len / spacing).ceil().max(1.0) as usize;
        for k in 0..pieces {
            let s = k as f64 / pieces as f64;
            out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    for l in lines.iter().filter(|l| !l.closed) {
        out.extend(l.points.last());
    }
    out
}

fn directed(from: &[&Polyline], to: &[&Polyline], spacing: f64) -> f64 {
    let targets: Vec<(Point, Point)> = segments(to).collect();
    resample(from, spacing)
        .into_iter()
        .map(|p| {
            targets
                .iter()
                .map(|&(a, b)| segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two sets of polylines, measured on
/// resampled points against the other set's segments.
///
/// Infinite when exactly one side is empty; zero when both are.
pub fn hausdorff(a: &[&Polyline], b: &[&Polyline], spacing: f64) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b, spacing).max(directed(b, a, spacing)),
    }
}
