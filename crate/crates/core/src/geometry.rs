//! Planar polygonal chains and the geometric primitives used by the model.
//!
//! A [`PolygonalChain`] stores only the distinct vertices `V_1..V_{n-1}`; the
//! closing vertex `V_n = V_1` is implicit, so every loop over edges wraps
//! around with `(i + 1) % len`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for collinearity and boundary classification. Normalized
/// coordinates are O(1), so a fixed absolute epsilon is adequate.
pub const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl std::ops::Sub for Point2 {
    type Output = Point2;

    #[inline]
    fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }
}

/// Similarity transform applied by [`PolygonalChain::normalize`]:
/// `normalized = (raw - center) / length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub center: Point2,
    pub length: f64,
}

/// A closed polygonal chain given by its distinct vertices in order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalChain {
    vertices: Vec<Point2>,
    normalized: bool,
}

impl PolygonalChain {
    /// Builds a chain from its distinct vertices (without the repeated
    /// closing vertex).
    ///
    /// Requires at least three vertices, finite coordinates, consecutive
    /// vertices (including the closing pair) at distinct positions, and at
    /// least three distinct positions overall.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::invalid(format!(
                "a closed chain needs at least 3 distinct vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("vertex {} is not finite", i + 1)));
        }
        let m = vertices.len();
        for i in 0..m {
            if vertices[i] == vertices[(i + 1) % m] {
                return Err(Error::invalid(format!(
                    "vertices {} and {} coincide",
                    i + 1,
                    (i + 1) % m + 1
                )));
            }
        }
        let mut distinct = vertices.clone();
        distinct.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(Error::invalid("fewer than 3 distinct vertex positions"));
        }
        Ok(PolygonalChain {
            vertices,
            normalized: false,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Number of distinct vertices, `n - 1`.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i]
    }

    /// Total length of the closed loop, closing edge included.
    pub fn length(&self) -> f64 {
        let m = self.vertices.len();
        (0..m)
            .map(|i| self.vertices[i].distance(self.vertices[(i + 1) % m]))
            .sum()
    }

    /// Arithmetic mean of the distinct vertices.
    pub fn centroid(&self) -> Point2 {
        let m = self.vertices.len() as f64;
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(sx, sy), v| (sx + v.x, sy + v.y));
        Point2::new(sx / m, sy / m)
    }

    pub fn normalization(&self) -> Normalization {
        Normalization {
            center: self.centroid(),
            length: self.length(),
        }
    }

    /// Rescales to unit length and shifts the centroid to the origin.
    pub fn normalize(&self) -> Result<PolygonalChain> {
        let Normalization { center, length } = self.normalization();
        if length <= 0.0 || !length.is_finite() {
            return Err(Error::invalid("chain has zero or non-finite length"));
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| Point2::new((v.x - center.x) / length, (v.y - center.y) / length))
            .collect();
        Ok(PolygonalChain {
            vertices,
            normalized: true,
        })
    }

    /// Cyclically relabels the vertices so that the new vertex `i` is the old
    /// vertex `(i + shift) mod len`.
    pub fn rotated(&self, shift: usize) -> PolygonalChain {
        let m = self.vertices.len();
        let vertices = (0..m).map(|i| self.vertices[(i + shift) % m]).collect();
        PolygonalChain {
            vertices,
            normalized: self.normalized,
        }
    }

    /// Absolute shoelace area enclosed by the chain.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    pub fn is_simple(&self) -> bool {
        !is_self_intersecting(&self.vertices)
    }
}

/// Shoelace signed area; positive for counter-clockwise order.
pub fn signed_area(polygon: &[Point2]) -> f64 {
    let m = polygon.len();
    if m < 3 {
        return 0.0;
    }
    let twice: f64 = (0..m).map(|i| polygon[i].cross(polygon[(i + 1) % m])).sum();
    0.5 * twice
}

/// Line `a*x - b*y + c = 0` through two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineCoefficients {
    #[inline]
    pub fn residual(&self, v: Point2) -> f64 {
        self.a * v.x - self.b * v.y + self.c
    }

    /// Unsigned perpendicular distance from `v` to the line; values within
    /// [`EPS`] of the line are reported as exactly zero.
    #[inline]
    pub fn distance(&self, v: Point2) -> f64 {
        let d = self.residual(v).abs() / self.a.hypot(self.b);
        if d <= EPS {
            0.0
        } else {
            d
        }
    }
}

pub fn line_through(p: Point2, q: Point2) -> Result<LineCoefficients> {
    if p == q {
        return Err(Error::invalid("cannot draw a line through coincident points"));
    }
    Ok(LineCoefficients {
        a: q.y - p.y,
        b: q.x - p.x,
        c: q.x * p.y - q.y * p.x,
    })
}

/// Signed shortest distance from `v` to `line`: negative when `v` lies inside
/// the landmark polygon, positive otherwise.
pub fn signed_distance(v: Point2, line: &LineCoefficients, inside: bool) -> f64 {
    let d = line.distance(v);
    if inside && d > 0.0 {
        -d
    } else {
        d
    }
}

#[inline]
fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

#[inline]
fn orient_sign(a: Point2, b: Point2, c: Point2) -> i8 {
    let o = orient(a, b, c);
    if o > EPS {
        1
    } else if o < -EPS {
        -1
    } else {
        0
    }
}

/// `c` lies within the bounding box of segment `ab` (used after a
/// collinearity test).
#[inline]
fn within_box(a: Point2, b: Point2, c: Point2) -> bool {
    c.x >= a.x.min(b.x) - EPS && c.x <= a.x.max(b.x) + EPS && c.y >= a.y.min(b.y) - EPS && c.y <= a.y.max(b.y) + EPS
}

/// Closed-segment intersection test.
pub fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let o1 = orient_sign(p1, p2, q1);
    let o2 = orient_sign(p1, p2, q2);
    let o3 = orient_sign(q1, q2, p1);
    let o4 = orient_sign(q1, q2, p2);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_box(p1, p2, q1))
        || (o2 == 0 && within_box(p1, p2, q2))
        || (o3 == 0 && within_box(q1, q2, p1))
        || (o4 == 0 && within_box(q1, q2, p2))
}

/// Edges `a -> shared` and `shared -> b` fold back onto each other.
fn adjacent_edges_overlap(a: Point2, shared: Point2, b: Point2) -> bool {
    let u = a - shared;
    let v = b - shared;
    orient_sign(shared, a, b) == 0 && u.dot(v) > 0.0
}

fn distance_to_segment(v: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return v.distance(a);
    }
    let t = ((v - a).dot(ab) / len2).clamp(0.0, 1.0);
    v.distance(Point2::new(a.x + t * ab.x, a.y + t * ab.y))
}

/// Strict interior test by even-odd ray casting. Points within [`EPS`] of an
/// edge count as boundary and return `false`.
pub fn point_in_polygon(v: Point2, polygon: &[Point2]) -> bool {
    let m = polygon.len();
    let mut inside = false;
    for i in 0..m {
        let a = polygon[i];
        let b = polygon[(i + 1) % m];
        if distance_to_segment(v, a, b) <= EPS {
            return false;
        }
        if (a.y > v.y) != (b.y > v.y) {
            let x_cross = a.x + (v.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if v.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Edge `i` of a closed polygon joins vertices `i` and `i + 1 (mod m)`.
fn edge_pair_conflicts(polygon: &[Point2], i: usize, j: usize) -> bool {
    let m = polygon.len();
    debug_assert!(i != j);
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let (a1, a2) = (polygon[i], polygon[(i + 1) % m]);
    let (b1, b2) = (polygon[j], polygon[(j + 1) % m]);
    if j == i + 1 {
        adjacent_edges_overlap(a1, a2, b2)
    } else if i == 0 && j == m - 1 {
        adjacent_edges_overlap(b1, a1, a2)
    } else {
        segments_intersect(a1, a2, b1, b2)
    }
}

/// True iff two non-adjacent closed edges meet, adjacent edges overlap beyond
/// their shared vertex, or some edge has zero length.
pub fn is_self_intersecting(polygon: &[Point2]) -> bool {
    let m = polygon.len();
    if m < 3 {
        return true;
    }
    if (0..m).any(|i| polygon[i] == polygon[(i + 1) % m]) {
        return true;
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if edge_pair_conflicts(polygon, i, j) {
                return true;
            }
        }
    }
    false
}

/// Edges taking part in any conflict counted by [`is_self_intersecting`],
/// ascending.
pub(crate) fn conflicting_edges(polygon: &[Point2]) -> Vec<usize> {
    let m = polygon.len();
    let mut hit = vec![false; m];
    for i in 0..m {
        if polygon[i] == polygon[(i + 1) % m] {
            hit[i] = true;
        }
        for j in (i + 1)..m {
            if edge_pair_conflicts(polygon, i, j) {
                hit[i] = true;
                hit[j] = true;
            }
        }
    }
    (0..m).filter(|&i| hit[i]).collect()
}

/// Checks only the listed edges against every other edge. When the polygon
/// was obtained from a simple one by replacing exactly these edges, the
/// result equals [`is_self_intersecting`].
pub(crate) fn edges_conflict(polygon: &[Point2], edges: &[usize]) -> bool {
    let m = polygon.len();
    if m < 3 {
        return true;
    }
    for &e in edges {
        if polygon[e] == polygon[(e + 1) % m] {
            return true;
        }
        for f in 0..m {
            if f != e && edge_pair_conflicts(polygon, e, f) {
                return true;
            }
        }
    }
    false
}

/// Indices of the strict convex-hull vertices (collinear boundary points
/// excluded), in ascending chain order.
pub fn convex_hull(chain: &PolygonalChain) -> Result<Vec<usize>> {
    convex_hull_of(chain.vertices())
}

pub fn convex_hull_of(points: &[Point2]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .x
            .total_cmp(&points[j].x)
            .then(points[i].y.total_cmp(&points[j].y))
            .then(i.cmp(&j))
    });

    let mut hull: Vec<usize> = Vec::with_capacity(points.len() + 1);
    let keep = |hull: &Vec<usize>, next: usize| {
        let a = points[hull[hull.len() - 2]];
        let b = points[hull[hull.len() - 1]];
        orient(a, b, points[next]) > EPS
    };
    for &i in &order {
        while hull.len() >= 2 && !keep(&hull, i) {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower_len && !keep(&hull, i) {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();

    hull.sort_unstable();
    hull.dedup();
    if hull.len() < 3 {
        return Err(Error::invalid("all points are collinear; hull is degenerate"));
    }
    Ok(hull)
}
