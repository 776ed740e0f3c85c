//! Planar primitives, convex hull and convex-layer ("onion") decomposition.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::angle::wrap_2pi;
use crate::error::{Error, Result};

/// Two inputs closer than this are the same location.
pub const TOL_DUP: f64 = 1e-9;
/// Normalized cross-product threshold below which three points are collinear.
pub const TOL_COL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector at `angle` radians.
    pub fn unit(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point2::new(c, s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Direction of the vector in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        wrap_2pi(self.y.atan2(self.x))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Point2, s: f64) -> Point2 {
        self + (o - self) * s
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Polar coordinates `(r, φ)` about some origin, `φ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn about(p: Point2, origin: Point2) -> Self {
        let d = p - origin;
        PolarPoint {
            r: d.norm(),
            phi: d.angle(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || !center.is_finite() {
            return Err(Error::InvalidCircle { radius });
        }
        Ok(Circle { center, radius })
    }

    /// Boundary point at polar angle `phi` about the center.
    pub fn point_at(&self, phi: f64) -> Point2 {
        self.center + Point2::unit(phi) * self.radius
    }

    pub fn polar(&self, p: Point2) -> PolarPoint {
        PolarPoint::about(p, self.center)
    }

    pub fn strictly_contains(&self, p: Point2) -> bool {
        p.distance(self.center) < self.radius
    }

    /// Errors with the first point that is not strictly interior.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn check_interior(&self, points: &[Point2]) -> Result<()> {
        for (index, &p) in points.iter().enumerate() {
            let distance = p.distance(self.center);
            if !(distance < self.radius) {
                return Err(Error::OutsideCircle {
                    index,
                    distance,
                    radius: self.radius,
                });
            }
        }
        Ok(())
    }
}

/// `cross(a - o, b - o)`: positive for a counterclockwise turn o → a → b.
pub fn orient(o: Point2, a: Point2, b: Point2) -> f64 {
    (a - o).cross(b - o)
}

fn turn_scale(a: Point2, b: Point2, c: Point2) -> f64 {
    ((a - b).norm() * (b - c).norm()).max(1.0)
}

/// True when `a`, `b`, `c` are collinear within [`TOL_COL`].
///
/// The cross product is normalized by the product of the two edge lengths
/// (floored at 1), so the test reads as `|sin| ≤ TOL_COL` for long edges and as
/// an absolute area bound for short ones.
pub fn collinearity_test(a: Point2, b: Point2, c: Point2) -> bool {
    (a - b).cross(b - c).abs() <= TOL_COL * turn_scale(a, b, c)
}

fn lex_cmp(p: &Point2, q: &Point2) -> std::cmp::Ordering {
    p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
}

/// Rejects non-finite coordinates and pairs closer than [`TOL_DUP`].
pub fn check_distinct(points: &[Point2]) -> Result<()> {
    if let Some(index) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by(|&a, &b| points[a].x.total_cmp(&points[b].x));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j].x - points[i].x > TOL_DUP {
                break;
            }
            let distance = points[i].distance(points[j]);
            if distance <= TOL_DUP {
                return Err(Error::DuplicatePoints {
                    first: i.min(j),
                    second: i.max(j),
                    distance,
                });
            }
        }
    }
    Ok(())
}

/// Hull of `idx`, which must already be sorted lexicographically.
///
/// Andrew's monotone-chain form of Graham's scan on the plain orientation
/// sign, followed by [`drop_flat_vertices`]. Points interior to an edge are not
/// vertices. The result is counterclockwise and starts at the lowest-y (then
/// lowest-x) vertex.
fn sorted_hull(points: &[Point2], idx: &[usize]) -> Vec<usize> {
    if idx.len() < 3 {
        return anchor_first(points, idx.to_vec());
    }
    let turns_left = |hull: &[usize], i: usize| {
        let n = hull.len();
        orient(points[hull[n - 2]], points[hull[n - 1]], points[i]) > 0.0
    };
    let mut hull: Vec<usize> = Vec::with_capacity(idx.len() + 1);
    for &i in idx {
        while hull.len() >= 2 && !turns_left(&hull, i) {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower_len && !turns_left(&hull, i) {
            hull.pop();
        }
        hull.push(i);
    }
    // last element repeats the first
    hull.pop();
    anchor_first(points, drop_flat_vertices(points, hull))
}

/// Removes vertices collinear with their neighbours within [`TOL_COL`].
///
/// Only a vertex lying between its neighbours is removed, so rounding that
/// makes an edge point poke out of its edge never costs a real corner.
fn drop_flat_vertices(points: &[Point2], mut hull: Vec<usize>) -> Vec<usize> {
    let mut k = 0;
    let mut since_removal = 0;
    while hull.len() >= 3 && since_removal < hull.len() {
        let n = hull.len();
        let (a, b, c) = (
            points[hull[(k + n - 1) % n]],
            points[hull[k % n]],
            points[hull[(k + 1) % n]],
        );
        if collinearity_test(a, b, c) && (b - a).dot(c - b) > 0.0 {
            hull.remove(k % n);
            since_removal = 0;
            k = (k + n - 2) % (n - 1);
        } else {
            k = (k + 1) % n;
            since_removal += 1;
        }
    }
    hull
}

fn anchor_first(points: &[Point2], mut hull: Vec<usize>) -> Vec<usize> {
    if let Some(start) = (0..hull.len()).min_by(|&a, &b| {
        let (p, q) = (points[hull[a]], points[hull[b]]);
        p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x))
    }) {
        hull.rotate_left(start);
    }
    hull
}

/// Indices of the extreme points of `points`, counterclockwise from the
/// lowest-y (then lowest-x) vertex.
pub fn convex_hull(points: &[Point2]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::TooFewAgents {
            required: 1,
            got: 0,
        });
    }
    check_distinct(points)?;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_unstable_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    Ok(sorted_hull(points, &idx))
}

/// Shape of a layer in the decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerShape {
    /// Convex polygon with at least three vertices, listed counterclockwise.
    Polygon,
    /// Two or more collinear points, listed in order along their line.
    Collinear,
    /// A lone point.
    Single,
}

/// Nested convex layers `L_1` (outermost) to `L_M`.
///
/// Layer indices are zero-based here: `layers()[0]` is the outermost layer.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexLayerSet {
    layers: Vec<Vec<usize>>,
    layer_of: Vec<usize>,
    slot_of: Vec<usize>,
    terminal: LayerShape,
}

impl ConvexLayerSet {
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    /// Number of layers `M`.
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layer(&self, m: usize) -> &[usize] {
        &self.layers[m]
    }

    /// Zero-based layer index of `agent`.
    pub fn layer_of(&self, agent: usize) -> usize {
        self.layer_of[agent]
    }

    /// Position of `agent` within its layer's vertex list.
    pub fn slot_of(&self, agent: usize) -> usize {
        self.slot_of[agent]
    }

    pub fn terminal_shape(&self) -> LayerShape {
        self.terminal
    }

    pub fn is_terminal_collinear(&self) -> bool {
        self.terminal == LayerShape::Collinear
    }

    pub fn shape_of(&self, m: usize) -> LayerShape {
        if m + 1 == self.layers.len() {
            self.terminal
        } else {
            LayerShape::Polygon
        }
    }

    pub fn agent_count(&self) -> usize {
        self.layer_of.len()
    }
}

/// Peels convex hulls until at most two points remain or the remainder is
/// collinear; the remainder becomes the terminal layer.
pub fn convex_layers(points: &[Point2]) -> Result<ConvexLayerSet> {
    if points.is_empty() {
        return Err(Error::TooFewAgents {
            required: 1,
            got: 0,
        });
    }
    check_distinct(points)?;

    let mut remaining: Vec<usize> = (0..points.len()).collect();
    remaining.sort_unstable_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    let mut peeled = vec![false; points.len()];
    let mut layers = Vec::new();
    let mut terminal = LayerShape::Polygon;

    loop {
        match remaining.len() {
            0 => break,
            1 => {
                layers.push(remaining);
                terminal = LayerShape::Single;
                break;
            }
            2 => {
                layers.push(remaining);
                terminal = LayerShape::Collinear;
                break;
            }
            _ => {}
        }
        let hull = sorted_hull(points, &remaining);
        if hull.len() < 3 {
            layers.push(order_along(
                points,
                &remaining,
                hull[0],
                hull[hull.len() - 1],
            ));
            terminal = LayerShape::Collinear;
            break;
        }
        for &i in &hull {
            peeled[i] = true;
        }
        remaining.retain(|&i| !peeled[i]);
        layers.push(hull);
    }

    let mut layer_of = vec![0; points.len()];
    let mut slot_of = vec![0; points.len()];
    for (m, layer) in layers.iter().enumerate() {
        for (k, &i) in layer.iter().enumerate() {
            layer_of[i] = m;
            slot_of[i] = k;
        }
    }
    Ok(ConvexLayerSet {
        layers,
        layer_of,
        slot_of,
        terminal,
    })
}

fn order_along(points: &[Point2], idx: &[usize], a: usize, b: usize) -> Vec<usize> {
    let origin = points[a];
    let dir = points[b] - origin;
    let mut out = idx.to_vec();
    out.sort_by(|&i, &j| {
        let (s, t) = ((points[i] - origin).dot(dir), (points[j] - origin).dot(dir));
        s.total_cmp(&t)
    });
    out
}

/// Where a point sits relative to a convex polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// Locates `q` against the counterclockwise convex polygon `poly`.
///
/// Distances within `tol` of an edge line count as boundary.
pub fn polygon_containment(points: &[Point2], poly: &[usize], q: Point2, tol: f64) -> Containment {
    let mut on_edge = false;
    for k in 0..poly.len() {
        let a = points[poly[k]];
        let b = points[poly[(k + 1) % poly.len()]];
        let edge = b - a;
        let len = edge.norm();
        let signed = edge.cross(q - a) / len;
        if signed < -tol {
            return Containment::Outside;
        }
        if signed <= tol {
            on_edge = true;
        }
    }
    if on_edge {
        Containment::Boundary
    } else {
        Containment::Inside
    }
}
