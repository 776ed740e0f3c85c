//! Independent oracles shared by the property suite and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use circform::geometry::{convex_layers, Circle, Point2};
use circform::search_space::{build_search_space, ArcShape, GoalArc};

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coordinate")
}

/// Sign of the orientation of `(a, b, c)` in exact rational arithmetic.
pub fn exact_orient(a: Point2, b: Point2, c: Point2) -> i32 {
    // floating filter; the bound is far above the rounding error of the
    // differences and products
    let (l, r) = ((b.x - a.x) * (c.y - a.y), (b.y - a.y) * (c.x - a.x));
    if (l - r).abs() > 1e-12 * (l.abs() + r.abs()) {
        return if l > r { 1 } else { -1 };
    }
    let (ax, ay) = (exact(a.x), exact(a.y));
    let cross = (exact(b.x) - &ax) * (exact(c.y) - &ay) - (exact(b.y) - &ay) * (exact(c.x) - &ax);
    let zero = BigRational::from_integer(BigInt::from(0));
    match cross.cmp(&zero) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

fn on_segment(p: Point2, a: Point2, b: Point2) -> bool {
    exact_orient(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

fn in_triangle(p: Point2, a: Point2, b: Point2, c: Point2) -> bool {
    let s = [
        exact_orient(a, b, p),
        exact_orient(b, c, p),
        exact_orient(c, a, p),
    ];
    let t = exact_orient(a, b, c);
    t != 0 && s.iter().all(|&x| x == t || x == 0)
}

/// Corners of the hull of `subset`: points outside the closed hull of all the
/// others, found by checking every segment and triangle.
pub fn hull_corners(points: &[Point2], subset: &[usize]) -> Vec<usize> {
    let mut corners = Vec::new();
    for &p in subset {
        let others: Vec<usize> = subset.iter().copied().filter(|&q| q != p).collect();
        let mut covered = false;
        'search: for (x, &a) in others.iter().enumerate() {
            for (y, &b) in others.iter().enumerate().skip(x + 1) {
                if on_segment(points[p], points[a], points[b]) {
                    covered = true;
                    break 'search;
                }
                for &c in &others[y + 1..] {
                    if in_triangle(points[p], points[a], points[b], points[c]) {
                        covered = true;
                        break 'search;
                    }
                }
            }
        }
        if !covered {
            corners.push(p);
        }
    }
    corners
}

fn all_collinear(points: &[Point2], subset: &[usize]) -> bool {
    subset.len() < 3
        || subset[2..]
            .iter()
            .all(|&c| exact_orient(points[subset[0]], points[subset[1]], points[c]) == 0)
}

/// Layers by repeatedly deleting hull corners, each as a sorted index set.
pub fn naive_peel(points: &[Point2]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut layers = Vec::new();
    while !remaining.is_empty() {
        if all_collinear(points, &remaining) {
            layers.push(remaining);
            break;
        }
        let corners = hull_corners(points, &remaining);
        remaining.retain(|i| !corners.contains(i));
        let mut layer = corners;
        layer.sort_unstable();
        layers.push(layer);
    }
    layers
}

/// `n` distinct points on a small integer grid, so that collinear triples and
/// points on hull edges are common.
pub fn grid_points<R: Rng>(n: usize, side: i32, rng: &mut R) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point2::new(
            rng.random_range(-side..=side) as f64,
            rng.random_range(-side..=side) as f64,
        );
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

pub fn disc_points<R: Rng>(n: usize, radius: f64, rng: &mut R) -> Vec<Point2> {
    (0..n)
        .map(|_| Point2::unit(rng.random_range(0.0..TAU)) * (radius * rng.random::<f64>().sqrt()))
        .collect()
}

/// Counts of (checked, violated) comparisons of the vertex-cone property: a
/// point in a polygon vertex's search cone is strictly closer to that vertex
/// than to any other point of its layer (vertices and sampled edge points) or
/// of the layers inside it.
pub fn cone_property<R: Rng>(
    points: &[Point2],
    cone_samples: usize,
    rng: &mut R,
) -> (usize, usize) {
    let layers = convex_layers(points).expect("distinct points");
    let (mut checked, mut violated) = (0, 0);
    for m in 0..layers.len() {
        let layer = layers.layer(m);
        if layer.len() < 3 || layers.shape_of(m) != circform::geometry::LayerShape::Polygon {
            continue;
        }
        let mut targets: Vec<Point2> = (m..layers.len())
            .flat_map(|k| layers.layer(k).iter().map(|&i| points[i]))
            .collect();
        for (k, &i) in layer.iter().enumerate() {
            let (a, b) = (points[i], points[layer[(k + 1) % layer.len()]]);
            targets.extend((1..10).map(|s| a.lerp(b, s as f64 / 10.0)));
        }
        let scale = targets.iter().map(|p| p.norm()).fold(1.0, f64::max);
        for &v in layer {
            let ss = build_search_space(v, &layers, points);
            let apex = points[v];
            for _ in 0..cone_samples {
                let theta = ss.alpha_o + ss.width() * rng.random::<f64>();
                let p = apex + Point2::unit(theta) * (scale * rng.random_range(1e-3..4.0));
                let own = p.distance(apex);
                for &q in &targets {
                    if q == apex {
                        continue;
                    }
                    checked += 1;
                    if own >= p.distance(q) {
                        violated += 1;
                    }
                }
            }
        }
    }
    (checked, violated)
}

/// A random arc (one in ten is the full circle) on a random circle, and an
/// agent strictly inside it.
pub fn random_arc_instance<R: Rng>(rng: &mut R) -> (GoalArc, Point2) {
    let circle = Circle::new(
        Point2::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)),
        rng.random_range(0.5..60.0),
    )
    .unwrap();
    let shape = if rng.random_ratio(1, 10) {
        ArcShape::FullCircle
    } else {
        ArcShape::Arc {
            start: rng.random_range(0.0..TAU),
            width: rng.random_range(1e-4..TAU - 1e-4),
        }
    };
    let agent = circle.center
        + Point2::unit(rng.random_range(0.0..TAU))
            * (circle.radius * 0.999 * rng.random::<f64>().sqrt());
    (GoalArc { circle, shape }, agent)
}

/// Distance from `agent` to the nearest of `count` evenly spaced points
/// covering the arc, endpoints included.
pub fn sampled_arc_distance(arc: &GoalArc, agent: Point2, count: usize) -> f64 {
    let (start, width) = match arc.shape {
        ArcShape::Arc { start, width } => (start, width),
        ArcShape::FullCircle => (0.0, TAU * (1.0 - 1.0 / count as f64)),
        ArcShape::PointPair { first, second } => {
            return agent
                .distance(arc.circle.point_at(first))
                .min(agent.distance(arc.circle.point_at(second)))
        }
    };
    (0..count)
        .map(|k| {
            let phi = start + width * k as f64 / (count - 1) as f64;
            agent.distance(arc.circle.point_at(phi))
        })
        .fold(f64::INFINITY, f64::min)
}
