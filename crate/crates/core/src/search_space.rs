//! Per-agent search spaces and their intersection with the boundary circle.
//!
//! A polygon vertex searches the cone between the outward normals of its two
//! supporting edges. Points of a collinear terminal layer search a half-plane
//! (endpoints) or a perpendicular line (interior points); a lone terminal
//! point searches every direction.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angle::{ccw_offset, wrap_2pi};
use crate::error::{Error, Result};
use crate::geometry::{Circle, ConvexLayerSet, LayerShape, Point2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchSpaceKind {
    Cone,
    HalfPlane,
    Line,
    Full,
}

/// Angular region of admissible headings from `apex`.
///
/// Directions run counterclockwise from `alpha_o` to `alpha_f`. For
/// [`SearchSpaceKind::Line`] the two admissible directions are `alpha_o` and
/// `alpha_f = alpha_o + π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub apex: Point2,
    pub kind: SearchSpaceKind,
    pub alpha_o: f64,
    pub alpha_f: f64,
}

impl SearchSpace {
    /// Angular width `Δα`.
    pub fn width(&self) -> f64 {
        match self.kind {
            SearchSpaceKind::Cone => ccw_offset(self.alpha_o, self.alpha_f),
            SearchSpaceKind::HalfPlane => PI,
            SearchSpaceKind::Line => 0.0,
            SearchSpaceKind::Full => TAU,
        }
    }

    /// Whether heading `theta` is admissible, with angular slack `tol`.
    pub fn contains_direction(&self, theta: f64, tol: f64) -> bool {
        match self.kind {
            SearchSpaceKind::Full => true,
            SearchSpaceKind::Line => {
                let d = |a: f64| crate::angle::angular_distance(theta, a);
                d(self.alpha_o) <= tol || d(self.alpha_f) <= tol
            }
            SearchSpaceKind::Cone | SearchSpaceKind::HalfPlane => {
                let off = ccw_offset(self.alpha_o, theta);
                off <= self.width() + tol || TAU - off <= tol
            }
        }
    }
}

/// Outward normal direction of the counterclockwise edge `a → b`.
fn outward_normal(a: Point2, b: Point2) -> f64 {
    wrap_2pi((b - a).angle() - FRAC_PI_2)
}

/// Search space of `agent` given its layer in `layers`.
pub fn build_search_space(agent: usize, layers: &ConvexLayerSet, points: &[Point2]) -> SearchSpace {
    let m = layers.layer_of(agent);
    let layer = layers.layer(m);
    let k = layers.slot_of(agent);
    let apex = points[agent];
    match layers.shape_of(m) {
        LayerShape::Polygon => {
            let prev = points[layer[(k + layer.len() - 1) % layer.len()]];
            let next = points[layer[(k + 1) % layer.len()]];
            SearchSpace {
                apex,
                kind: SearchSpaceKind::Cone,
                alpha_o: outward_normal(prev, apex),
                alpha_f: outward_normal(apex, next),
            }
        }
        LayerShape::Single => SearchSpace {
            apex,
            kind: SearchSpaceKind::Full,
            alpha_o: 0.0,
            alpha_f: TAU,
        },
        LayerShape::Collinear => {
            let along = (points[layer[layer.len() - 1]] - points[layer[0]]).angle();
            let (kind, alpha_o) = if k == 0 {
                (SearchSpaceKind::HalfPlane, along + FRAC_PI_2)
            } else if k + 1 == layer.len() {
                (SearchSpaceKind::HalfPlane, along - FRAC_PI_2)
            } else {
                (SearchSpaceKind::Line, along + FRAC_PI_2)
            };
            SearchSpace {
                apex,
                kind,
                alpha_o: wrap_2pi(alpha_o),
                alpha_f: wrap_2pi(alpha_o + PI),
            }
        }
    }
}

/// Shape of the admissible goal set on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcShape {
    /// Counterclockwise arc from `start` spanning `width ∈ (0, 2π)`.
    Arc {
        start: f64,
        width: f64,
    },
    /// Two isolated candidate angles.
    PointPair {
        first: f64,
        second: f64,
    },
    FullCircle,
}

/// Potential goal positions `C_b ∩ SS` of one agent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalArc {
    pub circle: Circle,
    pub shape: ArcShape,
}

impl GoalArc {
    /// Whether polar angle `phi` lies on the goal set, with angular slack `tol`.
    pub fn contains_angle(&self, phi: f64, tol: f64) -> bool {
        match self.shape {
            ArcShape::FullCircle => true,
            ArcShape::Arc { start, width } => {
                let off = ccw_offset(start, phi);
                off <= width + tol || TAU - off <= tol
            }
            ArcShape::PointPair { first, second } => {
                crate::angle::angular_distance(phi, first) <= tol
                    || crate::angle::angular_distance(phi, second) <= tol
            }
        }
    }

    /// Endpoint angles `(φ^o, φ^f)` of an arc.
    pub fn endpoints(&self) -> Option<(f64, f64)> {
        match self.shape {
            ArcShape::Arc { start, width } => Some((start, wrap_2pi(start + width))),
            _ => None,
        }
    }
}

/// Polar angle about the circle center of the first hit of the ray from
/// `apex` (strictly interior) in direction `theta`.
pub fn ray_hit_angle(apex: Point2, theta: f64, circle: &Circle) -> f64 {
    let d = Point2::unit(theta);
    let w = apex - circle.center;
    let b = d.dot(w);
    let c = w.norm_sq() - circle.radius * circle.radius;
    let root = (b * b - c).sqrt();
    // t = -b + root, rearranged to avoid cancellation when b > 0
    let t = if b > 0.0 { -c / (b + root) } else { root - b };
    (apex + d * t - circle.center).angle()
}

/// Intersects a search space with the circle.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn intersect_with_circle(ss: &SearchSpace, circle: &Circle) -> Result<GoalArc> {
    let distance = ss.apex.distance(circle.center);
    if !(distance < circle.radius) {
        return Err(Error::ApexOutsideCircle {
            distance,
            radius: circle.radius,
        });
    }
    let shape = match ss.kind {
        SearchSpaceKind::Full => ArcShape::FullCircle,
        SearchSpaceKind::Line => ArcShape::PointPair {
            first: ray_hit_angle(ss.apex, ss.alpha_o, circle),
            second: ray_hit_angle(ss.apex, ss.alpha_f, circle),
        },
        SearchSpaceKind::Cone | SearchSpaceKind::HalfPlane => {
            // the direction → hit-angle map is an increasing bijection for an
            // interior apex, so the cone maps onto the ccw arc between hits
            let start = ray_hit_angle(ss.apex, ss.alpha_o, circle);
            let end = ray_hit_angle(ss.apex, ss.alpha_f, circle);
            ArcShape::Arc {
                start,
                width: ccw_offset(start, end),
            }
        }
    };
    Ok(GoalArc {
        circle: *circle,
        shape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::convex_layers;
    use std::f64::consts::FRAC_PI_4;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    #[test]
    fn square_corner_cone() {
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let cl = convex_layers(&p).unwrap();
        let ss = build_search_space(0, &cl, &p);
        assert_eq!(ss.kind, SearchSpaceKind::Cone);
        assert!((ss.alpha_o - PI).abs() < 1e-12);
        assert!((ss.alpha_f - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert!((ss.width() - FRAC_PI_2).abs() < 1e-12);
        assert!(ss.contains_direction(5.0 * FRAC_PI_4, 0.0));
        assert!(!ss.contains_direction(FRAC_PI_4, 1e-9));
    }

    #[test]
    fn single_point_is_full() {
        let p = pts(&[(-2.0, -2.0), (2.0, -2.0), (0.0, 2.0), (0.0, 0.0)]);
        let cl = convex_layers(&p).unwrap();
        let ss = build_search_space(3, &cl, &p);
        assert_eq!(ss.kind, SearchSpaceKind::Full);
        assert_eq!(ss.width(), TAU);
    }

    #[test]
    fn collinear_line_and_half_planes() {
        let p = pts(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let cl = convex_layers(&p).unwrap();
        let mid = build_search_space(1, &cl, &p);
        assert_eq!(mid.kind, SearchSpaceKind::Line);
        assert!((mid.alpha_o - FRAC_PI_2).abs() < 1e-12);
        assert!((mid.alpha_f - 3.0 * FRAC_PI_2).abs() < 1e-12);

        let left = build_search_space(0, &cl, &p);
        assert_eq!(left.kind, SearchSpaceKind::HalfPlane);
        assert!(left.contains_direction(PI, 0.0));
        assert!(!left.contains_direction(0.0, 1e-9));
        let right = build_search_space(2, &cl, &p);
        assert!(right.contains_direction(0.0, 0.0));
        assert!(!right.contains_direction(PI, 1e-9));
    }

    #[test]
    fn two_point_terminal_half_planes_face_apart() {
        let p = pts(&[
            (-3.0, -3.0),
            (3.0, -3.0),
            (0.0, 4.0),
            (0.0, 0.0),
            (0.5, 0.5),
        ]);
        let cl = convex_layers(&p).unwrap();
        let a = build_search_space(3, &cl, &p);
        let b = build_search_space(4, &cl, &p);
        assert_eq!(a.kind, SearchSpaceKind::HalfPlane);
        assert_eq!(b.kind, SearchSpaceKind::HalfPlane);
        assert!(a.contains_direction(5.0 * FRAC_PI_4, 0.0));
        assert!(b.contains_direction(FRAC_PI_4, 0.0));
    }

    #[test]
    fn full_space_gives_full_circle() {
        let c = Circle::new(Point2::ORIGIN, 3.0).unwrap();
        let ss = SearchSpace {
            apex: Point2::new(1.0, -0.5),
            kind: SearchSpaceKind::Full,
            alpha_o: 0.0,
            alpha_f: TAU,
        };
        assert_eq!(
            intersect_with_circle(&ss, &c).unwrap().shape,
            ArcShape::FullCircle
        );
    }

    #[test]
    fn cone_from_center_keeps_its_angles() {
        let c = Circle::new(Point2::ORIGIN, 2.0).unwrap();
        let ss = SearchSpace {
            apex: Point2::ORIGIN,
            kind: SearchSpaceKind::Cone,
            alpha_o: wrap_2pi(-FRAC_PI_4),
            alpha_f: FRAC_PI_4,
        };
        let arc = intersect_with_circle(&ss, &c).unwrap();
        let (o, f) = arc.endpoints().unwrap();
        assert!((o - 7.0 * FRAC_PI_4).abs() < 1e-12);
        assert!((f - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn apex_outside_rejected() {
        let c = Circle::new(Point2::ORIGIN, 1.0).unwrap();
        let ss = SearchSpace {
            apex: Point2::new(1.0, 0.0),
            kind: SearchSpaceKind::Full,
            alpha_o: 0.0,
            alpha_f: TAU,
        };
        assert!(matches!(
            intersect_with_circle(&ss, &c),
            Err(Error::ApexOutsideCircle { .. })
        ));
    }

    #[test]
    fn line_gives_point_pair() {
        let c = Circle::new(Point2::ORIGIN, 2.0).unwrap();
        let ss = SearchSpace {
            apex: Point2::new(1.0, 0.0),
            kind: SearchSpaceKind::Line,
            alpha_o: FRAC_PI_2,
            alpha_f: 3.0 * FRAC_PI_2,
        };
        match intersect_with_circle(&ss, &c).unwrap().shape {
            ArcShape::PointPair { first, second } => {
                assert!((first - PI / 3.0).abs() < 1e-12);
                assert!((second - 5.0 * PI / 3.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
