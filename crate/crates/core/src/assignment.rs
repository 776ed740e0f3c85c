//! Unique goal assignment on the boundary circle.
//!
//! Layers are processed from the innermost outward. Each agent takes the point
//! of its goal arc nearest to it; if that point is already taken, the goal is
//! pulled a fraction `delta` of the way into the larger neighbouring gap on
//! the arc.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::angle::{angular_distance, ccw_offset, wrap_2pi};
use crate::error::{Error, Result};
use crate::geometry::{convex_layers, Circle, ConvexLayerSet, Point2, PolarPoint};
use crate::search_space::{
    build_search_space, intersect_with_circle, ArcShape, GoalArc, SearchSpace,
};

/// Two goal angles closer than this coincide.
pub const TOL_EQ: f64 = 1e-6;
/// Conflict shift fraction for point agents.
pub const DEFAULT_DELTA_POINT: f64 = 0.2;
/// Conflict shift fraction for disc agents.
pub const DEFAULT_DELTA_DISC: f64 = 0.5;

/// Polar angles of goals committed so far, kept sorted in `[0, 2π)`.
#[derive(Clone, Debug, Default)]
pub struct AssignedSet {
    angles: Vec<f64>,
}

impl AssignedSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    pub fn insert(&mut self, phi: f64) {
        let phi = wrap_2pi(phi);
        let at = self.angles.partition_point(|&a| a < phi);
        self.angles.insert(at, phi);
    }

    /// Removes one committed angle equal to `phi`; false if there is none.
    pub fn remove(&mut self, phi: f64) -> bool {
        let phi = wrap_2pi(phi);
        let at = self.angles.partition_point(|&a| a < phi);
        if self.angles.get(at) == Some(&phi) {
            self.angles.remove(at);
            true
        } else {
            false
        }
    }

    /// The committed angle within `tol` of `phi`, if any.
    pub fn conflict(&self, phi: f64, tol: f64) -> Option<f64> {
        let n = self.angles.len();
        if n == 0 {
            return None;
        }
        let phi = wrap_2pi(phi);
        let at = self.angles.partition_point(|&a| a < phi);
        [self.angles[at % n], self.angles[(at + n - 1) % n]]
            .into_iter()
            .min_by(|a, b| angular_distance(*a, phi).total_cmp(&angular_distance(*b, phi)))
            .filter(|&a| angular_distance(a, phi) <= tol)
    }

    /// Clockwise gap from `phi` to the nearest other committed angle.
    fn cw_gap(&self, phi: f64) -> Option<f64> {
        let n = self.angles.len();
        let at = self.angles.partition_point(|&a| a < phi);
        (1..=n)
            .map(|step| ccw_offset(self.angles[(at + n - step) % n], phi))
            .find(|&g| g > TOL_EQ && g < TAU - TOL_EQ)
    }

    /// Counterclockwise gap from `phi` to the nearest other committed angle.
    fn ccw_gap(&self, phi: f64) -> Option<f64> {
        let n = self.angles.len();
        let at = self.angles.partition_point(|&a| a < phi);
        (0..n)
            .map(|step| ccw_offset(phi, self.angles[(at + step) % n]))
            .find(|&g| g > TOL_EQ && g < TAU - TOL_EQ)
    }
}

/// Goal angle on an arc (or full circle) nearest to the agent.
///
/// The radial point when the agent's own polar angle is on the arc, else the
/// endpoint with the smaller wrapped angular distance (ties go to `φ^o`).
pub fn nearest_goal_on_arc(agent: PolarPoint, arc: &GoalArc) -> f64 {
    match arc.shape {
        ArcShape::FullCircle => agent.phi,
        ArcShape::Arc { start, width } => {
            if ccw_offset(start, agent.phi) <= width {
                agent.phi
            } else {
                let end = wrap_2pi(start + width);
                if angular_distance(start, agent.phi) <= angular_distance(end, agent.phi) {
                    start
                } else {
                    end
                }
            }
        }
        ArcShape::PointPair { .. } => nearest_goal_on_pointpair(agent, arc),
    }
}

/// The nearer of two isolated candidates; ties go to the smaller angle.
///
/// Distance to a boundary point grows with angular distance from the agent's
/// own polar angle, so comparing angles is the same as comparing distances.
pub fn nearest_goal_on_pointpair(agent: PolarPoint, pair: &GoalArc) -> f64 {
    let (a, b) = match pair.shape {
        ArcShape::PointPair { first, second } => (first.min(second), first.max(second)),
        _ => return nearest_goal_on_arc(agent, pair),
    };
    let (da, db) = (
        angular_distance(a, agent.phi),
        angular_distance(b, agent.phi),
    );
    if agent.r == 0.0 || da <= db {
        a
    } else {
        b
    }
}

/// Smallest angle between goals whose chord on `circle` exceeds `min_gap`;
/// [`TOL_EQ`] when no spacing is required.
pub fn spacing_angle(circle: &Circle, min_gap: f64) -> f64 {
    if min_gap <= 0.0 {
        return TOL_EQ;
    }
    let half = (0.5 * min_gap / circle.radius).min(1.0);
    (2.0 * half.asin()).max(TOL_EQ)
}

/// Moves a conflicting goal into the larger adjacent free gap.
///
/// `goal_phi` must lie within `tol` of a committed angle `b`.
/// The neighbours of `b` are the nearest committed angles on either side,
/// bounded by the arc endpoints. The result is `b` shifted by `delta` times
/// the larger gap; on equal gaps the shift is clockwise. For a full circle or
/// a point pair there are no endpoints and the gaps wrap around the circle.
pub fn resolve_conflict(
    goal_phi: f64,
    arc: &GoalArc,
    assigned: &AssignedSet,
    delta: f64,
    tol: f64,
) -> Result<f64> {
    let b = assigned
        .conflict(goal_phi, tol)
        .ok_or(Error::ImpossibleConflict { angle: goal_phi })?;
    let cw = assigned.cw_gap(b);
    let ccw = assigned.ccw_gap(b);
    match arc.shape {
        ArcShape::Arc { start, width } => {
            let mut ob = ccw_offset(start, b);
            if ob > width {
                // b sits just outside an endpoint
                if TAU - ob <= tol {
                    ob = 0.0;
                } else if ob - width <= tol {
                    ob = width;
                } else {
                    return Err(Error::ImpossibleConflict { angle: goal_phi });
                }
            }
            let left = cw.map_or(ob, |g| g.min(ob));
            let right = ccw.map_or(width - ob, |g| g.min(width - ob));
            let shifted = if left >= right {
                ob - delta * left
            } else {
                ob + delta * right
            };
            Ok(wrap_2pi(start + shifted))
        }
        ArcShape::FullCircle | ArcShape::PointPair { .. } => {
            let left = cw.unwrap_or(TAU);
            let right = ccw.unwrap_or(TAU);
            let shifted = if left >= right {
                b - delta * left
            } else {
                b + delta * right
            };
            Ok(wrap_2pi(shifted))
        }
    }
}

/// Point of the arc farthest (in angle) from every committed goal, with that
/// clearance. Point pairs and full circles search the whole circle.
fn most_isolated(arc: &GoalArc, assigned: &AssignedSet) -> Option<(f64, f64)> {
    let taken = assigned.as_slice();
    let (start, width) = match arc.shape {
        ArcShape::Arc { start, width } => (start, width),
        ArcShape::FullCircle | ArcShape::PointPair { .. } => {
            (taken.first().copied().unwrap_or(0.0), TAU)
        }
    };
    let clearance = |phi: f64| {
        taken
            .iter()
            .map(|&a| angular_distance(a, phi))
            .fold(f64::INFINITY, f64::min)
    };
    let mut candidates = vec![start, wrap_2pi(start + width)];
    for (k, &a) in taken.iter().enumerate() {
        let next = taken[(k + 1) % taken.len()];
        let gap = if taken.len() == 1 {
            TAU
        } else {
            ccw_offset(a, next)
        };
        let mid = wrap_2pi(a + 0.5 * gap);
        if ccw_offset(start, mid) <= width {
            candidates.push(mid);
        }
    }
    candidates
        .into_iter()
        .map(|phi| (phi, clearance(phi)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
}

/// Replacement for a taken nearest goal: the other candidate of a point
/// pair, else the shifted goal, else the most isolated point of the arc.
/// That last point may sit closer than `tol` to a goal when the arc is
/// crowded, but never within [`TOL_EQ`].
fn free_goal(
    agent: usize,
    phi: f64,
    arc: &GoalArc,
    assigned: &AssignedSet,
    delta: f64,
    tol: f64,
) -> Result<f64> {
    if let ArcShape::PointPair { first, second } = arc.shape {
        let other = if angular_distance(phi, first) <= angular_distance(phi, second) {
            second
        } else {
            first
        };
        if assigned.conflict(other, tol).is_none() {
            return Ok(other);
        }
    }
    let shifted = resolve_conflict(phi, arc, assigned, delta, tol)?;
    if assigned.conflict(shifted, tol).is_none() {
        return Ok(shifted);
    }
    match most_isolated(arc, assigned) {
        Some((phi, clearance)) if clearance > TOL_EQ => Ok(phi),
        _ => Err(Error::ArcSaturated { agent }),
    }
}

/// Free angle on `arc` nearest to `phi`, at more than `tol` from every
/// committed angle.
fn nearest_free(phi: f64, arc: &GoalArc, assigned: &AssignedSet, tol: f64) -> Option<f64> {
    let margin = tol * 1.001;
    let mut candidates = vec![phi];
    match arc.shape {
        ArcShape::PointPair { first, second } => candidates.extend([first, second]),
        ArcShape::Arc { start, width } => candidates.extend([start, wrap_2pi(start + width)]),
        ArcShape::FullCircle => {}
    }
    if !matches!(arc.shape, ArcShape::PointPair { .. }) {
        for &a in assigned.as_slice() {
            candidates.extend([wrap_2pi(a - margin), wrap_2pi(a + margin)]);
        }
    }
    candidates
        .into_iter()
        .filter(|&c| arc.contains_angle(c, 0.0) && assigned.conflict(c, tol).is_none())
        .min_by(|a, b| angular_distance(*a, phi).total_cmp(&angular_distance(*b, phi)))
}

/// Separates goals that ended up within `tol` of each other: of each such
/// pair, the agent with the smaller move to a free point of its own arc
/// yields.
fn spread_goals(
    goal_phi: &mut [f64],
    modified: &mut [bool],
    arcs: &[GoalArc],
    assigned: &mut AssignedSet,
    tol: f64,
) {
    for _ in 0..4 {
        let mut by_angle: Vec<usize> = (0..goal_phi.len()).collect();
        by_angle.sort_by(|&a, &b| goal_phi[a].total_cmp(&goal_phi[b]).then(a.cmp(&b)));
        let mut moved = false;
        for k in 0..by_angle.len() {
            let (i, j) = (by_angle[k], by_angle[(k + 1) % by_angle.len()]);
            if i == j || angular_distance(goal_phi[i], goal_phi[j]) > tol {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for a in [i, j] {
                assigned.remove(goal_phi[a]);
                if let Some(phi) = nearest_free(goal_phi[a], &arcs[a], assigned, tol) {
                    if best.is_none_or(|(b, p)| {
                        angular_distance(phi, goal_phi[a]) < angular_distance(p, goal_phi[b])
                    }) {
                        best = Some((a, phi));
                    }
                }
                assigned.insert(goal_phi[a]);
            }
            if let Some((a, phi)) = best {
                assigned.remove(goal_phi[a]);
                assigned.insert(phi);
                goal_phi[a] = phi;
                modified[a] = true;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}

/// Final goal of one agent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentGoal {
    pub goal: Point2,
    /// Polar angle of the goal about the circle center.
    pub goal_phi: f64,
    /// Heading from the initial position to the goal, in `[0, 2π)`.
    pub psi: f64,
    /// Travel time at the common speed.
    pub t_f: f64,
    /// Zero-based layer index (0 = outermost).
    pub layer: usize,
    /// True when the nearest-point goal was taken and had to be shifted.
    pub was_modified: bool,
}

#[derive(Clone, Debug)]
pub struct GoalAssignment {
    pub circle: Circle,
    pub speed: f64,
    /// Planning positions the assignment was computed from.
    pub positions: Vec<Point2>,
    pub goals: Vec<AgentGoal>,
    pub search_spaces: Vec<SearchSpace>,
    pub arcs: Vec<GoalArc>,
    pub layer_count: usize,
}

impl GoalAssignment {
    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn max_arrival_time(&self) -> f64 {
        self.goals.iter().map(|g| g.t_f).fold(0.0, f64::max)
    }
}

fn check_params(speed: f64, delta: f64) -> Result<()> {
    if !(speed.is_finite() && speed > 0.0) {
        return Err(Error::param(
            "v",
            format!("speed must be positive, got {speed}"),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(
            "delta",
            format!("must lie in (0, 1), got {delta}"),
        ));
    }
    Ok(())
}

/// Assigns every agent a unique goal on `circle`.
///
/// Within a layer, agents are taken in increasing polar angle about the
/// circle center (ties by index).
pub fn assign_all(
    points: &[Point2],
    layers: &ConvexLayerSet,
    circle: &Circle,
    speed: f64,
    delta: f64,
) -> Result<GoalAssignment> {
    assign_all_spaced(points, layers, circle, speed, delta, 0.0)
}

/// [`assign_all`] for agents of finite size: a goal also counts as taken
/// when it is within chord distance `min_gap` of a committed goal.
pub fn assign_all_spaced(
    points: &[Point2],
    layers: &ConvexLayerSet,
    circle: &Circle,
    speed: f64,
    delta: f64,
    min_gap: f64,
) -> Result<GoalAssignment> {
    check_params(speed, delta)?;
    if !(min_gap.is_finite() && min_gap >= 0.0) {
        return Err(Error::param(
            "d_s",
            format!("must be non-negative, got {min_gap}"),
        ));
    }
    let tol = spacing_angle(circle, min_gap);
    circle.check_interior(points)?;

    let search_spaces: Vec<SearchSpace> = (0..points.len())
        .map(|i| build_search_space(i, layers, points))
        .collect();
    let arcs = search_spaces
        .iter()
        .map(|ss| intersect_with_circle(ss, circle))
        .collect::<Result<Vec<_>>>()?;
    let polar: Vec<PolarPoint> = points.iter().map(|&p| circle.polar(p)).collect();

    let mut goal_phi = vec![0.0; points.len()];
    let mut modified = vec![false; points.len()];
    let mut assigned = AssignedSet::new();

    for m in (0..layers.len()).rev() {
        let mut order = layers.layer(m).to_vec();
        order.sort_by(|&a, &b| polar[a].phi.total_cmp(&polar[b].phi).then(a.cmp(&b)));
        for i in order {
            let arc = &arcs[i];
            let nearest = nearest_goal_on_arc(polar[i], arc);
            let mut phi = nearest;
            if assigned.conflict(nearest, tol).is_some() {
                modified[i] = true;
                phi = free_goal(i, nearest, arc, &assigned, delta, tol)?;
            }
            assigned.insert(phi);
            goal_phi[i] = wrap_2pi(phi);
        }
    }
    if tol > TOL_EQ {
        spread_goals(&mut goal_phi, &mut modified, &arcs, &mut assigned, tol);
    }

    let goals = (0..points.len())
        .map(|i| {
            let goal = circle.point_at(goal_phi[i]);
            let path = goal - points[i];
            AgentGoal {
                goal,
                goal_phi: goal_phi[i],
                psi: path.angle(),
                t_f: path.norm() / speed,
                layer: layers.layer_of(i),
                was_modified: modified[i],
            }
        })
        .collect();

    Ok(GoalAssignment {
        circle: *circle,
        speed,
        positions: points.to_vec(),
        goals,
        search_spaces,
        arcs,
        layer_count: layers.len(),
    })
}

/// Layer decomposition followed by [`assign_all`].
pub fn plan(points: &[Point2], circle: &Circle, speed: f64, delta: f64) -> Result<GoalAssignment> {
    let layers = convex_layers(points)?;
    assign_all(points, &layers, circle, speed, delta)
}

/// Layer decomposition followed by [`assign_all_spaced`].
pub fn plan_spaced(
    points: &[Point2],
    circle: &Circle,
    speed: f64,
    delta: f64,
    min_gap: f64,
) -> Result<GoalAssignment> {
    let layers = convex_layers(points)?;
    assign_all_spaced(points, &layers, circle, speed, delta, min_gap)
}

/// Audit failures of an assignment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssignmentAudit {
    /// Smallest wrapped angular separation between two goals.
    pub min_separation: f64,
    /// Agents whose goal is off their own goal arc.
    pub off_arc: Vec<usize>,
    /// Agents whose goal is not on the circle.
    pub off_circle: Vec<usize>,
}

impl AssignmentAudit {
    pub fn passed(&self) -> bool {
        self.min_separation > TOL_EQ && self.off_arc.is_empty() && self.off_circle.is_empty()
    }
}

/// Checks uniqueness, arc containment and on-circle placement of all goals.
pub fn audit(assignment: &GoalAssignment) -> AssignmentAudit {
    let mut angles: Vec<f64> = assignment.goals.iter().map(|g| g.goal_phi).collect();
    angles.sort_by(f64::total_cmp);
    let min_separation = if angles.len() < 2 {
        TAU
    } else {
        let wrap = TAU - angles[angles.len() - 1] + angles[0];
        angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::min)
    };
    let c = assignment.circle;
    let off_circle = assignment
        .goals
        .iter()
        .enumerate()
        .filter(|(_, g)| (g.goal.distance(c.center) - c.radius).abs() > 1e-9 * c.radius)
        .map(|(i, _)| i)
        .collect();
    let off_arc = assignment
        .goals
        .iter()
        .zip(&assignment.arcs)
        .enumerate()
        .filter(|(_, (g, arc))| !arc.contains_angle(g.goal_phi, 1e-9))
        .map(|(i, _)| i)
        .collect();
    AssignmentAudit {
        min_separation,
        off_arc,
        off_circle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn arc(start: f64, width: f64) -> GoalArc {
        GoalArc {
            circle: Circle::new(Point2::ORIGIN, 2.0).unwrap(),
            shape: ArcShape::Arc { start, width },
        }
    }

    fn set(v: &[f64]) -> AssignedSet {
        let mut s = AssignedSet::new();
        for &a in v {
            s.insert(a);
        }
        s
    }

    #[test]
    fn radial_when_inside_arc() {
        let p = PolarPoint { r: 1.0, phi: 0.3 };
        assert_eq!(nearest_goal_on_arc(p, &arc(0.1, 0.8)), 0.3);
    }

    #[test]
    fn nearer_endpoint_outside_arc() {
        let a = arc(FRAC_PI_4, FRAC_PI_4);
        assert_eq!(
            nearest_goal_on_arc(PolarPoint { r: 1.0, phi: 0.0 }, &a),
            FRAC_PI_4
        );
        assert_eq!(
            nearest_goal_on_arc(PolarPoint { r: 1.0, phi: PI }, &a),
            FRAC_PI_2
        );
    }

    #[test]
    fn endpoint_choice_across_seam() {
        // arc from 350° to 10°, agent at 180° - 1e-3: the 10° endpoint is closer
        let a = arc(350f64.to_radians(), 20f64.to_radians());
        let g = nearest_goal_on_arc(
            PolarPoint {
                r: 1.0,
                phi: PI - 1e-3,
            },
            &a,
        );
        assert!((g - 10f64.to_radians()).abs() < 1e-12);
        // agent at 5° is inside the wrapped arc
        let g = nearest_goal_on_arc(
            PolarPoint {
                r: 1.0,
                phi: 5f64.to_radians(),
            },
            &a,
        );
        assert!((g - 5f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn point_pair_ties_to_smaller_angle() {
        let pair = GoalArc {
            circle: Circle::new(Point2::ORIGIN, 2.0).unwrap(),
            shape: ArcShape::PointPair {
                first: 3.0 * FRAC_PI_2,
                second: FRAC_PI_2,
            },
        };
        assert_eq!(
            nearest_goal_on_pointpair(PolarPoint { r: 0.5, phi: 0.0 }, &pair),
            FRAC_PI_2
        );
        let above = PolarPoint::about(Point2::new(0.5, 0.1), Point2::ORIGIN);
        assert_eq!(nearest_goal_on_pointpair(above, &pair), FRAC_PI_2);
        let below = PolarPoint::about(Point2::new(0.5, -0.1), Point2::ORIGIN);
        assert_eq!(nearest_goal_on_pointpair(below, &pair), 3.0 * FRAC_PI_2);
    }

    #[test]
    fn conflict_tie_shifts_clockwise() {
        let phi = resolve_conflict(0.5, &arc(0.0, 1.0), &set(&[0.5]), 0.2, TOL_EQ).unwrap();
        assert!((phi - 0.4).abs() < 1e-12);
    }

    #[test]
    fn conflict_shifts_into_larger_gap() {
        let phi = resolve_conflict(0.2, &arc(0.0, 1.0), &set(&[0.2]), 0.2, TOL_EQ).unwrap();
        assert!((phi - 0.36).abs() < 1e-12);
    }

    #[test]
    fn conflict_neighbours_bound_the_gap() {
        // Φ = {0, 0.3, 0.5, 0.9, 1.0}; conflict at 0.5: gaps 0.2 vs 0.4
        let phi = resolve_conflict(
            0.5,
            &arc(0.0, 1.0),
            &set(&[0.3, 0.5, 0.9, 2.0]),
            0.5,
            TOL_EQ,
        )
        .unwrap();
        assert!((phi - 0.7).abs() < 1e-12);
    }

    #[test]
    fn conflict_on_wrapped_arc() {
        // same as the symmetric case, rotated across the seam
        let start = TAU - 0.5;
        let phi = resolve_conflict(0.0, &arc(start, 1.0), &set(&[0.0]), 0.2, TOL_EQ).unwrap();
        assert!((angular_distance(phi, TAU - 0.1)) < 1e-12);
    }

    #[test]
    fn conflict_at_endpoint_moves_inward() {
        let phi = resolve_conflict(0.0, &arc(0.0, 1.0), &set(&[0.0]), 0.2, TOL_EQ).unwrap();
        assert!((phi - 0.2).abs() < 1e-12);
    }

    #[test]
    fn conflict_on_full_circle() {
        let full = GoalArc {
            circle: Circle::new(Point2::ORIGIN, 2.0).unwrap(),
            shape: ArcShape::FullCircle,
        };
        let phi = resolve_conflict(0.0, &full, &set(&[0.0]), 0.2, TOL_EQ).unwrap();
        assert!(angular_distance(phi, -0.2 * TAU) < 1e-12);
        let phi = resolve_conflict(1.0, &full, &set(&[0.0, 1.0, 1.5]), 0.2, TOL_EQ).unwrap();
        assert!((phi - 0.8).abs() < 1e-12);
    }

    #[test]
    fn no_conflict_is_an_error() {
        assert!(matches!(
            resolve_conflict(0.5, &arc(0.0, 1.0), &AssignedSet::new(), 0.2, TOL_EQ),
            Err(Error::ImpossibleConflict { .. })
        ));
        // committed angle far outside the arc
        assert!(resolve_conflict(3.0, &arc(0.0, 1.0), &set(&[3.0]), 0.2, TOL_EQ).is_err());
    }

    #[test]
    fn smaller_delta_stays_closer() {
        let a = arc(0.0, 1.0);
        let s = set(&[0.2, 0.45]);
        let d1 = angular_distance(resolve_conflict(0.2, &a, &s, 0.1, TOL_EQ).unwrap(), 0.2);
        let d2 = angular_distance(resolve_conflict(0.2, &a, &s, 0.4, TOL_EQ).unwrap(), 0.2);
        assert!(d1 < d2);
    }

    #[test]
    fn equilateral_triangle_goes_radial() {
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let p: Vec<Point2> = (0..3)
            .map(|k| Point2::unit(0.3 + k as f64 * TAU / 3.0) * 2.0)
            .collect();
        let a = plan(&p, &c, 0.5, 0.2).unwrap();
        for (g, x) in a.goals.iter().zip(&p) {
            assert!(!g.was_modified);
            assert!((g.goal.distance(*x) - 3.0).abs() < 1e-12);
            assert!((g.t_f - 6.0).abs() < 1e-12);
        }
        assert!(audit(&a).passed());
    }

    #[test]
    fn radially_aligned_pair_is_separated() {
        // inner agent at (1,0) inside a triangle whose vertex (3,0) is aligned with it
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let p = vec![
            Point2::new(3.0, 0.0),
            Point2::new(-2.0, 2.5),
            Point2::new(-2.0, -2.5),
            Point2::new(1.0, 0.0),
        ];
        let a = plan(&p, &c, 0.5, 0.2).unwrap();
        assert!(!a.goals[3].was_modified);
        assert!(a.goals[0].was_modified);
        assert!(a.goals[3].goal_phi.abs() < 1e-15);
        assert!(angular_distance(a.goals[0].goal_phi, 0.0) > TOL_EQ);
        assert!(audit(&a).passed());
    }

    #[test]
    fn agent_at_center_goes_to_angle_zero() {
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let p = vec![
            Point2::new(2.0, 1.0),
            Point2::new(-2.0, 2.0),
            Point2::new(0.0, -2.0),
            Point2::ORIGIN,
        ];
        let a = plan(&p, &c, 1.0, 0.2).unwrap();
        assert_eq!(a.goals[3].goal_phi, 0.0);
        assert_eq!(a.layer_count, 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let p = vec![
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(-1.0, -1.0),
        ];
        assert!(plan(&p, &c, 0.0, 0.2).is_err());
        assert!(plan(&p, &c, 1.0, 1.0).is_err());
        let far = vec![
            Point2::new(6.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(-1.0, -1.0),
        ];
        assert!(matches!(
            plan(&far, &c, 1.0, 0.2),
            Err(Error::OutsideCircle { index: 0, .. })
        ));
    }

    #[test]
    fn spacing_angle_matches_chord() {
        let c = Circle::new(Point2::ORIGIN, 40.0).unwrap();
        let tol = spacing_angle(&c, 0.15);
        assert!((c.point_at(0.0).distance(c.point_at(tol)) - 0.15).abs() < 1e-12);
        assert_eq!(spacing_angle(&c, 0.0), TOL_EQ);
        assert!((spacing_angle(&c, 500.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn remove_takes_exact_angles_only() {
        let mut s = set(&[0.1, 0.2, 0.3]);
        assert!(s.remove(0.2));
        assert!(!s.remove(0.25));
        assert_eq!(s.as_slice(), &[0.1, 0.3]);
    }

    fn close_goal_pairs(a: &GoalAssignment, d_s: f64) -> usize {
        let g = &a.goals;
        (0..g.len())
            .flat_map(|i| (i + 1..g.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| g[i].goal.distance(g[j].goal) <= d_s)
            .count()
    }

    #[test]
    fn spaced_goals_keep_their_distance() {
        use crate::presets::{random_positions, Region};
        use crate::rng::{stream, Purpose};
        let (mut spaced, mut plain) = (0, 0);
        for trial in 0..20 {
            let mut rng = stream(8, trial, Purpose::Positions);
            let p = random_positions(60, 40.0, 0.4, Region::Disc, &mut rng).unwrap();
            let c = crate::enclosing::enclosing_circle(&p, 0.05).unwrap();
            let a = plan_spaced(&p, &c, 0.5, 0.5, 0.15).unwrap();
            assert!(audit(&a).passed());
            spaced += close_goal_pairs(&a, 0.15);
            plain += close_goal_pairs(&plan(&p, &c, 0.5, 0.5).unwrap(), 0.15);
        }
        assert!(plain > 10, "{plain}");
        assert!(spaced <= 1, "{spaced}");
    }
}
