//! Constant-speed straight-line motion, conflict detection and the
//! minimum-separation trace.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{GoalAssignment, DEFAULT_DELTA_POINT};
use crate::error::{Error, Result};
use crate::geometry::{check_distinct, Circle, Point2};

/// Default sampling step of the separation trace.
pub const DEFAULT_DT: f64 = 0.01;
/// Default common speed.
pub const DEFAULT_SPEED: f64 = 0.5;

/// One planning problem together with its execution attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub positions: Vec<Point2>,
    pub circle: Circle,
    pub speed: f64,
    /// Physical radius; 0 for point agents.
    pub agent_radius: f64,
    /// Two agents conflict when their centers come within this distance.
    pub d_s: f64,
    pub delta: f64,
    /// Half-width of the uniform per-coordinate position error.
    pub delta_u: f64,
    /// Upper bound of the uniform start delay.
    pub delta_td: f64,
    pub seed: u64,
    pub dt: f64,
}

impl Scenario {
    /// Point agents with default parameters.
    pub fn new(positions: Vec<Point2>, circle: Circle) -> Self {
        Scenario {
            positions,
            circle,
            speed: DEFAULT_SPEED,
            agent_radius: 0.0,
            d_s: 0.0,
            delta: DEFAULT_DELTA_POINT,
            delta_u: 0.0,
            delta_td: 0.0,
            seed: 0,
            dt: DEFAULT_DT,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.len() < 3 {
            return Err(Error::TooFewAgents {
                required: 3,
                got: self.positions.len(),
            });
        }
        check_distinct(&self.positions)?;
        self.circle.check_interior(&self.positions)?;
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(
                    name,
                    format!("must be finite and non-negative, got {v}"),
                ))
            }
        };
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(Error::param(
                "v",
                format!("must be positive, got {}", self.speed),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(
                "delta",
                format!("must lie in (0, 1), got {}", self.delta),
            ));
        }
        nonneg("agent_radius", self.agent_radius)?;
        nonneg("d_s", self.d_s)?;
        nonneg("delta_u", self.delta_u)?;
        nonneg("delta_td", self.delta_td)
    }
}

/// Straight-line motion of one agent: waits at `start` until `delay`, moves
/// at constant velocity for `duration`, then stays at `end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub start: Point2,
    pub end: Point2,
    pub delay: f64,
    pub duration: f64,
}

impl Leg {
    pub fn arrival(&self) -> f64 {
        self.delay + self.duration
    }

    pub fn position_at(&self, t: f64) -> Point2 {
        if t <= self.delay {
            self.start
        } else if t >= self.arrival() || self.duration <= 0.0 {
            self.end
        } else {
            self.start.lerp(self.end, (t - self.delay) / self.duration)
        }
    }

    pub fn velocity_at(&self, t: f64) -> Point2 {
        if t < self.delay || t >= self.arrival() || self.duration <= 0.0 {
            Point2::ORIGIN
        } else {
            (self.end - self.start) * (1.0 / self.duration)
        }
    }
}

/// Legs flown at the common speed from `true_positions` to the assigned
/// goals. When the planning positions were perturbed, heading and duration
/// follow from where each agent really is.
pub fn legs(assignment: &GoalAssignment, true_positions: &[Point2], delays: &[f64]) -> Vec<Leg> {
    assignment
        .goals
        .iter()
        .zip(true_positions)
        .zip(delays)
        .map(|((g, &start), &delay)| Leg {
            start,
            end: g.goal,
            delay,
            duration: g.goal.distance(start) / assignment.speed,
        })
        .collect()
}

/// Position of `agent` at time `t` when it starts from its planning position
/// after `delay`.
pub fn position_at(agent: usize, t: f64, assignment: &GoalAssignment, delay: f64) -> Point2 {
    let g = &assignment.goals[agent];
    Leg {
        start: assignment.positions[agent],
        end: g.goal,
        delay,
        duration: g.t_f,
    }
    .position_at(t)
}

/// Closest approach of two legs over all time: `(distance, time)`.
///
/// Relative motion is piecewise linear between the start and stop instants of
/// both agents, so the minimum of each piece is found in closed form.
pub fn closest_approach(a: &Leg, b: &Leg) -> (f64, f64) {
    let mut knots = [0.0, a.delay, a.arrival(), b.delay, b.arrival()];
    knots.sort_by(f64::total_cmp);
    let rel = |t: f64| a.position_at(t) - b.position_at(t);
    let mut best = (rel(0.0).norm(), 0.0);
    for w in knots.windows(2) {
        let (t0, t1) = (w[0].max(0.0), w[1]);
        if t1 <= t0 {
            continue;
        }
        let p0 = rel(t0);
        let p1 = rel(t1);
        let d = p1 - p0;
        let dd = d.norm_sq();
        let s = if dd > 0.0 {
            (-p0.dot(d) / dd).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let dist = (p0 + d * s).norm();
        if dist < best.0 {
            best = (dist, t0 + s * (t1 - t0));
        }
        if p1.norm() < best.0 {
            best = (p1.norm(), t1);
        }
    }
    best
}

/// A pair of agents whose separation fell to `d_s` or below.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConflictPair {
    pub i: usize,
    pub j: usize,
    /// Time of the closest approach.
    pub time: f64,
    pub distance: f64,
}

/// All pairs whose exact closest approach is `≤ d_s`, plus the overall
/// minimum separation.
pub fn analytic_conflicts(legs: &[Leg], d_s: f64) -> (Vec<ConflictPair>, f64) {
    let mut order: Vec<usize> = (0..legs.len()).collect();
    let lo_x = |l: &Leg| l.start.x.min(l.end.x);
    let hi_x = |l: &Leg| l.start.x.max(l.end.x);
    order.sort_by(|&a, &b| lo_x(&legs[a]).total_cmp(&lo_x(&legs[b])));
    let mut pairs = Vec::new();
    let mut min_sep = f64::INFINITY;
    for (k, &a) in order.iter().enumerate() {
        let la = &legs[a];
        // x-gaps bound distances from below, so only pairs within reach can
        // conflict or lower the running minimum
        let reach = hi_x(la) + d_s.max(min_sep);
        for &b in &order[k + 1..] {
            let lb = &legs[b];
            if lo_x(lb) > reach {
                break;
            }
            let (dist, time) = closest_approach(la, lb);
            min_sep = min_sep.min(dist);
            if dist <= d_s {
                let (i, j) = if a < b { (a, b) } else { (b, a) };
                pairs.push(ConflictPair {
                    i,
                    j,
                    time,
                    distance: dist,
                });
            }
        }
    }
    pairs.sort_by_key(|p| (p.i, p.j));
    (pairs, min_sep)
}

/// Sampled motion of the whole swarm.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryLog {
    pub times: Vec<f64>,
    /// `positions[k][i]` is agent `i` at `times[k]`.
    pub positions: Vec<Vec<Point2>>,
    /// Minimum pairwise distance at each sample.
    pub e_trace: Vec<f64>,
    /// Minimum separation over the whole motion (exact for kinematic runs).
    pub min_e: f64,
    pub conflict_pairs: Vec<ConflictPair>,
}

impl TrajectoryLog {
    /// Number of distinct conflicting pairs.
    pub fn n_conflicts(&self) -> usize {
        self.conflict_pairs.len()
    }
}

/// Smallest pairwise distance among `points`.
pub fn min_pairwise_distance(points: &[Point2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min(a.distance(*b));
        }
    }
    best
}

/// Sample times `0, dt, …` up to and including the first sample at or past
/// `horizon`.
pub fn sample_times(horizon: f64, dt: f64) -> Vec<f64> {
    let steps = (horizon / dt - 1e-9).ceil().max(0.0) as usize;
    (0..=steps).map(|k| k as f64 * dt).collect()
}

/// Samples all legs every `dt` and checks every pair analytically.
pub fn simulate(legs: &[Leg], d_s: f64, dt: f64) -> TrajectoryLog {
    let horizon = legs.iter().map(Leg::arrival).fold(0.0, f64::max);
    let times = sample_times(horizon, dt);
    let positions: Vec<Vec<Point2>> = times
        .iter()
        .map(|&t| legs.iter().map(|l| l.position_at(t)).collect())
        .collect();
    let e_trace: Vec<f64> = positions.iter().map(|p| min_pairwise_distance(p)).collect();
    let (conflict_pairs, min_sep) = analytic_conflicts(legs, d_s);
    let min_e = e_trace.iter().copied().fold(min_sep, f64::min);
    TrajectoryLog {
        times,
        positions,
        e_trace,
        min_e,
        conflict_pairs,
    }
}

/// `n` start delays drawn from `U(0, delta_td)`.
pub fn sample_delays<R: Rng>(n: usize, delta_td: f64, rng: &mut R) -> Vec<f64> {
    if delta_td <= 0.0 {
        return vec![0.0; n];
    }
    (0..n).map(|_| rng.random::<f64>() * delta_td).collect()
}

/// Measured positions: each coordinate shifted by `U(-delta_u, delta_u)`.
pub fn perturb_positions<R: Rng>(positions: &[Point2], delta_u: f64, rng: &mut R) -> Vec<Point2> {
    if delta_u <= 0.0 {
        return positions.to_vec();
    }
    positions
        .iter()
        .map(|p| {
            let dx = rng.random_range(-delta_u..delta_u);
            let dy = rng.random_range(-delta_u..delta_u);
            Point2::new(p.x + dx, p.y + dy)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::plan;
    use crate::rng::{stream, Purpose};

    fn leg(sx: f64, sy: f64, ex: f64, ey: f64, delay: f64, duration: f64) -> Leg {
        Leg {
            start: Point2::new(sx, sy),
            end: Point2::new(ex, ey),
            delay,
            duration,
        }
    }

    #[test]
    fn leg_holds_then_moves_then_stops() {
        let l = leg(0.0, 0.0, 2.0, 0.0, 1.0, 4.0);
        assert_eq!(l.position_at(0.5), l.start);
        assert_eq!(l.position_at(3.0), Point2::new(1.0, 0.0));
        assert_eq!(l.position_at(5.0), l.end);
        assert_eq!(l.position_at(50.0), l.end);
    }

    #[test]
    fn head_on_crossing_hits_zero() {
        let a = leg(-1.0, 0.0, 1.0, 0.0, 0.0, 2.0);
        let b = leg(1.0, 0.0, -1.0, 0.0, 0.0, 2.0);
        let (d, t) = closest_approach(&a, &b);
        assert!(d < 1e-12);
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delay_turns_crossing_into_near_miss() {
        // b waits 1 s, so a passes (0,0) while b is still at (0,1)
        let a = leg(-1.0, 0.0, 1.0, 0.0, 0.0, 2.0);
        let b = leg(0.0, 1.0, 0.0, -1.0, 1.0, 2.0);
        let (d, _) = closest_approach(&a, &b);
        // relative motion after t=1: a at (s, 0), b at (0, 1 - s)
        assert!((d - (0.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn closest_approach_after_one_stops() {
        let a = leg(0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let b = leg(3.0, 1.0, 3.0, -1.0, 0.0, 4.0);
        let (d, t) = closest_approach(&a, &b);
        assert!((d - 2.0).abs() < 1e-12);
        assert!((t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn radial_pair_never_conflicts() {
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let pts = vec![
            Point2::new(1.0, 0.0),
            Point2::new(-1.0, 0.1),
            Point2::new(0.0, 2.0),
        ];
        let a = plan(&pts, &c, 0.5, 0.2).unwrap();
        let log = simulate(&legs(&a, &pts, &[0.0; 3]), 0.0, 0.01);
        assert!(log.conflict_pairs.is_empty());
        assert!(log.min_e > 0.0);
        assert_eq!(log.e_trace.len(), log.times.len());
        let last = log.positions.last().unwrap();
        for (p, g) in last.iter().zip(&a.goals) {
            assert_eq!(*p, g.goal);
        }
    }

    #[test]
    fn position_at_ends_on_goal() {
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let pts = vec![
            Point2::new(1.0, 0.5),
            Point2::new(-1.0, 0.1),
            Point2::new(0.0, -2.0),
        ];
        let a = plan(&pts, &c, 0.5, 0.2).unwrap();
        for (i, &p) in pts.iter().enumerate() {
            assert_eq!(position_at(i, 0.0, &a, 0.0), p);
            let g = a.goals[i];
            assert!(position_at(i, g.t_f, &a, 0.0).distance(g.goal) < 1e-9);
            assert!(position_at(i, g.t_f + 0.2, &a, 0.2).distance(g.goal) < 1e-9);
        }
    }

    #[test]
    fn delay_is_a_time_shift() {
        let l0 = leg(0.0, 0.0, 3.0, 4.0, 0.0, 10.0);
        let l1 = Leg { delay: 0.2, ..l0 };
        for k in 0..1200 {
            let t = k as f64 * 0.01;
            let shifted = l0.position_at((t - 0.2).max(0.0));
            assert!(l1.position_at(t).distance(shifted) < 1e-12);
        }
    }

    #[test]
    fn zero_attributes_draw_nothing() {
        let mut rng = stream(1, 0, Purpose::Delays);
        assert_eq!(sample_delays(4, 0.0, &mut rng), vec![0.0; 4]);
        let p = vec![Point2::new(1.0, 2.0)];
        assert_eq!(perturb_positions(&p, 0.0, &mut rng), p);
    }

    #[test]
    fn delay_moments() {
        let mut rng = stream(11, 0, Purpose::Delays);
        let d = sample_delays(100_000, 0.2, &mut rng);
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((mean - 0.1).abs() < 0.002);
        assert!(d.iter().all(|&x| (0.0..0.2).contains(&x)));
        let again = sample_delays(10, 0.2, &mut stream(11, 0, Purpose::Delays));
        assert_eq!(&d[..10], &again[..]);
    }

    #[test]
    fn perturbation_moments() {
        let mut rng = stream(5, 0, Purpose::Perturbation);
        let p = vec![Point2::ORIGIN; 50_000];
        let q = perturb_positions(&p, 0.2, &mut rng);
        let vals: Vec<f64> = q.iter().flat_map(|p| [p.x, p.y]).collect();
        assert!(vals.iter().all(|v| v.abs() <= 0.2));
        let var = vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64;
        assert!((var - 0.04 / 3.0).abs() < 3e-4);
    }

    #[test]
    fn validation() {
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let pts = vec![
            Point2::new(1.0, 0.5),
            Point2::new(-1.0, 0.1),
            Point2::new(0.0, -2.0),
        ];
        let s = Scenario::new(pts.clone(), c);
        assert!(s.validate().is_ok());
        let two = Scenario::new(pts[..2].to_vec(), c);
        assert!(matches!(two.validate(), Err(Error::TooFewAgents { .. })));
        let bad = Scenario {
            dt: 0.0,
            ..s.clone()
        };
        assert!(bad.validate().is_err());
        let bad = Scenario { delta: 1.0, ..s };
        assert!(bad.validate().is_err());
    }
}
