//! Small-angle quadrotor model under cascaded PD control.
//!
//! The outer loop turns position and velocity errors into commanded
//! accelerations, the accelerations into roll/pitch set-points, and the inner
//! loop turns attitude errors into torques. Each agent tracks its straight-line
//! leg at a fixed altitude and zero yaw.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::kinematics::{
    closest_approach, min_pairwise_distance, sample_times, ConflictPair, Leg, TrajectoryLog,
};

pub const GRAVITY: f64 = 9.81;
/// Integration step.
pub const DT_DYN: f64 = 0.002;
/// Commanded altitude of every agent.
pub const CRUISE_ALTITUDE: f64 = 1.0;
/// Any state magnitude beyond this counts as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
/// Roll or pitch beyond this leaves the small-angle regime.
pub const SMALL_ANGLE_LIMIT: f64 = 0.5;
/// Extra flight time after the last nominal arrival.
pub const DEFAULT_SETTLE: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrotorParams {
    pub mass: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    GRAVITY
}

impl Default for QuadrotorParams {
    fn default() -> Self {
        QuadrotorParams {
            mass: 0.964,
            jx: 8.55e-3,
            jy: 8.55e-3,
            jz: 1.47e-2,
            gravity: GRAVITY,
        }
    }
}

impl QuadrotorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("quadrotor.mass", self.mass),
            ("quadrotor.jx", self.jx),
            ("quadrotor.jy", self.jy),
            ("quadrotor.jz", self.jz),
            ("quadrotor.gravity", self.gravity),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn inertia(&self) -> Vector3<f64> {
        Vector3::new(self.jx, self.jy, self.jz)
    }
}

/// Diagonal PD gains of the position loop (`kp`, `kd`) and attitude loop
/// (`kp_att`, `kd_att`), ordered x/y/z and roll/pitch/yaw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    pub kp: [f64; 3],
    pub kd: [f64; 3],
    pub kp_att: [f64; 3],
    pub kd_att: [f64; 3],
}

impl Default for ControllerGains {
    fn default() -> Self {
        ControllerGains {
            kp: [7.76, 6.46, 7.02],
            kd: [4.56, 4.16, 5.16],
            kp_att: [4.33, 3.45, 4.02],
            kd_att: [1.59, 1.16, 2.37],
        }
    }
}

impl ControllerGains {
    pub fn validate(&self) -> Result<()> {
        let all = self
            .kp
            .iter()
            .chain(&self.kd)
            .chain(&self.kp_att)
            .chain(&self.kd_att);
        if all.into_iter().all(|g| g.is_finite() && *g > 0.0) {
            Ok(())
        } else {
            Err(Error::param("gains", "all gains must be positive"))
        }
    }
}

/// How per-agent mass and inertia are drawn around the nominal values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeterogeneityMode {
    /// Everyone flies the nominal airframe.
    None,
    /// One factor scales mass and all inertias together.
    #[default]
    Correlated,
    /// Separate factors for mass, roll/pitch inertia and yaw inertia.
    Independent,
}

/// Draws per-agent parameters within ±20 % of `nominal`.
pub fn sample_heterogeneity<R: Rng>(
    nominal: &QuadrotorParams,
    mode: HeterogeneityMode,
    rng: &mut R,
) -> QuadrotorParams {
    let mut factor = || rng.random_range(0.8..=1.2);
    match mode {
        HeterogeneityMode::None => *nominal,
        HeterogeneityMode::Correlated => {
            let k = factor();
            QuadrotorParams {
                mass: nominal.mass * k,
                jx: nominal.jx * k,
                jy: nominal.jy * k,
                jz: nominal.jz * k,
                gravity: nominal.gravity,
            }
        }
        HeterogeneityMode::Independent => {
            let (km, kxy, kz) = (factor(), factor(), factor());
            QuadrotorParams {
                mass: nominal.mass * km,
                jx: nominal.jx * kxy,
                jy: nominal.jy * kxy,
                jz: nominal.jz * kz,
                gravity: nominal.gravity,
            }
        }
    }
}

/// World-frame position and velocity, Euler angles (roll, pitch, yaw) and
/// their rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadState {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: Vector3<f64>,
    pub rates: Vector3<f64>,
}

impl QuadState {
    /// At rest, level, at `altitude` above `at`.
    pub fn hover(at: Point2, altitude: f64) -> Self {
        QuadState {
            position: Vector3::new(at.x, at.y, altitude),
            velocity: Vector3::zeros(),
            attitude: Vector3::zeros(),
            rates: Vector3::zeros(),
        }
    }

    pub fn planar(&self) -> Point2 {
        Point2::new(self.position.x, self.position.y)
    }

    fn max_abs(&self) -> f64 {
        [self.position, self.velocity, self.attitude, self.rates]
            .iter()
            .map(|v| v.amax())
            .fold(0.0, f64::max)
    }

    // written so that NaN counts as diverged
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn is_diverged(&self) -> bool {
        !(self.max_abs() <= DIVERGENCE_LIMIT)
    }

    pub fn in_small_angle_regime(&self) -> bool {
        self.attitude.x.abs() < SMALL_ANGLE_LIMIT && self.attitude.y.abs() < SMALL_ANGLE_LIMIT
    }

    fn axpy(&self, h: f64, d: &QuadState) -> QuadState {
        QuadState {
            position: self.position + d.position * h,
            velocity: self.velocity + d.velocity * h,
            attitude: self.attitude + d.attitude * h,
            rates: self.rates + d.rates * h,
        }
    }
}

/// Body-to-world rotation for roll, pitch, yaw in the ZYX convention.
pub fn rotation_matrix(attitude: &Vector3<f64>) -> Matrix3<f64> {
    let (sf, cf) = attitude.x.sin_cos();
    let (st, ct) = attitude.y.sin_cos();
    let (sp, cp) = attitude.z.sin_cos();
    Matrix3::new(
        ct * cp,
        sf * st * cp - cf * sp,
        cf * st * cp + sf * sp,
        ct * sp,
        sf * st * sp + cf * cp,
        cf * st * sp - sf * cp,
        -st,
        sf * ct,
        cf * ct,
    )
}

/// Roll and pitch set-points that produce the horizontal acceleration
/// `(acc_x, acc_y)` at heading `yaw` to first order.
///
/// Linearizing the thrust direction about hover gives
/// `ẍ = g(θ cos ψ + φ sin ψ)` and `ÿ = g(θ sin ψ − φ cos ψ)`; this is its inverse.
pub fn commanded_attitude(acc_x: f64, acc_y: f64, yaw: f64, gravity: f64) -> (f64, f64) {
    let (s, c) = yaw.sin_cos();
    let roll = (s * acc_x - c * acc_y) / gravity;
    let pitch = (c * acc_x + s * acc_y) / gravity;
    (roll, pitch)
}

/// Desired position and velocity at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub yaw: f64,
}

impl Reference {
    /// Point on `leg` at time `t`, at cruise altitude.
    pub fn on_leg(leg: &Leg, t: f64) -> Self {
        let p = leg.position_at(t);
        let v = leg.velocity_at(t);
        Reference {
            position: Vector3::new(p.x, p.y, CRUISE_ALTITUDE),
            velocity: Vector3::new(v.x, v.y, 0.0),
            yaw: 0.0,
        }
    }
}

/// Thrust and body torques for one control update.
pub fn control_step(
    state: &QuadState,
    reference: &Reference,
    gains: &ControllerGains,
    params: &QuadrotorParams,
) -> (f64, Vector3<f64>) {
    let kp = Vector3::from(gains.kp);
    let kd = Vector3::from(gains.kd);
    let acc = kd.component_mul(&(reference.velocity - state.velocity))
        + kp.component_mul(&(reference.position - state.position));
    let (roll, pitch) = commanded_attitude(acc.x, acc.y, reference.yaw, params.gravity);
    let thrust = params.mass * (params.gravity + acc.z);
    let att_cmd = Vector3::new(roll, pitch, reference.yaw);
    let torque = Vector3::from(gains.kd_att).component_mul(&(-state.rates))
        + Vector3::from(gains.kp_att).component_mul(&(att_cmd - state.attitude));
    (thrust, torque)
}

/// Time derivative of the state under constant inputs.
pub fn derivative(
    state: &QuadState,
    thrust: f64,
    torque: &Vector3<f64>,
    params: &QuadrotorParams,
) -> QuadState {
    let (sf, cf) = state.attitude.x.sin_cos();
    let (st, ct) = state.attitude.y.sin_cos();
    let (sp, cp) = state.attitude.z.sin_cos();
    // third column of the rotation matrix is the thrust direction
    let axis = Vector3::new(cf * st * cp + sf * sp, cf * st * sp - sf * cp, cf * ct);
    QuadState {
        position: state.velocity,
        velocity: axis * (thrust / params.mass) - Vector3::new(0.0, 0.0, params.gravity),
        attitude: state.rates,
        rates: torque.component_div(&params.inertia()),
    }
}

/// One fixed RK4 step with inputs held constant.
pub fn integrate(
    state: &QuadState,
    thrust: f64,
    torque: &Vector3<f64>,
    params: &QuadrotorParams,
    dt: f64,
) -> QuadState {
    let k1 = derivative(state, thrust, torque, params);
    let k2 = derivative(&state.axpy(0.5 * dt, &k1), thrust, torque, params);
    let k3 = derivative(&state.axpy(0.5 * dt, &k2), thrust, torque, params);
    let k4 = derivative(&state.axpy(dt, &k3), thrust, torque, params);
    QuadState {
        position: state.position
            + (k1.position + (k2.position + k3.position) * 2.0 + k4.position) * (dt / 6.0),
        velocity: state.velocity
            + (k1.velocity + (k2.velocity + k3.velocity) * 2.0 + k4.velocity) * (dt / 6.0),
        attitude: state.attitude
            + (k1.attitude + (k2.attitude + k3.attitude) * 2.0 + k4.attitude) * (dt / 6.0),
        rates: state.rates + (k1.rates + (k2.rates + k3.rates) * 2.0 + k4.rates) * (dt / 6.0),
    }
}

/// Planar track of one agent sampled every `dt`, plus summary numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct FlownTrack {
    pub samples: Vec<Point2>,
    /// Largest planar distance from the reference at any sample.
    pub max_deviation: f64,
    /// Largest `|z - z_d|` at any sample.
    pub max_altitude_error: f64,
    pub left_small_angle_regime: bool,
}

/// Flies one agent along `leg` from hover at its start, recording the planar
/// position at `times`. The integration step is `dt_dyn`, shortened so that
/// it divides the sample spacing.
pub fn fly(
    agent: usize,
    leg: &Leg,
    params: &QuadrotorParams,
    gains: &ControllerGains,
    times: &[f64],
    dt_dyn: f64,
) -> Result<FlownTrack> {
    let spacing = if times.len() > 1 {
        times[1] - times[0]
    } else {
        dt_dyn
    };
    let substeps = (spacing / dt_dyn).ceil().max(1.0) as usize;
    let h = spacing / substeps as f64;
    let mut state = QuadState::hover(leg.start, CRUISE_ALTITUDE);
    let mut track = FlownTrack {
        samples: Vec::with_capacity(times.len()),
        max_deviation: 0.0,
        max_altitude_error: 0.0,
        left_small_angle_regime: false,
    };
    let mut t = 0.0;
    for (k, &sample_t) in times.iter().enumerate() {
        if k > 0 {
            for s in 0..substeps {
                let reference = Reference::on_leg(leg, t);
                let (thrust, torque) = control_step(&state, &reference, gains, params);
                state = integrate(&state, thrust, &torque, params, h);
                t = times[k - 1] + (s + 1) as f64 * h;
            }
            t = sample_t;
            if state.is_diverged() {
                return Err(Error::Unstable { agent, time: t });
            }
        }
        let p = state.planar();
        track.max_deviation = track
            .max_deviation
            .max(p.distance(leg.position_at(sample_t)));
        track.max_altitude_error = track
            .max_altitude_error
            .max((state.position.z - CRUISE_ALTITUDE).abs());
        track.left_small_angle_regime |= !state.in_small_angle_regime();
        track.samples.push(p);
    }
    Ok(track)
}

/// Tracks of a whole swarm on a common time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmFlight {
    pub times: Vec<f64>,
    pub tracks: Vec<FlownTrack>,
}

impl SwarmFlight {
    /// Positions of all agents at sample `k`.
    pub fn snapshot(&self, k: usize) -> Vec<Point2> {
        self.tracks.iter().map(|tr| tr.samples[k]).collect()
    }
}

/// Flies every leg until the last nominal arrival plus `settle`, sampling
/// every `dt`.
pub fn fly_swarm(
    legs: &[Leg],
    params: &[QuadrotorParams],
    gains: &ControllerGains,
    dt: f64,
    settle: f64,
) -> Result<SwarmFlight> {
    let horizon = legs.iter().map(Leg::arrival).fold(0.0, f64::max) + settle;
    let times = sample_times(horizon, dt);
    let tracks = legs
        .par_iter()
        .zip(params)
        .enumerate()
        .map(|(i, (leg, p))| fly(i, leg, p, gains, &times, DT_DYN))
        .collect::<Result<Vec<_>>>()?;
    Ok(SwarmFlight { times, tracks })
}

/// Conflicts among flown tracks.
///
/// A pair is watched until the later of its two nominal arrivals; the settle
/// phase after that only serves to let the vehicles come to rest. Pairs are
/// checked sample by sample; where two agents are closer than
/// `2·d_s` the gap to the next sample is refined tenfold by linear
/// interpolation. A pair is skipped outright when the closest approach of its
/// reference legs, less both agents' largest tracking deviations, already
/// exceeds `2·d_s`, since no sample could then come close enough to matter.
pub fn sampled_conflicts(flight: &SwarmFlight, legs: &[Leg], d_s: f64) -> (Vec<ConflictPair>, f64) {
    let n = legs.len();
    let watch = 2.0 * d_s;
    let mut pairs = Vec::new();
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let (ti, tj) = (&flight.tracks[i], &flight.tracks[j]);
            let (ref_min, _) = closest_approach(&legs[i], &legs[j]);
            let lower = ref_min - ti.max_deviation - tj.max_deviation;
            if lower > watch {
                min_sep = min_sep.min(lower);
                continue;
            }
            let mut best = (f64::INFINITY, 0.0);
            let end = legs[i].arrival().max(legs[j].arrival());
            let k_last = flight
                .times
                .partition_point(|&t| t <= end)
                .saturating_sub(1);
            for k in 0..=k_last {
                let d = ti.samples[k].distance(tj.samples[k]);
                if d < best.0 {
                    best = (d, flight.times[k]);
                }
                if d < watch && k < k_last {
                    for s in 1..10 {
                        let f = s as f64 / 10.0;
                        let pi = ti.samples[k].lerp(ti.samples[k + 1], f);
                        let pj = tj.samples[k].lerp(tj.samples[k + 1], f);
                        let d = pi.distance(pj);
                        if d < best.0 {
                            best = (
                                d,
                                flight.times[k] + f * (flight.times[k + 1] - flight.times[k]),
                            );
                        }
                    }
                }
            }
            min_sep = min_sep.min(best.0);
            if best.0 <= d_s {
                pairs.push(ConflictPair {
                    i,
                    j,
                    time: best.1,
                    distance: best.0,
                });
            }
        }
    }
    (pairs, min_sep)
}

/// Sampled motion, separation trace and conflicts of a flown swarm.
pub fn flight_log(flight: &SwarmFlight, legs: &[Leg], d_s: f64) -> TrajectoryLog {
    let positions: Vec<Vec<Point2>> = (0..flight.times.len())
        .map(|k| flight.snapshot(k))
        .collect();
    let e_trace: Vec<f64> = positions.iter().map(|p| min_pairwise_distance(p)).collect();
    let (conflict_pairs, min_e) = sampled_conflicts(flight, legs, d_s);
    TrajectoryLog {
        times: flight.times.clone(),
        positions,
        e_trace,
        min_e,
        conflict_pairs,
    }
}
