//! Batches of random scenarios with optional execution attributes.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::GoalAssignment;
use crate::assignment::{plan_spaced, DEFAULT_DELTA_DISC, DEFAULT_DELTA_POINT};
use crate::dynamics::{
    flight_log, fly_swarm, sample_heterogeneity, sampled_conflicts, ControllerGains,
    HeterogeneityMode, QuadrotorParams, SwarmFlight, DEFAULT_SETTLE,
};
use crate::enclosing::{enclosing_circle, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::geometry::{Circle, Point2};
use crate::kinematics::{
    analytic_conflicts, legs, perturb_positions, sample_delays, simulate, Leg, Scenario,
    TrajectoryLog, DEFAULT_DT, DEFAULT_SPEED,
};
use crate::metrics::{aggregate, Aggregate, TrialMetrics};
use crate::presets::{random_positions, Region};
use crate::rng::{stream, Purpose};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentModel {
    #[default]
    Point,
    /// Agents conflict when their centers come within `d_s`.
    Disc { d_s: f64 },
}

impl AgentModel {
    pub fn safety_distance(&self) -> f64 {
        match *self {
            AgentModel::Point => 0.0,
            AgentModel::Disc { d_s } => d_s,
        }
    }

    pub fn default_delta(&self) -> f64 {
        match self {
            AgentModel::Point => DEFAULT_DELTA_POINT,
            AgentModel::Disc { .. } => DEFAULT_DELTA_DISC,
        }
    }
}

fn default_speed() -> f64 {
    DEFAULT_SPEED
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

/// Everything needed to reproduce a batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub n: usize,
    /// Radius of the sampling region about the origin.
    pub r_c: f64,
    pub trials: usize,
    #[serde(default)]
    pub min_separation: f64,
    #[serde(default)]
    pub agent: AgentModel,
    #[serde(default)]
    pub region: Region,
    #[serde(default)]
    pub dynamics: bool,
    #[serde(default)]
    pub delta_u: f64,
    #[serde(default)]
    pub delta_td: f64,
    /// Conflict shift fraction; defaults by agent model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_speed")]
    pub speed: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Relative inflation of the minimum enclosing circle.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub heterogeneity: HeterogeneityMode,
    #[serde(default)]
    pub quadrotor: QuadrotorParams,
    #[serde(default)]
    pub gains: ControllerGains,
}

impl StudySpec {
    /// Point agents in a disc, no execution attributes.
    pub fn new(n: usize, r_c: f64, trials: usize, seed: u64) -> Self {
        StudySpec {
            n,
            r_c,
            trials,
            min_separation: 0.0,
            agent: AgentModel::Point,
            region: Region::Disc,
            dynamics: false,
            delta_u: 0.0,
            delta_td: 0.0,
            delta: None,
            speed: DEFAULT_SPEED,
            dt: DEFAULT_DT,
            margin: DEFAULT_MARGIN,
            seed,
            heterogeneity: HeterogeneityMode::Correlated,
            quadrotor: QuadrotorParams::default(),
            gains: ControllerGains::default(),
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| self.agent.default_delta())
    }

    pub fn flight_model(&self) -> FlightModel {
        FlightModel {
            quadrotor: self.quadrotor,
            heterogeneity: self.heterogeneity,
            gains: self.gains,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::TooFewAgents {
                required: 1,
                got: 0,
            });
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive, got {v}")))
            }
        };
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be non-negative, got {v}")))
            }
        };
        positive("r_c", self.r_c)?;
        positive("speed", self.speed)?;
        positive("dt", self.dt)?;
        positive("margin", self.margin)?;
        nonneg("min_separation", self.min_separation)?;
        nonneg("delta_u", self.delta_u)?;
        nonneg("delta_td", self.delta_td)?;
        nonneg("agent.d_s", self.agent.safety_distance())?;
        let delta = self.delta();
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(
                "delta",
                format!("must lie in (0, 1), got {delta}"),
            ));
        }
        self.quadrotor.validate()?;
        self.gains.validate()
    }
}

/// Random scenario number `trial` of `spec`.
///
/// Positions come from the trial's own stream; the circle is the inflated
/// minimum enclosing circle of the true positions.
pub fn sample_scenario(spec: &StudySpec, trial: usize) -> Result<Scenario> {
    let mut rng = stream(spec.seed, trial as u64, Purpose::Positions);
    let positions = random_positions(spec.n, spec.r_c, spec.min_separation, spec.region, &mut rng)?;
    let circle = match enclosing_circle(&positions, spec.margin) {
        Ok(c) => c,
        // a lone agent has no enclosing circle of its own
        Err(Error::InvalidCircle { .. }) => {
            Circle::new(Point2::ORIGIN, spec.r_c * (1.0 + spec.margin))?
        }
        Err(e) => return Err(e),
    };
    let d_s = spec.agent.safety_distance();
    Ok(Scenario {
        positions,
        circle,
        speed: spec.speed,
        agent_radius: 0.5 * d_s,
        d_s,
        delta: spec.delta(),
        delta_u: spec.delta_u,
        delta_td: spec.delta_td,
        seed: spec.seed,
        dt: spec.dt,
    })
}

/// Airframe and controller for flights with full dynamics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FlightModel {
    pub quadrotor: QuadrotorParams,
    pub heterogeneity: HeterogeneityMode,
    pub gains: ControllerGains,
}

/// Goals planned on the measured positions and the legs actually flown.
#[derive(Clone, Debug)]
pub struct Plan {
    pub assignment: GoalAssignment,
    pub legs: Vec<Leg>,
    /// Wall-clock seconds spent assigning goals.
    pub assign_time: f64,
}

/// Perturbs, assigns and draws delays for one scenario; `trial` keys the
/// random streams.
pub fn plan_scenario(scenario: &Scenario, trial: usize) -> Result<Plan> {
    let (seed, trial) = (scenario.seed, trial as u64);
    let planned = perturb_positions(
        &scenario.positions,
        scenario.delta_u,
        &mut stream(seed, trial, Purpose::Perturbation),
    );
    let started = Instant::now();
    let assignment = plan_spaced(
        &planned,
        &scenario.circle,
        scenario.speed,
        scenario.delta,
        scenario.d_s,
    )?;
    let assign_time = started.elapsed().as_secs_f64();
    let delays = sample_delays(
        scenario.len(),
        scenario.delta_td,
        &mut stream(seed, trial, Purpose::Delays),
    );
    let legs = legs(&assignment, &scenario.positions, &delays);
    Ok(Plan {
        assignment,
        legs,
        assign_time,
    })
}

fn fly_plan(
    scenario: &Scenario,
    trial: usize,
    plan: &Plan,
    model: &FlightModel,
) -> Result<SwarmFlight> {
    let mut rng = stream(scenario.seed, trial as u64, Purpose::Heterogeneity);
    let params: Vec<QuadrotorParams> = (0..plan.legs.len())
        .map(|_| sample_heterogeneity(&model.quadrotor, model.heterogeneity, &mut rng))
        .collect();
    fly_swarm(
        &plan.legs,
        &params,
        &model.gains,
        scenario.dt,
        DEFAULT_SETTLE,
    )
}

/// Plans and executes one scenario, kinematically or with `dynamics`.
pub fn run_scenario(
    scenario: &Scenario,
    trial: usize,
    dynamics: Option<&FlightModel>,
) -> Result<TrialMetrics> {
    let plan = plan_scenario(scenario, trial)?;
    let (pairs, min_e) = match dynamics {
        None => analytic_conflicts(&plan.legs, scenario.d_s),
        Some(model) => sampled_conflicts(
            &fly_plan(scenario, trial, &plan, model)?,
            &plan.legs,
            scenario.d_s,
        ),
    };
    TrialMetrics::from_assignment(&plan.assignment, pairs.len(), min_e, plan.assign_time)
}

/// Like [`run_scenario`], but keeps the sampled motion of every agent.
pub fn simulate_scenario(
    scenario: &Scenario,
    trial: usize,
    dynamics: Option<&FlightModel>,
) -> Result<(Plan, TrajectoryLog, TrialMetrics)> {
    let plan = plan_scenario(scenario, trial)?;
    let log = match dynamics {
        None => simulate(&plan.legs, scenario.d_s, scenario.dt),
        Some(model) => flight_log(
            &fly_plan(scenario, trial, &plan, model)?,
            &plan.legs,
            scenario.d_s,
        ),
    };
    let metrics = TrialMetrics::from_assignment(
        &plan.assignment,
        log.n_conflicts(),
        log.min_e,
        plan.assign_time,
    )?;
    Ok((plan, log, metrics))
}

pub fn run_trial(spec: &StudySpec, trial: usize) -> Result<TrialMetrics> {
    let scenario = sample_scenario(spec, trial)?;
    run_scenario(
        &scenario,
        trial,
        spec.dynamics.then(|| spec.flight_model()).as_ref(),
    )
}

/// Per-trial line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub n_conflicts: usize,
    pub excess_path: f64,
    #[serde(with = "crate::metrics::unbounded")]
    pub min_e: f64,
    pub max_tf: f64,
    pub layer_count: usize,
    pub goals_audited: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub spec: StudySpec,
    pub aggregate: Aggregate,
    pub failed_trials: usize,
    pub failures: Vec<TrialFailure>,
    pub per_trial: Vec<TrialSummary>,
}

/// Runs every trial of `spec` on `jobs` worker threads (all cores when
/// `None`). Results are folded in trial order, so the report does not depend
/// on the thread count.
pub fn run_study(spec: &StudySpec, jobs: Option<usize>) -> Result<MonteCarloReport> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::param("jobs", e.to_string()))?;
    let done = AtomicUsize::new(0);
    let step = (spec.trials / 10).max(1);
    let results: Vec<Result<TrialMetrics>> = pool.install(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|k| {
                let r = run_trial(spec, k);
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if finished.is_multiple_of(step) || finished == spec.trials {
                    log::info!("{finished}/{} trials", spec.trials);
                }
                r
            })
            .collect()
    });

    let mut ok = Vec::with_capacity(results.len());
    let mut per_trial = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (trial, r) in results.into_iter().enumerate() {
        match r {
            Ok(m) => {
                per_trial.push(TrialSummary {
                    trial,
                    n_conflicts: m.n_conflicts,
                    excess_path: m.excess_path,
                    min_e: m.min_e,
                    max_tf: m.max_tf,
                    layer_count: m.layer_count,
                    goals_audited: m.goals_audited,
                });
                ok.push(m);
            }
            Err(e) => {
                log::warn!("trial {trial} failed: {e}");
                failures.push(TrialFailure {
                    trial,
                    error: e.to_string(),
                });
            }
        }
    }
    let aggregate = aggregate(&ok);
    log::info!(
        "mean assignment time {:.3e} s over {} trials",
        aggregate.mean_assign_time,
        aggregate.trials
    );
    Ok(MonteCarloReport {
        spec: spec.clone(),
        aggregate,
        failed_trials: failures.len(),
        failures,
        per_trial,
    })
}
