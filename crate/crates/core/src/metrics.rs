//! Path-length and conflict metrics for single runs and batches.

use serde::{Deserialize, Serialize};

use crate::assignment::{audit, GoalAssignment};
use crate::error::{Error, Result};

/// Serializes an unbounded separation (a lone agent) as `null`.
pub(crate) mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Agents closer than this to the boundary have no meaningful path ratio.
pub const BOUNDARY_GUARD: f64 = 1e-9;

fn shortfall(assignment: &GoalAssignment, agent: usize) -> Result<f64> {
    let c = assignment.circle;
    let gap = c.radius - assignment.positions[agent].distance(c.center);
    if gap <= BOUNDARY_GUARD {
        return Err(Error::DegenerateRadius { agent });
    }
    Ok(gap)
}

fn path_length(assignment: &GoalAssignment, agent: usize) -> f64 {
    assignment.goals[agent]
        .goal
        .distance(assignment.positions[agent])
}

/// Assigned path length over the shortest distance to the boundary.
pub fn path_ratio(agent: usize, assignment: &GoalAssignment) -> Result<f64> {
    Ok(path_length(assignment, agent) / shortfall(assignment, agent)?)
}

pub fn path_ratios(assignment: &GoalAssignment) -> Result<Vec<f64>> {
    (0..assignment.len())
        .map(|i| path_ratio(i, assignment))
        .collect()
}

/// Relative excess of the summed path lengths over the summed shortest
/// distances.
pub fn excess_path(assignment: &GoalAssignment) -> Result<f64> {
    let mut paths = 0.0;
    let mut shortest = 0.0;
    for i in 0..assignment.len() {
        shortest += shortfall(assignment, i)?;
        paths += path_length(assignment, i);
    }
    Ok(paths / shortest - 1.0)
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub path_ratios: Vec<f64>,
    /// Swarm excess path, as a fraction (not percent).
    pub excess_path: f64,
    /// Distinct conflicting pairs.
    pub n_conflicts: usize,
    /// Minimum separation over the run.
    #[serde(with = "unbounded")]
    pub min_e: f64,
    pub max_tf: f64,
    /// Wall-clock seconds spent assigning goals; not serialized so that
    /// reports are reproducible byte for byte.
    #[serde(skip)]
    pub assign_time: f64,
    pub layer_count: usize,
    pub modified_goals: usize,
    /// Goals pairwise distinct, on their own arcs and on the circle.
    pub goals_audited: bool,
}

impl TrialMetrics {
    pub fn from_assignment(
        assignment: &GoalAssignment,
        n_conflicts: usize,
        min_e: f64,
        assign_time: f64,
    ) -> Result<Self> {
        Ok(TrialMetrics {
            path_ratios: path_ratios(assignment)?,
            excess_path: excess_path(assignment)?,
            n_conflicts,
            min_e,
            max_tf: assignment.max_arrival_time(),
            assign_time,
            layer_count: assignment.layer_count,
            modified_goals: assignment.goals.iter().filter(|g| g.was_modified).count(),
            goals_audited: audit(assignment).passed(),
        })
    }
}

/// Batch statistics. Conflict statistics are taken over conflicted trials
/// only and are all zero when there are none.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub conflicted_trials: usize,
    pub p_col: f64,
    pub mu_col: f64,
    pub sigma_col: f64,
    pub n_max_col: usize,
    /// Mean excess path, as a fraction.
    pub s_m_avg: f64,
    pub s_m_max: f64,
    pub mean_path_ratio: f64,
    #[serde(with = "unbounded")]
    pub min_e: f64,
    /// Trials whose goals failed the uniqueness/containment audit.
    pub audit_failures: usize,
    #[serde(skip)]
    pub mean_assign_time: f64,
}

pub fn aggregate(trials: &[TrialMetrics]) -> Aggregate {
    if trials.is_empty() {
        return Aggregate::default();
    }
    let n = trials.len() as f64;
    let counts: Vec<f64> = trials
        .iter()
        .filter(|t| t.n_conflicts > 0)
        .map(|t| t.n_conflicts as f64)
        .collect();
    let (mu_col, sigma_col) = mean_std(&counts);
    let ratios: Vec<f64> = trials
        .iter()
        .flat_map(|t| t.path_ratios.iter().copied())
        .collect();
    Aggregate {
        trials: trials.len(),
        conflicted_trials: counts.len(),
        p_col: counts.len() as f64 / n,
        mu_col,
        sigma_col,
        n_max_col: trials.iter().map(|t| t.n_conflicts).max().unwrap_or(0),
        s_m_avg: trials.iter().map(|t| t.excess_path).sum::<f64>() / n,
        s_m_max: trials.iter().map(|t| t.excess_path).fold(0.0, f64::max),
        mean_path_ratio: mean_std(&ratios).0,
        min_e: trials.iter().map(|t| t.min_e).fold(f64::INFINITY, f64::min),
        audit_failures: trials.iter().filter(|t| !t.goals_audited).count(),
        mean_assign_time: trials.iter().map(|t| t.assign_time).sum::<f64>() / n,
    }
}
