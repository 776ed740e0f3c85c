//! Scenario, goal and report files, time-series export and presets.
//!
//! Structured files are JSON, time series are CSV. Angles are radians in
//! `[0, 2π)`, lengths meters, times seconds.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::assignment::{GoalAssignment, DEFAULT_DELTA_DISC, DEFAULT_DELTA_POINT};
use crate::dynamics::{ControllerGains, HeterogeneityMode, QuadrotorParams};
use crate::enclosing::{enclosing_circle, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::geometry::{Circle, Point2};
use crate::kinematics::{Leg, Scenario, TrajectoryLog, DEFAULT_DT, DEFAULT_SPEED};
use crate::montecarlo::{FlightModel, MonteCarloReport};
use crate::presets::{hexagon_example, random_positions, Region};
use crate::rng::{stream, Purpose};

pub const SCHEMA_VERSION: u32 = 1;

fn invalid(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses JSON, reporting the offending field path and line on failure.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let field = if path == "." {
            "<document>".to_string()
        } else {
            path
        };
        invalid(field, inner.to_string())
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json_str(&fs::read_to_string(path)?)
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRecord {
    pub id: u64,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleRecord {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl From<Circle> for CircleRecord {
    fn from(c: Circle) -> Self {
        CircleRecord {
            cx: c.center.x,
            cy: c.center.y,
            r: c.radius,
        }
    }
}

impl CircleRecord {
    pub fn to_circle(&self) -> Result<Circle> {
        Circle::new(Point2::new(self.cx, self.cy), self.r)
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

/// Execution parameters of a scenario file. Everything is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default = "default_speed")]
    pub v: f64,
    /// Conflict shift fraction; 0.2 for point agents and 0.5 for disc
    /// agents when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Safety distance; 0 means point agents.
    #[serde(default)]
    pub d_s: f64,
    /// Physical radius; half of `d_s` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_radius: Option<f64>,
    #[serde(default)]
    pub delta_u: f64,
    #[serde(default)]
    pub delta_td: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Relative inflation of the enclosing circle when none is given.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub dynamics: bool,
    #[serde(default)]
    pub quadrotor: QuadrotorParams,
    #[serde(default)]
    pub gains: ControllerGains,
    #[serde(default)]
    pub heterogeneity: HeterogeneityMode,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            v: DEFAULT_SPEED,
            delta: None,
            d_s: 0.0,
            agent_radius: None,
            delta_u: 0.0,
            delta_td: 0.0,
            dt: DEFAULT_DT,
            margin: DEFAULT_MARGIN,
            dynamics: false,
            quadrotor: QuadrotorParams::default(),
            gains: ControllerGains::default(),
            heterogeneity: HeterogeneityMode::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub agents: Vec<AgentRecord>,
    /// Boundary circle; the inflated minimum enclosing circle when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<CircleRecord>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioFile {
    pub fn new(agents: Vec<AgentRecord>) -> Self {
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            agents,
            circle: None,
            parameters: Parameters::default(),
            seed: 0,
        }
    }

    /// Agents numbered from 0 at `positions`.
    pub fn from_positions(positions: &[Point2]) -> Self {
        Self::new(
            positions
                .iter()
                .enumerate()
                .map(|(i, p)| AgentRecord {
                    id: i as u64,
                    x: p.x,
                    y: p.y,
                })
                .collect(),
        )
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = from_json_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn read_from<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn ids(&self) -> Vec<u64> {
        self.agents.iter().map(|a| a.id).collect()
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.agents.iter().map(|a| Point2::new(a.x, a.y)).collect()
    }

    pub fn circle(&self) -> Result<Circle> {
        match self.circle {
            Some(c) => c.to_circle(),
            None => enclosing_circle(&self.positions(), self.parameters.margin),
        }
    }

    pub fn flight_model(&self) -> Option<FlightModel> {
        let p = &self.parameters;
        p.dynamics.then_some(FlightModel {
            quadrotor: p.quadrotor,
            heterogeneity: p.heterogeneity,
            gains: p.gains,
        })
    }

    fn build(&self) -> Result<Scenario> {
        let p = &self.parameters;
        let default_delta = if p.d_s > 0.0 {
            DEFAULT_DELTA_DISC
        } else {
            DEFAULT_DELTA_POINT
        };
        Ok(Scenario {
            positions: self.positions(),
            circle: self.circle()?,
            speed: p.v,
            agent_radius: p.agent_radius.unwrap_or(0.5 * p.d_s),
            d_s: p.d_s,
            delta: p.delta.unwrap_or(default_delta),
            delta_u: p.delta_u,
            delta_td: p.delta_td,
            seed: self.seed,
            dt: p.dt,
        })
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        self.validate()?;
        self.build()
    }

    /// Checks everything a run depends on; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        let mut seen = HashMap::new();
        for (k, a) in self.agents.iter().enumerate() {
            if let Some(first) = seen.insert(a.id, k) {
                return Err(invalid(
                    format!("agents[{k}].id"),
                    format!("id {} already used by agents[{first}]", a.id),
                ));
            }
            if !(a.x.is_finite() && a.y.is_finite()) {
                return Err(invalid(
                    format!("agents[{k}]"),
                    "coordinates must be finite",
                ));
            }
        }
        if let Some(c) = self.circle {
            if !(c.cx.is_finite() && c.cy.is_finite()) {
                return Err(invalid("circle", "center must be finite"));
            }
            if !(c.r.is_finite() && c.r > 0.0) {
                return Err(invalid(
                    "circle.r",
                    format!("must be positive, got {}", c.r),
                ));
            }
        }
        let p = &self.parameters;
        if !(p.margin.is_finite() && p.margin > 0.0) {
            return Err(invalid(
                "parameters.margin",
                format!("must be positive, got {}", p.margin),
            ));
        }
        if let Err(e) = p.quadrotor.validate() {
            return Err(invalid("parameters.quadrotor", e.to_string()));
        }
        let scenario = self.build().map_err(|e| self.locate(e))?;
        scenario.validate().map_err(|e| self.locate(e))
    }

    /// Attaches a field path to a domain error.
    fn locate(&self, e: Error) -> Error {
        match e {
            Error::TooFewAgents { required, got } => invalid(
                "agents",
                format!("at least {required} agents are required, got {got}"),
            ),
            Error::DuplicatePoints { first, second, .. } => invalid(
                format!("agents[{second}]"),
                format!("collocated with agents[{first}]"),
            ),
            Error::OutsideCircle {
                index,
                distance,
                radius,
            } => invalid(
                format!("agents[{index}]"),
                format!(
                    "not strictly inside the circle (distance {distance} m, radius {radius} m)"
                ),
            ),
            Error::InvalidParameter { name, reason } => {
                invalid(format!("parameters.{name}"), reason)
            }
            Error::InvalidCircle { radius } => {
                invalid("circle", format!("invalid radius {radius}"))
            }
            other => other,
        }
    }
}

/// One agent's goal, with enough to replay its motion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalRecord {
    pub id: u64,
    /// Position the goal was planned from.
    pub start_x: f64,
    pub start_y: f64,
    pub goal_x: f64,
    pub goal_y: f64,
    pub goal_phi: f64,
    pub psi: f64,
    pub t_f: f64,
    /// Zero-based, 0 = outermost layer.
    pub layer: usize,
    pub was_modified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalsFile {
    pub schema_version: u32,
    pub circle: CircleRecord,
    pub v: f64,
    pub layer_count: usize,
    pub goals: Vec<GoalRecord>,
}

impl GoalsFile {
    pub fn from_assignment(ids: &[u64], assignment: &GoalAssignment) -> Self {
        let goals = assignment
            .goals
            .iter()
            .zip(&assignment.positions)
            .zip(ids)
            .map(|((g, start), &id)| GoalRecord {
                id,
                start_x: start.x,
                start_y: start.y,
                goal_x: g.goal.x,
                goal_y: g.goal.y,
                goal_phi: g.goal_phi,
                psi: g.psi,
                t_f: g.t_f,
                layer: g.layer,
                was_modified: g.was_modified,
            })
            .collect();
        GoalsFile {
            schema_version: SCHEMA_VERSION,
            circle: assignment.circle.into(),
            v: assignment.speed,
            layer_count: assignment.layer_count,
            goals,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GoalsFile = from_json_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", file.schema_version),
            ));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Straight legs from the recorded starts, one delay per goal.
    pub fn legs(&self, delays: &[f64]) -> Vec<Leg> {
        self.goals
            .iter()
            .zip(delays)
            .map(|(g, &delay)| Leg {
                start: Point2::new(g.start_x, g.start_y),
                end: Point2::new(g.goal_x, g.goal_y),
                delay,
                duration: g.t_f,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub agent_id: u64,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ETraceRow {
    pub t: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

/// Summary of a Monte Carlo report in one CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub r_c: f64,
    pub trials: usize,
    pub d_s: f64,
    pub dynamics: bool,
    pub delta_u: f64,
    pub delta_td: f64,
    pub seed: u64,
    pub p_col: f64,
    pub mu_col: f64,
    pub sigma_col: f64,
    pub n_max_col: usize,
    pub s_m_avg: f64,
    pub s_m_max: f64,
    pub mean_path_ratio: f64,
    pub min_e: Option<f64>,
    pub failed_trials: usize,
    pub audit_failures: usize,
}

impl From<&MonteCarloReport> for ReportRow {
    fn from(r: &MonteCarloReport) -> Self {
        let a = &r.aggregate;
        ReportRow {
            n: r.spec.n,
            r_c: r.spec.r_c,
            trials: r.spec.trials,
            d_s: r.spec.agent.safety_distance(),
            dynamics: r.spec.dynamics,
            delta_u: r.spec.delta_u,
            delta_td: r.spec.delta_td,
            seed: r.spec.seed,
            p_col: a.p_col,
            mu_col: a.mu_col,
            sigma_col: a.sigma_col,
            n_max_col: a.n_max_col,
            s_m_avg: a.s_m_avg,
            s_m_max: a.s_m_max,
            mean_path_ratio: a.mean_path_ratio,
            min_e: a.min_e.is_finite().then_some(a.min_e),
            failed_trials: r.failed_trials,
            audit_failures: a.audit_failures,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => {
            let field = match &kind {
                csv::ErrorKind::Deserialize { err, .. } => {
                    err.field().map(|f| format!("column {}", f + 1))
                }
                _ => None,
            };
            let message = match line {
                Some(l) => format!("{kind:?} at line {l}"),
                None => format!("{kind:?}"),
            };
            invalid(field.unwrap_or_else(|| "<csv>".into()), message)
        }
    }
}

pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: DeserializeOwned>(reader: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

/// Appends one row to a CSV file, writing the header first when the file is
/// new or empty.
pub fn append_csv<T: Serialize>(path: &Path, row: &T) -> Result<()> {
    let fresh = fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    w.serialize(row).map_err(csv_error)?;
    w.flush()?;
    Ok(())
}

/// Rows `t,agent_id,x,y`, time-major.
pub fn trajectory_rows(log: &TrajectoryLog, ids: &[u64]) -> Vec<TrajectoryRow> {
    log.times
        .iter()
        .zip(&log.positions)
        .flat_map(|(&t, ps)| {
            ps.iter().zip(ids).map(move |(p, &agent_id)| TrajectoryRow {
                t,
                agent_id,
                x: p.x,
                y: p.y,
            })
        })
        .collect()
}

pub fn e_trace_rows(log: &TrajectoryLog) -> Vec<ETraceRow> {
    log.times
        .iter()
        .zip(&log.e_trace)
        .map(|(&t, &e)| ETraceRow { t, e })
        .collect()
}

/// Named scenario generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    /// 54 agents on two nested hexagons and a segment, circle radius 9.4 m.
    HexagonExample2,
    /// `n` agents uniform in a region of radius `r_c` about the origin.
    RandomDisc {
        n: usize,
        r_c: f64,
        min_separation: f64,
        region: Region,
    },
}

impl FromStr for Preset {
    type Err = Error;

    /// Parses a preset name; random presets get 20 agents in a 4 m disc.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hexagon_example2" => Ok(Preset::HexagonExample2),
            "random_disc" => Ok(Preset::RandomDisc {
                n: 20,
                r_c: 4.0,
                min_separation: 0.0,
                region: Region::Disc,
            }),
            other => Err(invalid(
                "preset",
                format!("unknown preset `{other}` (expected hexagon_example2 or random_disc)"),
            )),
        }
    }
}

pub fn generate_preset(preset: &Preset, seed: u64) -> Result<ScenarioFile> {
    match *preset {
        Preset::HexagonExample2 => {
            let (points, circle) = hexagon_example();
            let mut file = ScenarioFile::from_positions(&points);
            file.circle = Some(circle.into());
            file.seed = seed;
            Ok(file)
        }
        Preset::RandomDisc {
            n,
            r_c,
            min_separation,
            region,
        } => {
            let mut rng = stream(seed, 0, Purpose::Positions);
            let points = random_positions(n, r_c, min_separation, region, &mut rng)?;
            let mut file = ScenarioFile::from_positions(&points);
            file.seed = seed;
            Ok(file)
        }
    }
}
