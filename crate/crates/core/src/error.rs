use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("agents {first} and {second} are collocated (distance {distance:e} m)")]
    DuplicatePoints {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },

    #[error("at least {required} agents are required, got {got}")]
    TooFewAgents { required: usize, got: usize },

    #[error("circle radius must be positive and finite, got {radius}")]
    InvalidCircle { radius: f64 },

    #[error("agent {index} is not strictly inside the circle (distance {distance} m, radius {radius} m)")]
    OutsideCircle {
        index: usize,
        distance: f64,
        radius: f64,
    },

    #[error("search-space apex is not strictly inside the circle (distance {distance} m, radius {radius} m)")]
    ApexOutsideCircle { distance: f64, radius: f64 },

    #[error("conflict flagged at angle {angle} but no assigned goal lies on the arc")]
    ImpossibleConflict { angle: f64 },

    #[error("no free goal position is left on the arc of agent {agent}")]
    ArcSaturated { agent: usize },

    #[error("agent {agent} lies on the boundary circle; path ratio is undefined")]
    DegenerateRadius { agent: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "could not place {n} agents with separation {min_separation} m after {attempts} rejections"
    )]
    PackingInfeasible {
        n: usize,
        min_separation: f64,
        attempts: usize,
    },

    #[error("quadrotor {agent} diverged at t = {time:.3} s")]
    Unstable { agent: usize, time: f64 },

    #[error("{field}: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than an internal fault.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::ImpossibleConflict { .. } | Error::Unstable { .. } | Error::Io(_)
        )
    }
}
