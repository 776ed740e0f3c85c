//! Conflict-free goal assignment for agents forming a circle.
//!
//! Agents are peeled into nested convex layers; each one gets a search space
//! from its layer, and a unique goal is chosen on the arc where that space
//! meets the enclosing circle. Straight-line flights to these goals can be
//! checked kinematically or flown by a simple quadrotor model.

pub mod angle;
pub mod assignment;
pub mod dynamics;
pub mod enclosing;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kinematics;
pub mod metrics;
pub mod montecarlo;
pub mod presets;
pub mod rng;
pub mod search_space;

pub use assignment::{assign_all, assign_all_spaced, plan, plan_spaced, AgentGoal, GoalAssignment};
pub use error::{Error, Result};
pub use geometry::{convex_layers, Circle, ConvexLayerSet, Point2};
