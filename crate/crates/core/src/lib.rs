//! Goal recognition over STRIPS planning tasks using ordered fact landmarks.

pub mod error;
pub mod landmarks;
pub mod obsgen;
pub mod partitions;
pub mod pddl;
pub mod recognition;
pub mod rpg;
pub mod task;

pub use error::{Error, Result};
pub use pddl::{parse_domain, parse_problem, GroundFact, PlanningDomain, PlanningInstance};
pub use task::{apply, applicable, ground, ground_instance, Action, ActionId, FactId, GroundTask, State};
