//! The grid-cost minimisation problem as a sparse linear program.
//!
//! [`build_problem`] turns a validated [`Scenario`](crate::scenario::Scenario)
//! into an [`LpModel`]; [`extract_solution`] maps a primal vector back to
//! power, energy and fleet trajectories.

mod build;
mod extract;
mod index;
mod model;
mod mps;
mod prices;
mod residuals;

pub use build::{build_elastic, build_problem, ElasticModel};
pub use extract::{extract_solution, AircraftTrajectory, AirportPower, FleetReport, SolutionReport};
pub use index::{IndexError, VarIndex, VarKind};
pub use model::{LpModel, RowGroup, Triplet};
pub use mps::{read_mps, write_mps, MpsError};
pub use prices::PriceSeries;
pub use residuals::{residuals, ResidualSummary};

use thiserror::Error;

use crate::scenario::ScenarioError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("statically infeasible: {0}")]
    StaticInfeasible(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("primal vector has {got} entries, model has {expected} columns")]
    Length { expected: usize, got: usize },
    #[error("model carries no variable index")]
    NoIndex,
    #[error("model and scenario disagree: {0}")]
    Mismatch(String),
    #[error("recomputed objective {recomputed} differs from solver objective {reported}")]
    Objective { recomputed: f64, reported: f64 },
}
