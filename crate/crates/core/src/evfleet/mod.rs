//! Aggregated model of the bidirectionally charging landside vehicle fleet.

mod dynamics;
mod grid;
mod occupancy;

pub use dynamics::{
    fleet_power, simulate_forward, step_dynamics, FleetSnapshot, FleetState, StepControls,
    NEGATIVE_STATE_TOL,
};
pub use grid::{auto_buckets, validate_cfl, SocGrid, PREFERRED_BUCKETS};
pub use occupancy::{
    build_vout_ref, requirement_bucket, synthesize_occupancy, OccupancyProfile, OccupancyStream,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FleetError {
    #[error(
        "unstable SoC grid: ν = p·Δt/Δξ = {nu:.4} > 1 (p = {rate_per_hour:.4}/h, Δt = {dt_hours} h, Δξ = {delta_xi:.4})"
    )]
    Stability { nu: f64, rate_per_hour: f64, dt_hours: f64, delta_xi: f64 },
    #[error("{0}")]
    Parameter(String),
    #[error("controls drive {state} bucket {bucket} to {value:e}{}", step.map(|k| format!(" at step {k}")).unwrap_or_default())]
    InfeasibleControl { state: &'static str, bucket: usize, value: f64, step: Option<usize> },
    #[error("occupancy generation: {0}")]
    Generation(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}
