//! Upwind transport of the parked fleet across SoC buckets.
//!
//! Charging vehicles advect towards higher SoC and discharging vehicles towards
//! lower SoC, each at Courant number `ν`. Mass pushed past the top bucket
//! becomes idle in the top bucket; mass pushed below the bottom bucket becomes
//! idle in the bottom bucket.

use crate::schedule::Airport;

use super::{FleetError, OccupancyStream, SocGrid};

/// Entries below this are treated as negative states.
pub const NEGATIVE_STATE_TOL: f64 = 1e-9;

/// Vehicle counts per SoC bucket at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetSnapshot {
    pub charging: Vec<f64>,
    pub idle: Vec<f64>,
    pub discharging: Vec<f64>,
}

impl FleetSnapshot {
    pub fn zeros(buckets: usize) -> Self {
        Self { charging: vec![0.0; buckets], idle: vec![0.0; buckets], discharging: vec![0.0; buckets] }
    }

    pub fn idle(idle: Vec<f64>) -> Self {
        let b = idle.len();
        Self { charging: vec![0.0; b], idle, discharging: vec![0.0; b] }
    }

    pub fn buckets(&self) -> usize {
        self.idle.len()
    }

    pub fn total(&self) -> f64 {
        self.charging.iter().chain(&self.idle).chain(&self.discharging).sum()
    }

    /// `Σ_ξ ξ·(x_c + x_i + x_d)` with one-based bucket weights.
    pub fn soc_weighted_total(&self) -> f64 {
        (0..self.buckets())
            .map(|b| (b + 1) as f64 * (self.charging[b] + self.idle[b] + self.discharging[b]))
            .sum()
    }

    pub fn plugged_in(&self) -> f64 {
        self.charging.iter().chain(&self.discharging).sum()
    }
}

/// Control transfers applied during one step.
///
/// `to_charging` and `to_discharging` move vehicles out of idle (negative values
/// move them back); `departures` are vehicles leaving from idle.
#[derive(Debug, Clone, PartialEq)]
pub struct StepControls {
    pub to_charging: Vec<f64>,
    pub to_discharging: Vec<f64>,
    pub departures: Vec<f64>,
}

impl StepControls {
    pub fn zeros(buckets: usize) -> Self {
        Self { to_charging: vec![0.0; buckets], to_discharging: vec![0.0; buckets], departures: vec![0.0; buckets] }
    }
}

/// Fleet trajectory over steps `0..=N`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FleetState {
    pub states: Vec<FleetSnapshot>,
}

/// Advances the fleet by one step.
pub fn step_dynamics(
    state: &FleetSnapshot,
    controls: &StepControls,
    arrivals: &[f64],
    grid: &SocGrid,
) -> Result<FleetSnapshot, FleetError> {
    let nb = grid.buckets;
    let shapes = [
        state.charging.len(),
        state.idle.len(),
        state.discharging.len(),
        controls.to_charging.len(),
        controls.to_discharging.len(),
        controls.departures.len(),
        arrivals.len(),
    ];
    if shapes.iter().any(|&len| len != nb) {
        return Err(FleetError::Shape(format!("expected {nb} buckets everywhere, got {shapes:?}")));
    }
    let nu = grid.courant();
    let mut next = FleetSnapshot::zeros(nb);
    for b in 0..nb {
        let from_below = if b > 0 { state.charging[b - 1] } else { 0.0 };
        next.charging[b] = (1.0 - nu) * state.charging[b] + nu * from_below + controls.to_charging[b];

        let from_above = if b + 1 < nb { state.discharging[b + 1] } else { 0.0 };
        next.discharging[b] =
            (1.0 - nu) * state.discharging[b] + nu * from_above + controls.to_discharging[b];

        next.idle[b] = state.idle[b] + arrivals[b]
            - controls.departures[b]
            - controls.to_charging[b]
            - controls.to_discharging[b];
    }
    next.idle[nb - 1] += nu * state.charging[nb - 1];
    next.idle[0] += nu * state.discharging[0];

    for (name, values) in [("charging", &next.charging), ("idle", &next.idle), ("discharging", &next.discharging)] {
        if let Some((b, &v)) = values.iter().enumerate().find(|(_, &v)| v < -NEGATIVE_STATE_TOL) {
            return Err(FleetError::InfeasibleControl { state: name, bucket: b, value: v, step: None });
        }
    }
    Ok(next)
}

/// Replays controls from `initial` through the whole horizon.
pub fn simulate_forward(
    initial: &FleetSnapshot,
    controls: &[StepControls],
    stream: &OccupancyStream,
    grid: &SocGrid,
) -> Result<FleetState, FleetError> {
    if controls.len() != stream.steps() {
        return Err(FleetError::Shape(format!(
            "{} control steps for a {}-step stream",
            controls.len(),
            stream.steps()
        )));
    }
    let mut states = Vec::with_capacity(controls.len() + 1);
    states.push(initial.clone());
    for (k, step) in controls.iter().enumerate() {
        let next = step_dynamics(&states[k], step, &stream.arrivals[k], grid).map_err(|e| match e {
            FleetError::InfeasibleControl { state, bucket, value, .. } => {
                FleetError::InfeasibleControl { state, bucket, value, step: Some(k) }
            }
            other => other,
        })?;
        states.push(next);
    }
    Ok(FleetState { states })
}

/// Net grid-side power of the parked fleet [MW]; positive when charging.
pub fn fleet_power(state: &FleetSnapshot, airport: &Airport, eta: f64) -> f64 {
    let charging: f64 = state.charging.iter().sum();
    let discharging: f64 = state.discharging.iter().sum();
    airport.charger_kw * (charging / eta - eta * discharging) / 1000.0
}
