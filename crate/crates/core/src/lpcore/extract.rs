use crate::evfleet::{FleetSnapshot, FleetState, StepControls};
use crate::scenario::Scenario;
use crate::schedule::AirportIdx;

use super::{residuals, ExtractError, LpModel, ResidualSummary, VarKind};

/// Power trajectories of one airport [MW].
#[derive(Debug, Clone, PartialEq)]
pub struct AirportPower {
    pub code: String,
    pub grid: Vec<f64>,
    pub fleet: Vec<f64>,
    pub apron: Vec<f64>,
}

impl AirportPower {
    pub fn peak_grid(&self) -> f64 {
        self.grid.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Net energy drawn from the grid [MWh].
    pub fn grid_energy(&self, dt_hours: f64) -> f64 {
        self.grid.iter().sum::<f64>() * dt_hours
    }

    /// Energy delivered to parked aircraft [MWh].
    pub fn apron_energy(&self, dt_hours: f64) -> f64 {
        self.apron.iter().sum::<f64>() * dt_hours
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AircraftTrajectory {
    pub aircraft_id: usize,
    /// Battery energy at steps `0..=N` [MWh].
    pub energy: Vec<f64>,
    /// Charging power during steps `0..N` [MW].
    pub power: Vec<f64>,
    /// Parking airport per step, `None` while airborne.
    pub location: Vec<Option<AirportIdx>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetReport {
    pub airport: AirportIdx,
    pub states: FleetState,
    /// Transfers and departures per step; `departures` is `v_out`.
    pub controls: Vec<StepControls>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    /// `Σ_h Σ_k p_h[k]·P_gr[h,k]·Δt`, recomputed from the trajectories.
    pub objective_cost: f64,
    pub solver_objective: f64,
    pub dt_hours: f64,
    pub airports: Vec<AirportPower>,
    pub aircraft: Vec<AircraftTrajectory>,
    pub fleets: Vec<FleetReport>,
    pub residuals: ResidualSummary,
    /// `(aircraft, step, slack)` where a parked aircraft's energy balance is strict by more than 1e-6.
    pub energy_slack: Vec<(usize, usize, f64)>,
    pub fingerprint: String,
}

impl SolutionReport {
    pub fn total_grid_energy(&self) -> f64 {
        self.airports.iter().map(|a| a.grid_energy(self.dt_hours)).sum()
    }
}

/// Maps a primal vector back to trajectories via the model's index.
pub fn extract_solution(
    model: &LpModel,
    scenario: &Scenario,
    primal: &[f64],
    objective: f64,
) -> Result<SolutionReport, ExtractError> {
    if primal.len() != model.columns {
        return Err(ExtractError::Length { expected: model.columns, got: primal.len() });
    }
    let idx = model.index.as_ref().ok_or(ExtractError::NoIndex)?;
    if idx.airports() != scenario.airports.len()
        || idx.aircraft() != scenario.rotations.len()
        || idx.steps() != scenario.steps
        || idx.buckets() != scenario.buckets
        || idx.fleet_airports() != scenario.fleet_airports().as_slice()
    {
        return Err(ExtractError::Mismatch("index dimensions differ from the scenario".into()));
    }
    let ground = scenario.validate().map_err(|e| ExtractError::Mismatch(e.to_string()))?;
    let (n, nb, dt) = (scenario.steps, scenario.buckets, scenario.dt_hours);
    let at = |kind| primal[idx.col(kind)];

    let airports: Vec<AirportPower> = scenario
        .airports
        .iter()
        .enumerate()
        .map(|(h, a)| AirportPower {
            code: a.code.clone(),
            grid: (0..n).map(|k| at(VarKind::Pgr { airport: h, k })).collect(),
            fleet: (0..n).map(|k| at(VarKind::Pc { airport: h, k })).collect(),
            apron: (0..n).map(|k| at(VarKind::Pa { airport: h, k })).collect(),
        })
        .collect();

    let mut energy_slack = Vec::new();
    let aircraft = (0..scenario.rotations.len())
        .map(|p| {
            let energy: Vec<f64> = (0..=n).map(|k| at(VarKind::Eb { aircraft: p, k })).collect();
            let power: Vec<f64> = (0..n).map(|k| at(VarKind::Pb { aircraft: p, k })).collect();
            let location: Vec<_> = (0..n).map(|k| ground.location(p, k)).collect();
            for k in 0..n {
                let slack = energy[k] + power[k] * dt - energy[k + 1];
                if location[k].is_some() && slack > 1e-6 {
                    energy_slack.push((p, k, slack));
                }
            }
            AircraftTrajectory { aircraft_id: scenario.rotations[p].aircraft_id, energy, power, location }
        })
        .collect();

    let fleets = scenario
        .fleets
        .iter()
        .map(|site| {
            let h = site.airport;
            let series = |f: &dyn Fn(usize, usize) -> VarKind, k: usize| (0..nb).map(|b| at(f(b, k))).collect::<Vec<_>>();
            let states = (0..=n)
                .map(|k| FleetSnapshot {
                    charging: series(&|b, k| VarKind::Xc { airport: h, bucket: b, k }, k),
                    idle: series(&|b, k| VarKind::Xi { airport: h, bucket: b, k }, k),
                    discharging: series(&|b, k| VarKind::Xd { airport: h, bucket: b, k }, k),
                })
                .collect();
            let controls = (0..n)
                .map(|k| StepControls {
                    to_charging: series(&|b, k| VarKind::Uc { airport: h, bucket: b, k }, k),
                    to_discharging: series(&|b, k| VarKind::Ud { airport: h, bucket: b, k }, k),
                    departures: series(&|b, k| VarKind::Vout { airport: h, bucket: b, k }, k),
                })
                .collect();
            FleetReport { airport: h, states: FleetState { states }, controls }
        })
        .collect();

    let objective_cost: f64 = scenario
        .airports
        .iter()
        .zip(&airports)
        .map(|(a, power)| {
            power.grid.iter().enumerate().map(|(k, p)| scenario.prices.price(&a.price_zone, k).unwrap() * p * dt).sum::<f64>()
        })
        .sum();
    if (objective_cost - objective).abs() > 1e-6 * (1.0 + objective.abs()) {
        return Err(ExtractError::Objective { recomputed: objective_cost, reported: objective });
    }

    Ok(SolutionReport {
        objective_cost,
        solver_objective: objective,
        dt_hours: dt,
        airports,
        aircraft,
        fleets,
        residuals: residuals(model, primal),
        energy_slack,
        fingerprint: scenario.fingerprint.clone(),
    })
}
