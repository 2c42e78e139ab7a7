//! A fully resolved problem instance.

use std::collections::HashMap;

use thiserror::Error;

use crate::evfleet::{validate_cfl, FleetError, OccupancyStream, SocGrid};
use crate::lpcore::PriceSeries;
use crate::schedule::{
    ground_indicator, AircraftParams, Airport, AirportIdx, FlightSet, GroundIndicator, Rotation, ScheduleError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("airport {airport}: {source}")]
    Fleet {
        airport: String,
        #[source]
        source: FleetError,
    },
    #[error("airport {airport}: no prices for zone `{zone}`")]
    MissingPriceZone { zone: String, airport: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Policy {
    /// Allow selling power back to the grid, bounded by the connection limit.
    pub grid_export: bool,
    /// Fold flights that land after midnight back to the start of the day.
    pub wrap: bool,
}

/// The parked vehicle fleet at one airport.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetSite {
    pub airport: AirportIdx,
    pub stream: OccupancyStream,
    /// One-way charger efficiency.
    pub charging_efficiency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub airports: Vec<Airport>,
    pub flights: FlightSet,
    /// One rotation per aircraft.
    pub rotations: Vec<Rotation>,
    pub aircraft: AircraftParams,
    pub dt_hours: f64,
    pub steps: usize,
    pub buckets: usize,
    pub turnaround_steps: usize,
    pub prices: PriceSeries,
    /// One site per airport with chargers, sorted by airport.
    pub fleets: Vec<FleetSite>,
    pub policy: Policy,
    /// Content hash of every input that produced this scenario.
    pub fingerprint: String,
}

impl Scenario {
    pub fn soc_grid(&self, airport: AirportIdx) -> SocGrid {
        SocGrid::new(self.buckets, self.airports[airport].fleet_rate_per_hour(), self.dt_hours)
    }

    pub fn fleet(&self, airport: AirportIdx) -> Option<&FleetSite> {
        self.fleets.iter().find(|f| f.airport == airport)
    }

    pub fn fleet_airports(&self) -> Vec<AirportIdx> {
        self.fleets.iter().map(|f| f.airport).collect()
    }

    pub fn airport_index(&self, code: &str) -> Option<AirportIdx> {
        self.airports.iter().position(|a| a.code == code)
    }

    /// Checks every cross-reference and returns apron presence.
    pub fn validate(&self) -> Result<GroundIndicator, ScenarioError> {
        let invalid = |m: String| Err(ScenarioError::Invalid(m));
        if !(self.dt_hours > 0.0) || self.steps == 0 {
            return invalid(format!("empty horizon: {} steps of {} h", self.steps, self.dt_hours));
        }
        if (self.prices.dt_hours() - self.dt_hours).abs() > 1e-12 {
            return invalid("price series and scenario use different time steps".into());
        }
        if self.flights.horizon_steps != self.steps {
            return invalid(format!(
                "flights span {} steps, horizon has {}",
                self.flights.horizon_steps, self.steps
            ));
        }
        self.aircraft.validate()?;
        let mut codes = HashMap::new();
        for (h, a) in self.airports.iter().enumerate() {
            a.validate()?;
            if codes.insert(a.code.as_str(), h).is_some() {
                return invalid(format!("duplicate airport {}", a.code));
            }
            if self.prices.hourly(&a.price_zone).is_none() {
                return Err(ScenarioError::MissingPriceZone { zone: a.price_zone.clone(), airport: a.code.clone() });
            }
        }
        for f in &self.flights.flights {
            if f.origin >= self.airports.len() || f.destination >= self.airports.len() {
                return invalid(format!("flight {} references an unknown airport", f.id));
            }
            if f.depart_step >= self.steps || self.flights.arrival_in_horizon(f) > self.steps {
                return invalid(format!("flight {} lies outside the horizon", f.id));
            }
        }
        let mut seen = HashMap::new();
        for r in &self.rotations {
            for id in &r.flights {
                if let Some(prev) = seen.insert(*id, r.aircraft_id) {
                    return invalid(format!("flight {id} assigned to aircraft {prev} and {}", r.aircraft_id));
                }
            }
        }
        if let Some(f) = self.flights.flights.iter().find(|f| !seen.contains_key(&f.id)) {
            return invalid(format!("flight {} is not flown by any aircraft", f.id));
        }

        let mut last = None;
        for site in &self.fleets {
            let Some(airport) = self.airports.get(site.airport) else {
                return invalid(format!("fleet site at unknown airport index {}", site.airport));
            };
            if last.is_some_and(|l| l >= site.airport) {
                return invalid("fleet sites must be sorted by airport and unique".into());
            }
            last = Some(site.airport);
            let fleet_err = |source| ScenarioError::Fleet { airport: airport.code.clone(), source };
            if !airport.has_fleet() {
                return invalid(format!("fleet site at {} which has no chargers", airport.code));
            }
            validate_cfl(&self.soc_grid(site.airport)).map_err(fleet_err)?;
            let s = &site.stream;
            if s.buckets() != self.buckets
                || s.steps() != self.steps
                || s.arrivals.len() != self.steps
                || s.arrivals.iter().chain(&s.v_out_ref).any(|row| row.len() != self.buckets)
            {
                return Err(fleet_err(FleetError::Shape(format!(
                    "occupancy stream is not {} steps × {} buckets",
                    self.steps, self.buckets
                ))));
            }
            if !(site.charging_efficiency > 0.0 && site.charging_efficiency <= 1.0) {
                return Err(fleet_err(FleetError::Parameter(format!(
                    "charging efficiency {} outside (0, 1]",
                    site.charging_efficiency
                ))));
            }
        }
        if let Some(a) = self.airports.iter().enumerate().find(|(h, a)| a.has_fleet() && self.fleet(*h).is_none()) {
            return invalid(format!("airport {} has chargers but no occupancy stream", a.1.code));
        }
        Ok(ground_indicator(&self.rotations, &self.flights, self.airports.len(), self.turnaround_steps)?)
    }
}
