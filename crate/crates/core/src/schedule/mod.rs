//! Flight network ingestion, flight energies, fleet assignment and apron presence.

mod assign;
mod energy;
mod geo;
mod ground;
mod table;

pub use assign::{assign_fleet, connection_allowed};
pub use energy::{breguet_energy, G0};
pub use geo::{great_circle_km, LatLon, EARTH_RADIUS_KM};
pub use ground::{ground_indicator, GroundIndicator};
pub use table::{
    parse_airport_table, parse_flight_table, parse_hhmm, parse_rotation_table, FlightTableConfig,
};

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("unknown airport `{code}` on line {line}")]
    UnknownAirport { code: String, line: u64 },
    #[error("{0}")]
    Validation(String),
}

/// Index of an airport in the scenario's airport table.
pub type AirportIdx = usize;

/// An airport with its grid connection and landside charging infrastructure.
#[derive(Debug, Clone, PartialEq)]
pub struct Airport {
    pub code: String,
    pub lat: f64,
    pub lon: f64,
    /// Grid connection limit [MW].
    pub grid_cap_mw: f64,
    pub price_zone: String,
    /// Bidirectional landside chargers; zero disables the parked fleet.
    pub chargers: u32,
    /// Per-charger power [kW].
    pub charger_kw: f64,
    /// Battery capacity of each parked vehicle [kWh].
    pub ev_kwh: f64,
}

impl Airport {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        LatLon::new(self.lat, self.lon)?;
        if !(self.grid_cap_mw >= 0.0) {
            return Err(ScheduleError::Validation(format!(
                "airport {}: grid cap must be nonnegative",
                self.code
            )));
        }
        if !(self.charger_kw > 0.0) || !(self.ev_kwh > 0.0) {
            return Err(ScheduleError::Validation(format!(
                "airport {}: charger power and EV capacity must be positive",
                self.code
            )));
        }
        Ok(())
    }

    pub fn location(&self) -> LatLon {
        LatLon { lat: self.lat, lon: self.lon }
    }

    /// Fraction of a vehicle battery (dis)charged per hour, `P_ch / E_EV`.
    pub fn fleet_rate_per_hour(&self) -> f64 {
        self.charger_kw / self.ev_kwh
    }

    pub fn has_fleet(&self) -> bool {
        self.chargers > 0
    }
}

/// A scheduled flight snapped onto the time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Flight {
    pub id: u32,
    pub origin: AirportIdx,
    pub destination: AirportIdx,
    pub depart_step: usize,
    /// May exceed the horizon length for flights wrapped across midnight.
    pub arrive_step: usize,
    /// Battery energy consumed by the flight [MWh].
    pub energy_mwh: f64,
}

/// Flights on a closed daily horizon of `horizon_steps` steps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlightSet {
    pub flights: Vec<Flight>,
    pub horizon_steps: usize,
}

impl FlightSet {
    pub fn new(flights: Vec<Flight>, horizon_steps: usize) -> Self {
        Self { flights, horizon_steps }
    }

    pub fn len(&self) -> usize {
        self.flights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flights.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Flight> {
        self.flights.iter().find(|f| f.id == id)
    }

    /// Arrival step folded back into the horizon.
    pub fn arrival_in_horizon(&self, flight: &Flight) -> usize {
        if flight.arrive_step > self.horizon_steps {
            flight.arrive_step - self.horizon_steps
        } else {
            flight.arrive_step
        }
    }

    pub fn wraps(&self, flight: &Flight) -> bool {
        flight.arrive_step > self.horizon_steps
    }
}

/// Performance and battery parameters shared by every aircraft of the fleet.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AircraftParams {
    pub mass_kg: f64,
    pub lift_to_drag: f64,
    pub battery_capacity_mwh: f64,
    /// Minimum energy that must remain after any flight [MWh].
    pub reserve_mwh: f64,
    pub max_charge_power_mw: f64,
    pub powertrain_efficiency: f64,
    /// Longest admissible flight [km].
    pub range_cap_km: f64,
}

impl Default for AircraftParams {
    /// A 78 t, L/D 23, 12 MWh regional aircraft with a 10 % reserve.
    fn default() -> Self {
        Self {
            mass_kg: 78_000.0,
            lift_to_drag: 23.0,
            battery_capacity_mwh: 12.0,
            reserve_mwh: 1.2,
            max_charge_power_mw: 12.0,
            powertrain_efficiency: 0.90,
            range_cap_km: 800.0,
        }
    }
}

impl AircraftParams {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        let bad = |what: &str| Err(ScheduleError::Validation(format!("aircraft: {what}")));
        if !(self.reserve_mwh > 0.0 && self.reserve_mwh < self.battery_capacity_mwh) {
            return bad("reserve must lie strictly between 0 and the battery capacity");
        }
        if !(self.max_charge_power_mw > 0.0) {
            return bad("max charge power must be positive");
        }
        if !(self.powertrain_efficiency > 0.0 && self.powertrain_efficiency <= 1.0) {
            return bad("powertrain efficiency must be in (0, 1]");
        }
        if !(self.lift_to_drag > 0.0) || !(self.mass_kg > 0.0) {
            return bad("mass and lift-to-drag ratio must be positive");
        }
        Ok(())
    }

    /// Largest flight energy that still leaves the reserve.
    pub fn usable_energy_mwh(&self) -> f64 {
        self.battery_capacity_mwh - self.reserve_mwh
    }
}

/// The ordered flights flown by one aircraft.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    pub aircraft_id: usize,
    /// Where the aircraft sits when it has no flights.
    pub home: AirportIdx,
    pub flights: Vec<u32>,
}
