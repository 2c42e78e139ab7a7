//! Scenario files: a TOML config naming CSV tables for airports, flights,
//! prices and optionally rotations, resolved relative to the config file.
//!
//! ```toml
//! flights = "flights.csv"
//! prices = "prices.csv"
//!
//! [horizon]
//! dt_hours = 0.25
//! turnaround_steps = 3
//!
//! [airports]
//! file = "airports.csv"
//!
//! [occupancy]
//! sites = ["AMS"]
//!
//! [policy]
//! grid_export = false
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::evfleet::{auto_buckets, synthesize_occupancy, OccupancyProfile, SocGrid, PREFERRED_BUCKETS};
use crate::scenario::{FleetSite, Policy, Scenario, ScenarioError};
use crate::schedule::{
    assign_fleet, parse_airport_table, parse_flight_table, parse_rotation_table, AircraftParams, FlightTableConfig,
};

use super::{parse_prices, CliError};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub flights: PathBuf,
    pub prices: PathBuf,
    pub rotations: Option<PathBuf>,
    #[serde(default)]
    pub horizon: HorizonConfig,
    #[serde(default)]
    pub aircraft: AircraftParams,
    pub airports: AirportsConfig,
    #[serde(default)]
    pub occupancy: OccupancyConfig,
    #[serde(default)]
    pub policy: PolicyConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HorizonConfig {
    pub dt_hours: f64,
    /// Defaults to one day.
    pub steps: Option<usize>,
    /// SoC buckets; chosen from the charger power when absent.
    pub buckets: Option<usize>,
    pub turnaround_steps: usize,
}

impl Default for HorizonConfig {
    fn default() -> Self {
        Self { dt_hours: 0.25, steps: None, buckets: None, turnaround_steps: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirportsConfig {
    pub file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OccupancyConfig {
    /// Airports whose charger count `--chargers` sets; defaults to those with chargers.
    pub sites: Option<Vec<String>>,
    pub profile: OccupancyProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PolicyConfig {
    pub grid_export: bool,
    pub wrap: bool,
}

/// The raw text of every input, so a scenario can be assembled without touching disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioInputs {
    pub config: String,
    pub airports: String,
    pub flights: String,
    pub prices: String,
    pub rotations: Option<String>,
}

/// What-if knobs applied on top of the inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Overrides {
    /// Charger count at every occupancy site.
    pub chargers: Option<u32>,
    /// Grid connection limit at every airport [MW].
    pub grid_cap_mw: Option<f64>,
    pub seed: Option<u64>,
}

impl ScenarioInputs {
    /// Reads the config at `path` and the tables it names.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| CliError::Io { path: p.to_path_buf(), source: e });
        let config = read(path)?;
        let parsed = parse_config(&config)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Ok(Self {
            airports: read(&dir.join(&parsed.airports.file))?,
            flights: read(&dir.join(&parsed.flights))?,
            prices: read(&dir.join(&parsed.prices))?,
            rotations: parsed.rotations.as_ref().map(|r| read(&dir.join(r))).transpose()?,
            config,
        })
    }

    /// SHA-256 over every input text; overrides are not part of it.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        let parts = [Some(&self.config), Some(&self.airports), Some(&self.flights), Some(&self.prices), self.rotations.as_ref()];
        for part in parts {
            match part {
                Some(text) => {
                    h.update((text.len() as u64).to_le_bytes());
                    h.update(text.as_bytes());
                }
                None => h.update(u64::MAX.to_le_bytes()),
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn assemble(&self, overrides: &Overrides) -> Result<Scenario, CliError> {
        let config = parse_config(&self.config)?;
        let horizon = &config.horizon;
        let dt = horizon.dt_hours;
        if !(dt > 0.0) || (24.0 / dt - (24.0 / dt).round()).abs() > 1e-9 {
            return Err(CliError::Config(format!("dt_hours = {dt} does not divide a day")));
        }
        let steps = horizon.steps.unwrap_or((24.0 / dt).round() as usize);

        let mut airports = parse_airport_table(&self.airports).map_err(|e| CliError::Table { table: "airports", source: e })?;
        let sites: Vec<String> = match &config.occupancy.sites {
            Some(codes) => codes.clone(),
            None => airports.iter().filter(|a| a.has_fleet()).map(|a| a.code.clone()).collect(),
        };
        for code in &sites {
            let Some(a) = airports.iter_mut().find(|a| &a.code == code) else {
                return Err(CliError::Config(format!("occupancy site `{code}` is not in the airport table")));
            };
            if let Some(n) = overrides.chargers {
                a.chargers = n;
            }
        }
        if let Some(cap) = overrides.grid_cap_mw {
            airports.iter_mut().for_each(|a| a.grid_cap_mw = cap);
        }
        if let Some(a) = airports.iter().find(|a| a.has_fleet() && !sites.contains(&a.code)) {
            return Err(CliError::Config(format!("airport {} has chargers but is not an occupancy site", a.code)));
        }

        let table = FlightTableConfig { dt_hours: dt, horizon_steps: steps, wrap: config.policy.wrap, aircraft: config.aircraft.clone() };
        let flights = parse_flight_table(&self.flights, &airports, &table).map_err(|e| CliError::Table { table: "flights", source: e })?;
        let rotations = match &self.rotations {
            Some(text) => parse_rotation_table(text, &flights).map_err(|e| CliError::Table { table: "rotations", source: e })?,
            None => assign_fleet(&flights, horizon.turnaround_steps),
        };
        let prices = parse_prices(&self.prices, dt)?;

        let buckets = match horizon.buckets {
            Some(b) => b,
            None => airports
                .iter()
                .filter(|a| a.has_fleet())
                .map(|a| {
                    auto_buckets(a.fleet_rate_per_hour(), dt)
                        .map_err(|source| ScenarioError::Fleet { airport: a.code.clone(), source })
                })
                .try_fold(PREFERRED_BUCKETS, |acc, b| b.map(|b| acc.min(b)))?,
        };

        let profile = &config.occupancy.profile;
        let seed = overrides.seed.unwrap_or(profile.seed);
        let mut fleets = Vec::new();
        for (h, a) in airports.iter().enumerate().filter(|(_, a)| a.has_fleet()) {
            let grid = SocGrid::new(buckets, a.fleet_rate_per_hour(), dt);
            // distinct but reproducible draws per site
            let stream = synthesize_occupancy(profile, seed.wrapping_add(h as u64), &grid, steps, a.chargers)
                .map_err(|source| ScenarioError::Fleet { airport: a.code.clone(), source })?;
            fleets.push(FleetSite { airport: h, stream, charging_efficiency: profile.charging_efficiency });
        }

        let scenario = Scenario {
            airports,
            flights,
            rotations,
            aircraft: config.aircraft,
            dt_hours: dt,
            steps,
            buckets,
            turnaround_steps: horizon.turnaround_steps,
            prices,
            fleets,
            policy: Policy { grid_export: config.policy.grid_export, wrap: config.policy.wrap },
            fingerprint: self.fingerprint(),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}
