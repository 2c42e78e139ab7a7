use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::scenario::Scenario;

use super::{CliError, Overrides, RunOutput};

#[derive(Debug, Clone, PartialEq)]
pub struct AirportSummary {
    pub code: String,
    pub chargers: u32,
    pub grid_cap_mw: f64,
    pub grid_energy_mwh: f64,
    /// Energy delivered to parked aircraft.
    pub apron_energy_mwh: f64,
    /// Net energy drawn by the parked vehicle fleet.
    pub fleet_energy_mwh: f64,
    pub peak_grid_mw: f64,
    pub cost: f64,
}

/// Headline numbers of one run, stored as `key,value` rows in `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub fingerprint: String,
    pub status: String,
    pub backend: String,
    pub objective: f64,
    pub iterations: usize,
    pub steps: usize,
    pub dt_hours: f64,
    pub buckets: usize,
    pub aircraft: usize,
    pub flights: usize,
    pub overrides: Overrides,
    pub max_residual: f64,
    pub airports: Vec<AirportSummary>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

impl RunSummary {
    pub fn from_run(scenario: &Scenario, run: &RunOutput, overrides: &Overrides) -> Self {
        let r = &run.report;
        let dt = scenario.dt_hours;
        let airports = scenario
            .airports
            .iter()
            .zip(&r.airports)
            .map(|(a, p)| AirportSummary {
                code: a.code.clone(),
                chargers: a.chargers,
                grid_cap_mw: a.grid_cap_mw,
                grid_energy_mwh: p.grid_energy(dt),
                apron_energy_mwh: p.apron_energy(dt),
                fleet_energy_mwh: p.fleet.iter().sum::<f64>() * dt,
                peak_grid_mw: if p.grid.is_empty() { 0.0 } else { p.peak_grid() },
                cost: p.grid.iter().enumerate().map(|(k, g)| scenario.prices.price(&a.price_zone, k).unwrap_or(0.0) * g * dt).sum(),
            })
            .collect();
        Self {
            fingerprint: scenario.fingerprint.clone(),
            status: run.outcome.status.to_string(),
            backend: format!("{:?}", run.outcome.backend).to_lowercase(),
            objective: run.outcome.objective,
            iterations: run.outcome.iterations,
            steps: scenario.steps,
            dt_hours: dt,
            buckets: scenario.buckets,
            aircraft: scenario.rotations.len(),
            flights: scenario.flights.len(),
            overrides: *overrides,
            max_residual: r.residuals.max(),
            airports,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("key,value\n");
        let o = &self.overrides;
        let rows = [
            ("fingerprint", self.fingerprint.clone()),
            ("status", self.status.clone()),
            ("backend", self.backend.clone()),
            ("objective", self.objective.to_string()),
            ("iterations", self.iterations.to_string()),
            ("steps", self.steps.to_string()),
            ("dt_hours", self.dt_hours.to_string()),
            ("buckets", self.buckets.to_string()),
            ("aircraft", self.aircraft.to_string()),
            ("flights", self.flights.to_string()),
            ("override.chargers", opt(o.chargers)),
            ("override.grid_cap_mw", opt(o.grid_cap_mw)),
            ("override.seed", opt(o.seed)),
            ("max_residual", self.max_residual.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k},{v}");
        }
        for a in &self.airports {
            let c = &a.code;
            let _ = writeln!(s, "airport.{c}.chargers,{}", a.chargers);
            let _ = writeln!(s, "airport.{c}.grid_cap_mw,{}", a.grid_cap_mw);
            let _ = writeln!(s, "airport.{c}.grid_energy_mwh,{}", a.grid_energy_mwh);
            let _ = writeln!(s, "airport.{c}.apron_energy_mwh,{}", a.apron_energy_mwh);
            let _ = writeln!(s, "airport.{c}.fleet_energy_mwh,{}", a.fleet_energy_mwh);
            let _ = writeln!(s, "airport.{c}.peak_grid_mw,{}", a.peak_grid_mw);
            let _ = writeln!(s, "airport.{c}.cost,{}", a.cost);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let bad = |m: String| CliError::Report(format!("summary: {m}"));
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        let mut order = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let (k, v) = line.split_once(',').ok_or_else(|| bad(format!("line {}: expected key,value", i + 1)))?;
            if let Some(code) = k.strip_prefix("airport.").and_then(|r| r.rsplit_once('.')).map(|(c, _)| c) {
                if !order.iter().any(|c: &String| c == code) {
                    order.push(code.to_string());
                }
            }
            map.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| map.get(k).cloned().ok_or_else(|| bad(format!("missing `{k}`")));
        fn num<T: std::str::FromStr>(v: String, k: &str) -> Result<T, CliError> {
            v.parse().map_err(|_| CliError::Report(format!("summary: invalid `{k}` value `{v}`")))
        }
        fn maybe<T: std::str::FromStr>(v: String, k: &str) -> Result<Option<T>, CliError> {
            if v.is_empty() { Ok(None) } else { num(v, k).map(Some) }
        }
        let field = |k: &str| get(k).and_then(|v| num::<f64>(v, k));
        let airports = order
            .iter()
            .map(|c| {
                let f = |name: &str| field(&format!("airport.{c}.{name}"));
                Ok(AirportSummary {
                    code: c.clone(),
                    chargers: num(get(&format!("airport.{c}.chargers"))?, "chargers")?,
                    grid_cap_mw: f("grid_cap_mw")?,
                    grid_energy_mwh: f("grid_energy_mwh")?,
                    apron_energy_mwh: f("apron_energy_mwh")?,
                    fleet_energy_mwh: f("fleet_energy_mwh")?,
                    peak_grid_mw: f("peak_grid_mw")?,
                    cost: f("cost")?,
                })
            })
            .collect::<Result<_, CliError>>()?;
        Ok(Self {
            fingerprint: get("fingerprint")?,
            status: get("status")?,
            backend: get("backend")?,
            objective: field("objective")?,
            iterations: num(get("iterations")?, "iterations")?,
            steps: num(get("steps")?, "steps")?,
            dt_hours: field("dt_hours")?,
            buckets: num(get("buckets")?, "buckets")?,
            aircraft: num(get("aircraft")?, "aircraft")?,
            flights: num(get("flights")?, "flights")?,
            overrides: Overrides {
                chargers: maybe(get("override.chargers")?, "override.chargers")?,
                grid_cap_mw: maybe(get("override.grid_cap_mw")?, "override.grid_cap_mw")?,
                seed: maybe(get("override.seed")?, "override.seed")?,
            },
            max_residual: field("max_residual")?,
            airports,
        })
    }

    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join("summary.csv");
        let text = fs::read_to_string(&path).map_err(|e| CliError::Io { path, source: e })?;
        Self::from_csv(&text)
    }
}
