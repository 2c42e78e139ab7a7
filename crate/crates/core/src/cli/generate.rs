//! Synthetic hub-and-spoke network: one hub with a parking garage, 44
//! spokes, four daily waves of out-and-back flights on quarter-hour steps.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::schedule::{great_circle_km, LatLon, EARTH_RADIUS_KM};

use super::{CliError, ScenarioInputs};

pub const HUB_SPOKES: usize = 44;
pub const HUB_WAVES: [u32; 4] = [6 * 60, 10 * 60, 14 * 60, 18 * 60];
const ZONES: [&str; 6] = ["DE", "DK", "NO", "GB", "FR", "BE"];

/// Point `distance_km` from `from` along the initial `bearing` (radians).
fn destination(from: LatLon, bearing: f64, distance_km: f64) -> (f64, f64) {
    let d = distance_km / EARTH_RADIUS_KM;
    let (lat1, lon1) = (from.lat.to_radians(), from.lon.to_radians());
    let lat2 = (lat1.sin() * d.cos() + lat1.cos() * d.sin() * bearing.cos()).asin();
    let lon2 = lon1 + (bearing.sin() * d.sin() * lat1.cos()).atan2(d.cos() - lat1.sin() * lat2.sin());
    (lat2.to_degrees(), lon2.to_degrees())
}

fn hhmm(minutes: u32) -> String {
    format!("{:02}{:02}", minutes / 60, minutes % 60)
}

/// Night and midday valleys, morning and evening peaks.
fn price_shape(hour: usize) -> f64 {
    match hour {
        0..=5 => 45.0,
        6..=8 => 110.0,
        9..=10 => 85.0,
        11..=15 => 30.0,
        16 => 95.0,
        17..=20 => 160.0,
        _ => 80.0,
    }
}

/// Inputs of the hub network with `chargers` at the hub.
pub fn hub_network(seed: u64, chargers: u32) -> ScenarioInputs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hub = LatLon { lat: 52.31, lon: 4.76 };
    let mut airports = String::from("code,lat,lon,grid_cap_mw,price_zone,chargers,charger_kw,ev_kwh\n");
    let _ = writeln!(airports, "HUB,{},{},250,NL,{chargers},22,60", hub.lat, hub.lon);
    let mut spokes = Vec::with_capacity(HUB_SPOKES);
    for i in 0..HUB_SPOKES {
        let bearing = (i as f64 + rng.gen_range(0.1..0.9)) / HUB_SPOKES as f64 * 2.0 * PI;
        let (lat, lon) = destination(hub, bearing, rng.gen_range(150.0..640.0));
        let (lat, lon) = ((lat * 1e4).round() / 1e4, (lon * 1e4).round() / 1e4);
        let zone = ZONES[(bearing / (2.0 * PI) * ZONES.len() as f64) as usize % ZONES.len()];
        let code = format!("S{:02}", i + 1);
        let _ = writeln!(airports, "{code},{lat},{lon},20,{zone},0,22,60");
        spokes.push((code, great_circle_km(hub, LatLon { lat, lon })));
    }

    let mut flights = String::from("id,origin,destination,dep_hhmm,arr_hhmm\n");
    let mut id = 1;
    for &wave in &HUB_WAVES {
        for (code, km) in &spokes {
            let block = ((20.0 + km / 700.0 * 60.0) / 5.0).ceil() as u32 * 5;
            let out = wave + 5 * rng.gen_range(0..=6u32);
            let back = out + block + 45 + 5 * rng.gen_range(0..=2u32);
            let _ = writeln!(flights, "{id},HUB,{code},{},{}", hhmm(out), hhmm(out + block));
            let _ = writeln!(flights, "{},{code},HUB,{},{}", id + 1, hhmm(back), hhmm(back + block));
            id += 2;
        }
    }

    let mut prices = String::from("zone,hour_utc,price_eur_mwh\n");
    for zone in std::iter::once("NL").chain(ZONES) {
        let offset = rng.gen_range(-10.0..10.0);
        let spread = rng.gen_range(0.8..1.2);
        for h in 0..24 {
            let p = ((80.0 + spread * (price_shape(h) - 80.0) + offset) * 100.0).round() / 100.0;
            let _ = writeln!(prices, "{zone},{h},{p}");
        }
    }

    let config = "\
flights = \"flights.csv\"
prices = \"prices.csv\"

[horizon]
dt_hours = 0.25
buckets = 10
turnaround_steps = 3

[airports]
file = \"airports.csv\"

[occupancy]
sites = [\"HUB\"]

[policy]
grid_export = false
"
    .to_string();
    ScenarioInputs { config, airports, flights, prices, rotations: None }
}

/// Writes `scenario.toml` and its tables into `dir`.
pub fn write_inputs(dir: &Path, inputs: &ScenarioInputs) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    let mut files = vec![
        ("scenario.toml", &inputs.config),
        ("airports.csv", &inputs.airports),
        ("flights.csv", &inputs.flights),
        ("prices.csv", &inputs.prices),
    ];
    if let Some(r) = &inputs.rotations {
        files.push(("rotations.csv", r));
    }
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::Overrides;

    #[test]
    fn destination_inverts_distance() {
        let from = LatLon { lat: 52.31, lon: 4.76 };
        for bearing in [0.0, 1.0, 2.5, 4.0, 6.0] {
            let (lat, lon) = destination(from, bearing, 500.0);
            assert!((great_circle_km(from, LatLon { lat, lon }) - 500.0).abs() < 1e-6);
        }
    }

    #[test]
    fn network_shape() {
        let inputs = hub_network(11, 3000);
        assert_eq!(inputs, hub_network(11, 3000));
        let s = inputs.assemble(&Overrides::default()).unwrap();
        assert_eq!(s.airports.len(), HUB_SPOKES + 1);
        assert_eq!(s.flights.len(), 2 * HUB_SPOKES * HUB_WAVES.len());
        assert_eq!((s.steps, s.buckets), (96, 10));
        assert_eq!(s.fleet_airports(), vec![0]);
        assert!(s.rotations.len() <= s.flights.len() / 2);
    }
}
