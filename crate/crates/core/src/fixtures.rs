//! Small hand-built scenarios for examples, tests and benchmarks.

use crate::evfleet::{synthesize_occupancy, OccupancyProfile, SocGrid};
use crate::lpcore::PriceSeries;
use crate::scenario::{FleetSite, Policy, Scenario};
use crate::schedule::{
    breguet_energy, great_circle_km, AircraftParams, Airport, Flight, FlightSet, Rotation,
};

/// Knobs of the two-airport toy network.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    /// Chargers at the hub; zero removes the parked fleet.
    pub chargers: u32,
    pub grid_cap_mw: f64,
    /// Morning arrivals and evening departures; without them the garage only holds its initial vehicles.
    pub with_flows: bool,
    pub seed: u64,
    pub grid_export: bool,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self { chargers: 10, grid_cap_mw: 8.0, with_flows: true, seed: 7, grid_export: false }
    }
}

pub const TOY_STEPS: usize = 24;
pub const TOY_BUCKETS: usize = 4;

/// Hub prices: cheap midday valley while the aircraft is away at the spoke.
pub fn toy_hub_prices() -> Vec<f64> {
    let mut p = vec![0.0; 24];
    for (h, v) in p.iter_mut().enumerate() {
        *v = match h {
            0..=5 => 70.0 + h as f64,
            6..=9 => 110.0 + 2.0 * h as f64,
            10..=14 => 15.0 + h as f64,
            15..=19 => 140.0 + 3.0 * h as f64,
            _ => 90.0 - h as f64,
        };
    }
    p
}

pub fn toy_spoke_prices() -> Vec<f64> {
    (0..24).map(|h| 95.0 + 0.5 * h as f64).collect()
}

/// Two airports, one aircraft flying out at step 9 and back at step 15, hourly steps.
pub fn toy_scenario(config: &ToyConfig) -> Scenario {
    let dt = 1.0;
    let hub = Airport {
        code: "HUB".into(),
        lat: 52.31,
        lon: 4.76,
        grid_cap_mw: config.grid_cap_mw,
        price_zone: "Z1".into(),
        chargers: config.chargers,
        charger_kw: 11.0,
        ev_kwh: 60.0,
    };
    let spoke = Airport {
        code: "SPK".into(),
        lat: 50.90,
        lon: 4.48,
        grid_cap_mw: config.grid_cap_mw,
        price_zone: "Z2".into(),
        chargers: 0,
        ..hub.clone()
    };
    let aircraft = AircraftParams::default();
    let energy = breguet_energy(great_circle_km(hub.location(), spoke.location()), &aircraft)
        .expect("toy hop is within range");
    let flights = FlightSet::new(
        vec![
            Flight { id: 1, origin: 0, destination: 1, depart_step: 9, arrive_step: 10, energy_mwh: energy },
            Flight { id: 2, origin: 1, destination: 0, depart_step: 15, arrive_step: 16, energy_mwh: energy },
        ],
        TOY_STEPS,
    );
    let prices = PriceSeries::from_hourly(
        [("Z1".to_string(), toy_hub_prices()), ("Z2".to_string(), toy_spoke_prices())].into(),
        dt,
    )
    .expect("valid toy prices");

    let airports = vec![hub, spoke];
    let fleets = if config.chargers > 0 {
        let grid = SocGrid::new(TOY_BUCKETS, airports[0].fleet_rate_per_hour(), dt);
        let profile = if config.with_flows { toy_flow_profile() } else { parked_only_profile() };
        let stream = synthesize_occupancy(&profile, config.seed, &grid, TOY_STEPS, config.chargers)
            .expect("toy occupancy fits the chargers");
        vec![FleetSite { airport: 0, stream, charging_efficiency: profile.charging_efficiency }]
    } else {
        Vec::new()
    };

    Scenario {
        airports,
        flights,
        rotations: vec![Rotation { aircraft_id: 0, home: 0, flights: vec![1, 2] }],
        aircraft,
        dt_hours: dt,
        steps: TOY_STEPS,
        buckets: TOY_BUCKETS,
        turnaround_steps: 1,
        prices,
        fleets,
        policy: Policy { grid_export: config.grid_export, wrap: false },
        fingerprint: format!("toy:{config:?}"),
    }
}

/// Five parked vehicles, two morning arrivals and two evening departures.
fn toy_flow_profile() -> OccupancyProfile {
    let mut profile = OccupancyProfile::empty();
    profile.relative = false;
    profile.initial_occupancy = 5.0;
    profile.arrivals[7] = 1.0;
    profile.arrivals[8] = 1.0;
    profile.departures[16] = 1.0;
    profile.departures[17] = 1.0;
    profile
}

/// Idle vehicles only, 60 % of the chargers.
///
/// With a fixed seed the larger garage's initial vehicles extend the smaller
/// one's, so doing nothing with the extra vehicles is always feasible and the
/// optimal cost cannot rise with the charger count.
fn parked_only_profile() -> OccupancyProfile {
    OccupancyProfile { initial_occupancy: 0.6, ..OccupancyProfile::empty() }
}

/// One airport, one idle aircraft, no flights and no chargers.
pub fn empty_flight_toy(steps: usize) -> Scenario {
    let airport = Airport {
        code: "ONE".into(),
        lat: 52.0,
        lon: 5.0,
        grid_cap_mw: 10.0,
        price_zone: "Z".into(),
        chargers: 0,
        charger_kw: 11.0,
        ev_kwh: 60.0,
    };
    Scenario {
        airports: vec![airport],
        flights: FlightSet::new(Vec::new(), steps),
        rotations: vec![Rotation { aircraft_id: 0, home: 0, flights: Vec::new() }],
        aircraft: AircraftParams::default(),
        dt_hours: 1.0,
        steps,
        buckets: TOY_BUCKETS,
        turnaround_steps: 1,
        prices: PriceSeries::flat(["Z"], 100.0, 1.0),
        fleets: Vec::new(),
        policy: Policy::default(),
        fingerprint: "empty".into(),
    }
}

/// Eight hourly steps, one aircraft doing A→B at step 2 and B→A at step 5,
/// 2 MW charging and 4 MWh per flight, so every cheapest plan charges whole steps.
pub fn brute_force_toy() -> Scenario {
    let a = Airport {
        code: "AAA".into(),
        lat: 52.0,
        lon: 4.0,
        grid_cap_mw: 10.0,
        price_zone: "ZA".into(),
        chargers: 0,
        charger_kw: 11.0,
        ev_kwh: 60.0,
    };
    let b = Airport { code: "BBB".into(), lat: 51.0, lon: 6.0, price_zone: "ZB".into(), ..a.clone() };
    let aircraft = AircraftParams { max_charge_power_mw: 2.0, ..AircraftParams::default() };
    let flights = FlightSet::new(
        vec![
            Flight { id: 1, origin: 0, destination: 1, depart_step: 2, arrive_step: 3, energy_mwh: 4.0 },
            Flight { id: 2, origin: 1, destination: 0, depart_step: 5, arrive_step: 6, energy_mwh: 4.0 },
        ],
        8,
    );
    let za: Vec<f64> = [53.0, 41.0, 67.0, 88.0, 97.0, 59.0, 44.0, 71.0].into_iter().chain([80.0; 16]).collect();
    let zb: Vec<f64> = [61.0, 62.0, 63.0, 47.0, 73.0, 64.0, 65.0, 66.0].into_iter().chain([80.0; 16]).collect();
    let prices = PriceSeries::from_hourly([("ZA".to_string(), za), ("ZB".to_string(), zb)].into(), 1.0)
        .expect("valid prices");
    Scenario {
        airports: vec![a, b],
        flights,
        rotations: vec![Rotation { aircraft_id: 0, home: 0, flights: vec![1, 2] }],
        aircraft,
        dt_hours: 1.0,
        steps: 8,
        buckets: TOY_BUCKETS,
        turnaround_steps: 1,
        prices,
        fleets: Vec::new(),
        policy: Policy::default(),
        fingerprint: "brute-force".into(),
    }
}
