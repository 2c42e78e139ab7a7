//! Acceptance criteria 1 to 10, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout; the
//! process exits nonzero when any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use apron_v2g::cli::{Overrides, ScenarioInputs};
use apron_v2g::evfleet::{simulate_forward, FleetSnapshot, OccupancyStream, SocGrid, StepControls};
use apron_v2g::fixtures::{brute_force_toy, toy_scenario, ToyConfig};
use apron_v2g::lpcore::{build_problem, extract_solution, SolutionReport};
use apron_v2g::scenario::Scenario;
use apron_v2g::schedule::{assign_fleet, breguet_energy, AircraftParams, Flight, FlightSet};
use apron_v2g::solver::{solve, Backend, SolveStatus, SolverConfig};

const ORACLE_REL_TOL: f64 = 1e-6;
const ORACLE_SECONDS: f64 = 5.0;
const BRUTE_FORCE_TOL: f64 = 1e-9;
const BRUTE_FORCE_SECONDS: f64 = 1.0;
const CONSERVATION_TOL: f64 = 1e-9;
const SWEEP_REL_TOL: f64 = 1e-6;
const CONSTRAINT_TOL: f64 = 1e-6;
const REPLAY_TOL: f64 = 1e-6;
const ASSIGN_INSTANCES: usize = 50;
const ASSIGN_MAX_FLIGHTS: usize = 20;
const HUB_BUILD_SECONDS: f64 = 10.0;
const HUB_SOLVE_SECONDS: f64 = 300.0;
const HUB_RESIDUAL_TOL: f64 = 1e-6;
const BREGUET_RANGE: (f64, f64) = (7.8, 8.6);

type Outcome = Result<String, String>;

fn solved(scenario: &Scenario, config: &SolverConfig) -> Result<(SolutionReport, f64), String> {
    let model = build_problem(scenario).map_err(|e| e.to_string())?;
    let out = solve(&model, config).map_err(|e| e.to_string())?;
    if out.status != SolveStatus::Optimal {
        return Err(format!("{} ({})", out.status, out.diagnostics.join("; ")));
    }
    let report = extract_solution(&model, scenario, &out.primal, out.objective).map_err(|e| e.to_string())?;
    Ok((report, out.wall_time))
}

fn hub_inputs() -> Result<ScenarioInputs, String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/hub/scenario.toml");
    ScenarioInputs::load(&path).map_err(|e| e.to_string())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let toy = toy_scenario(&ToyConfig::default());
    if toy.fleets.len() != 1 || toy.airports[0].chargers != 10 || toy.rotations.len() != 1 || toy.flights.len() != 2 {
        return Err("toy does not have the required shape".into());
    }
    let external = SolverConfig { backend: Backend::External, ..SolverConfig::default() };
    let (ext, _) = solved(&toy, &external)?;
    let (refr, _) = solved(&toy, &SolverConfig::reference())?;
    let seconds = start.elapsed().as_secs_f64();
    let rel = (ext.solver_objective - refr.solver_objective).abs() / refr.solver_objective.abs().max(1.0);
    let detail = format!(
        "external {:.9} vs reference {:.9}, rel {rel:.1e}, {seconds:.2} s",
        ext.solver_objective, refr.solver_objective
    );
    if rel <= ORACLE_REL_TOL && seconds < ORACLE_SECONDS {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Cheapest plan over every charging level in half-megawatt steps at every
/// parked step, with the initial energy chosen freely.
fn brute_force_cost(s: &Scenario) -> f64 {
    let rotation = &s.rotations[0];
    let legs: Vec<&Flight> = rotation.flights.iter().map(|id| s.flights.get(*id).unwrap()).collect();
    let n = s.steps;
    // where the aircraft is parked, and how much energy leaves at each step
    let mut parked: Vec<Option<usize>> = vec![None; n];
    let mut drop_after = vec![0.0; n];
    let mut required = vec![s.aircraft.reserve_mwh; n + 1];
    for k in 0..n {
        let airborne = legs.iter().any(|f| f.depart_step <= k && k < f.arrive_step);
        if !airborne {
            let last = legs.iter().rev().find(|f| f.arrive_step <= k);
            parked[k] = Some(last.map_or(legs[0].origin, |f| f.destination));
        }
    }
    for f in &legs {
        drop_after[f.arrive_step - 1] += f.energy_mwh;
        required[f.depart_step] = required[f.depart_step].max(s.aircraft.reserve_mwh + f.energy_mwh);
    }
    let ground: Vec<usize> = (0..n).filter(|&k| parked[k].is_some()).collect();
    let levels: Vec<f64> = (0..=4).map(|i| i as f64 * s.aircraft.max_charge_power_mw / 4.0).collect();
    let mut best = f64::INFINITY;
    let mut choice = vec![0usize; ground.len()];
    loop {
        let mut power = vec![0.0; n];
        for (g, &k) in ground.iter().enumerate() {
            power[k] = levels[choice[g]];
        }
        // offsets relative to the free initial energy
        let mut offset = vec![0.0; n + 1];
        for k in 0..n {
            offset[k + 1] = offset[k] + power[k] * s.dt_hours - drop_after[k];
        }
        let lower = (0..=n).map(|k| required[k] - offset[k]).fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..=n).map(|k| s.aircraft.battery_capacity_mwh - offset[k]).fold(f64::INFINITY, f64::min);
        if lower <= upper + 1e-12 && offset[n] >= -1e-12 {
            let cost: f64 = (0..n)
                .map(|k| match parked[k] {
                    Some(h) => s.prices.price(&s.airports[h].price_zone, k).unwrap() * power[k] * s.dt_hours,
                    None => 0.0,
                })
                .sum();
            best = best.min(cost);
        }
        let mut g = 0;
        while g < choice.len() && choice[g] + 1 == levels.len() {
            choice[g] = 0;
            g += 1;
        }
        if g == choice.len() {
            break;
        }
        choice[g] += 1;
    }
    best
}

fn brute_force_baseline() -> Outcome {
    let s = brute_force_toy();
    if s.rotations.len() != 1 || s.steps != 8 || !s.fleets.is_empty() {
        return Err("toy does not have the required shape".into());
    }
    let start = Instant::now();
    let (lp, _) = solved(&s, &SolverConfig::reference())?;
    let seconds = start.elapsed().as_secs_f64();
    let oracle = brute_force_cost(&s);
    let detail = format!("LP {:.12} vs enumeration {oracle:.12}, {seconds:.3} s", lp.solver_objective);
    if (lp.solver_objective - oracle).abs() <= BRUTE_FORCE_TOL * oracle.abs().max(1.0) && seconds < BRUTE_FORCE_SECONDS {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn conservation_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut nus = Vec::new();
    for (buckets, rate, dt) in [(4, 0.25, 1.0), (4, 0.25, 0.5), (10, 0.2, 0.5), (6, 0.3, 0.25)] {
        let grid = SocGrid::new(buckets, rate, dt);
        let nu = grid.courant();
        nus.push(nu);
        for _ in 0..5 {
            let steps = 100;
            let mut state = FleetSnapshot::idle((0..buckets).map(|_| rng.gen_range(0.0..40.0)).collect());
            let initial = state.clone();
            let mut stream = OccupancyStream::empty(buckets, steps);
            let mut controls = Vec::with_capacity(steps);
            for k in 0..steps {
                let mut c = StepControls::zeros(buckets);
                for b in 0..buckets {
                    stream.arrivals[k][b] = rng.gen_range(0.0..2.0);
                    let idle = state.idle[b];
                    let (a, d, v) = (rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3));
                    // vehicles returning to idle come only from the share that does not advect
                    c.to_charging[b] = a * idle - rng.gen_range(0.0..1.0) * (1.0 - nu) * state.charging[b];
                    c.to_discharging[b] = d * idle - rng.gen_range(0.0..1.0) * (1.0 - nu) * state.discharging[b];
                    c.departures[b] = v * idle;
                }
                stream.departures_total[k] = c.departures.iter().sum();
                let before = state.total();
                state = apron_v2g::evfleet::step_dynamics(&state, &c, &stream.arrivals[k], &grid).map_err(|e| e.to_string())?;
                let flow = stream.arrivals[k].iter().sum::<f64>() - stream.departures_total[k];
                worst = worst.max((state.total() - before - flow).abs());
                controls.push(c);
            }
            let replay = simulate_forward(&initial, &controls, &stream, &grid).map_err(|e| e.to_string())?;
            if replay.states.last() != Some(&state) {
                return Err("simulate_forward disagrees with stepwise dynamics".into());
            }
        }
    }
    let has = |target: f64| nus.iter().any(|nu| (nu - target).abs() < 1e-12);
    let detail = format!("20 runs x 100 steps, ν ∈ {nus:?}, max per-step drift {worst:.1e}");
    if worst <= CONSERVATION_TOL && has(1.0) && has(0.5) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cfl_gate() -> Outcome {
    let mut s = toy_scenario(&ToyConfig::default());
    s.airports[0].charger_kw = 100.0;
    match build_problem(&s) {
        Ok(_) => Err("unstable grid was accepted".into()),
        Err(e) => {
            let msg = e.to_string();
            if msg.contains('ν') {
                Ok(msg)
            } else {
                Err(format!("diagnostic does not name ν: {msg}"))
            }
        }
    }
}

fn non_increasing(costs: &[(f64, f64)]) -> bool {
    costs.windows(2).all(|w| w[1].1 <= w[0].1 + SWEEP_REL_TOL * w[0].1.abs().max(1.0))
}

fn monotone_savings() -> Outcome {
    let config = SolverConfig::default();
    let mut chargers = Vec::new();
    for n in [0u32, 10, 50] {
        let s = toy_scenario(&ToyConfig { chargers: n, with_flows: false, ..ToyConfig::default() });
        chargers.push((f64::from(n), solved(&s, &config)?.0.solver_objective));
    }
    let mut caps = Vec::new();
    for cap in [2.0, 4.0, 8.0] {
        let s = toy_scenario(&ToyConfig { grid_cap_mw: cap, ..ToyConfig::default() });
        caps.push((cap, solved(&s, &config)?.0.solver_objective));
    }
    let detail = format!("chargers {chargers:?}; grid cap {caps:?}");
    if non_increasing(&chargers) && non_increasing(&caps) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Largest violation of the departure energy, grid cap, periodicity and
/// nonnegativity requirements, recomputed from the trajectories.
fn constraint_violation(s: &Scenario, r: &SolutionReport) -> f64 {
    let mut worst: f64 = 0.0;
    for (p, rotation) in s.rotations.iter().enumerate() {
        let e = &r.aircraft[p].energy;
        for id in &rotation.flights {
            let f = s.flights.get(*id).unwrap();
            let arr = s.flights.arrival_in_horizon(f);
            worst = worst.max(s.aircraft.reserve_mwh + f.energy_mwh - e[f.depart_step]);
            worst = worst.max(s.aircraft.reserve_mwh - e[arr]);
        }
        worst = worst.max(e[0] - e[s.steps]);
    }
    for (a, power) in s.airports.iter().zip(&r.airports) {
        worst = power.grid.iter().fold(worst, |w, p| w.max(p - a.grid_cap_mw));
    }
    for fleet in &r.fleets {
        let states = &fleet.states.states;
        worst = worst.max(states[0].soc_weighted_total() - states[s.steps].soc_weighted_total());
        for x in states {
            for v in x.charging.iter().chain(&x.idle).chain(&x.discharging) {
                worst = worst.max(-v);
            }
        }
        for c in &fleet.controls {
            worst = c.departures.iter().fold(worst, |w, v| w.max(-v));
        }
    }
    worst
}

fn constraint_satisfaction() -> Outcome {
    let mut fixtures = vec![
        ("toy", toy_scenario(&ToyConfig::default())),
        ("parked toy", toy_scenario(&ToyConfig { with_flows: false, ..ToyConfig::default() })),
        ("export toy", toy_scenario(&ToyConfig { grid_export: true, ..ToyConfig::default() })),
        ("brute-force toy", brute_force_toy()),
    ];
    fixtures.push(("hub", hub_inputs()?.assemble(&Overrides::default()).map_err(|e| e.to_string())?));
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, s) in &fixtures {
        let (r, _) = solved(s, &SolverConfig::default())?;
        let v = constraint_violation(s, &r);
        worst = worst.max(v);
        parts.push(format!("{name} {:.1e}", v + 0.0));
    }
    let detail = format!("max violation: {}", parts.join(", "));
    if worst <= CONSTRAINT_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn replay_deviation(s: &Scenario, r: &SolutionReport) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for fleet in &r.fleets {
        let site = s.fleet(fleet.airport).unwrap();
        let grid = s.soc_grid(fleet.airport);
        let replay = simulate_forward(&fleet.states.states[0], &fleet.controls, &site.stream, &grid)
            .map_err(|e| e.to_string())?;
        for (a, b) in replay.states.iter().zip(&fleet.states.states) {
            for (x, y) in [(&a.charging, &b.charging), (&a.idle, &b.idle), (&a.discharging, &b.discharging)] {
                worst = x.iter().zip(y).fold(worst, |w, (x, y)| w.max((x - y).abs()));
            }
        }
    }
    Ok(worst)
}

fn forward_replay() -> Outcome {
    let toy = toy_scenario(&ToyConfig::default());
    let hub = hub_inputs()?.assemble(&Overrides::default()).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, s, config) in [("toy", &toy, SolverConfig::reference()), ("hub", &hub, SolverConfig::default())] {
        let (r, _) = solved(s, &config)?;
        let d = replay_deviation(s, &r)?;
        worst = worst.max(d);
        parts.push(format!("{name} {d:.1e}"));
    }
    let detail = format!("max state deviation: {}", parts.join(", "));
    if worst <= REPLAY_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn follows(a: &Flight, b: &Flight, turnaround: usize) -> bool {
    a.destination == b.origin && b.depart_step >= a.arrive_step + turnaround
}

/// Whether the flights split into `aircraft` chains, by backtracking over
/// every aircraft each flight could join.
fn splits_into(order: &[&Flight], turnaround: usize, aircraft: usize, tails: &mut Vec<usize>, next: usize) -> bool {
    if next == order.len() {
        return true;
    }
    let f = order[next];
    for a in 0..tails.len() {
        if follows(order[tails[a]], f, turnaround) {
            let prev = tails[a];
            tails[a] = next;
            if splits_into(order, turnaround, aircraft, tails, next + 1) {
                return true;
            }
            tails[a] = prev;
        }
    }
    if tails.len() < aircraft {
        tails.push(next);
        if splits_into(order, turnaround, aircraft, tails, next + 1) {
            return true;
        }
        tails.pop();
    }
    false
}

fn exhaustive_fleet_size(flights: &[Flight], turnaround: usize) -> usize {
    let mut order: Vec<&Flight> = flights.iter().collect();
    order.sort_by_key(|f| (f.depart_step, f.id));
    (0..=order.len()).find(|&n| splits_into(&order, turnaround, n, &mut Vec::new(), 0)).unwrap()
}

fn assignment_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut sizes = Vec::new();
    for i in 0..ASSIGN_INSTANCES {
        let count = rng.gen_range(1..=ASSIGN_MAX_FLIGHTS);
        let airports = rng.gen_range(2..=4);
        let flights: Vec<Flight> = (0..count)
            .map(|j| {
                let origin = rng.gen_range(0..airports);
                let destination = (origin + rng.gen_range(1..airports)) % airports;
                let depart_step = rng.gen_range(0..80);
                let arrive_step = depart_step + rng.gen_range(1..8);
                Flight { id: j as u32 + 1, origin, destination, depart_step, arrive_step, energy_mwh: 1.0 }
            })
            .collect();
        let turnaround = rng.gen_range(0..4);
        let set = FlightSet::new(flights.clone(), 96);
        let rotations = assign_fleet(&set, turnaround);
        let mut covered: Vec<u32> = rotations.iter().flat_map(|r| r.flights.iter().copied()).collect();
        covered.sort_unstable();
        if covered != (1..=count as u32).collect::<Vec<_>>() {
            return Err(format!("instance {i}: flights not covered exactly once"));
        }
        for r in &rotations {
            for w in r.flights.windows(2) {
                if !follows(set.get(w[0]).unwrap(), set.get(w[1]).unwrap(), turnaround) {
                    return Err(format!("instance {i}: rotation {} breaks a connection", r.aircraft_id));
                }
            }
        }
        let oracle = exhaustive_fleet_size(&flights, turnaround);
        if rotations.len() != oracle {
            return Err(format!("instance {i}: {} rotations, exhaustive minimum {oracle}", rotations.len()));
        }
        sizes.push(count);
    }
    Ok(format!(
        "{ASSIGN_INSTANCES} instances with {}..={} flights match the exhaustive minimum",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    ))
}

fn scale_check() -> Outcome {
    let inputs = hub_inputs()?;
    let scenario = inputs.assemble(&Overrides::default()).map_err(|e| e.to_string())?;
    let shape = (scenario.airports.len(), scenario.flights.len(), scenario.steps, scenario.buckets, scenario.fleet_airports());
    if shape.0 != 45 || !(300..=400).contains(&shape.1) || shape.2 != 96 || shape.3 != 10 || shape.4 != vec![0] {
        return Err(format!("hub fixture has the wrong shape {shape:?}"));
    }
    let start = Instant::now();
    let model = build_problem(&scenario).map_err(|e| e.to_string())?;
    let build = start.elapsed().as_secs_f64();
    let config = SolverConfig { backend: Backend::External, ..SolverConfig::default() };
    let out = solve(&model, &config).map_err(|e| e.to_string())?;
    if out.status != SolveStatus::Optimal {
        return Err(format!("hub solve ended {}: {}", out.status, out.diagnostics.join("; ")));
    }
    let residual = extract_solution(&model, &scenario, &out.primal, out.objective)
        .map_err(|e| e.to_string())?
        .residuals
        .max();
    let cost = |chargers| -> Result<f64, String> {
        let s = inputs.assemble(&Overrides { chargers: Some(chargers), ..Overrides::default() }).map_err(|e| e.to_string())?;
        Ok(solved(&s, &config)?.0.solver_objective)
    };
    let (baseline, v2g) = (cost(0)?, cost(6000)?);
    let savings = 1.0 - v2g / baseline;
    let detail = format!(
        "{} columns, build {build:.2} s, solve {:.2} s, residual {residual:.1e}; 6000 chargers save {:.2} % ({baseline:.2} -> {v2g:.2})",
        model.columns,
        out.wall_time,
        100.0 * savings
    );
    if build < HUB_BUILD_SECONDS && out.wall_time < HUB_SOLVE_SECONDS && residual <= HUB_RESIDUAL_TOL && savings > 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn breguet_sanity() -> Outcome {
    let params = AircraftParams::default();
    let e = breguet_energy(800.0, &params).map_err(|e| e.to_string())?;
    // m g d / (η L/D) with 78 t, L/D 23, η 0.9, in MWh
    let oracle = 78_000.0 * 9.81 * 800_000.0 / (0.9 * 23.0) / 3.6e9;
    let fits = e + params.reserve_mwh <= params.battery_capacity_mwh;
    let detail = format!("{e:.4} MWh (hand value {oracle:.4}), plus reserve fits the battery: {fits}");
    if (BREGUET_RANGE.0..=BREGUET_RANGE.1).contains(&e) && (e - oracle).abs() < 1e-9 && fits {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("brute-force baseline", brute_force_baseline),
        ("conservation suite", conservation_suite),
        ("CFL gate", cfl_gate),
        ("monotone savings", monotone_savings),
        ("constraint satisfaction", constraint_satisfaction),
        ("forward replay", forward_replay),
        ("fleet-assignment optimality", assignment_optimality),
        ("scale check", scale_check),
        ("Breguet sanity", breguet_sanity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
