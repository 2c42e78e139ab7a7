//! Python bindings: scenarios, solves and the standalone model pieces.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use apron_v2g::cli::{self, CliError, Overrides, RunOutput, RunSummary, ScenarioInputs};
use apron_v2g::evfleet::{self, FleetSnapshot, OccupancyStream, SocGrid, StepControls};
use apron_v2g::fixtures::{self, ToyConfig};
use apron_v2g::lpcore::{build_problem, write_mps};
use apron_v2g::scenario::Scenario;
use apron_v2g::schedule::{self, AircraftParams, Flight, FlightSet, LatLon};
use apron_v2g::solver::{Backend, SolverConfig};

create_exception!(apron_v2g, InfeasibleError, PyRuntimeError, "The scenario has no feasible schedule.");

fn to_py(e: CliError) -> PyErr {
    match e {
        CliError::Infeasible(msg) => InfeasibleError::new_err(msg),
        e @ (CliError::NotSolved { .. } | CliError::Verification(_) | CliError::Solve(_)) => {
            PyRuntimeError::new_err(e.to_string())
        }
        e => PyValueError::new_err(e.to_string()),
    }
}

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Snapshot = (Vec<f64>, Vec<f64>, Vec<f64>);

fn snapshot(s: &FleetSnapshot) -> Snapshot {
    (s.charging.clone(), s.idle.clone(), s.discharging.clone())
}

/// A resolved problem instance.
#[pyclass(name = "Scenario", module = "apron_v2g", frozen)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    /// Reads a scenario file and its tables.
    #[staticmethod]
    #[pyo3(signature = (path, chargers=None, grid_cap_mw=None, seed=None))]
    fn load(path: PathBuf, chargers: Option<u32>, grid_cap_mw: Option<f64>, seed: Option<u64>) -> PyResult<Self> {
        let overrides = Overrides { chargers, grid_cap_mw, seed };
        let inner = ScenarioInputs::load(&path).and_then(|i| i.assemble(&overrides)).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// The two-airport toy network.
    #[staticmethod]
    #[pyo3(signature = (chargers=10, grid_cap_mw=8.0, with_flows=true, seed=7, grid_export=false))]
    fn toy(chargers: u32, grid_cap_mw: f64, with_flows: bool, seed: u64, grid_export: bool) -> Self {
        let inner = fixtures::toy_scenario(&ToyConfig { chargers, grid_cap_mw, with_flows, seed, grid_export });
        Self { inner }
    }

    /// One aircraft, eight hourly steps, no parked fleet.
    #[staticmethod]
    fn brute_force_toy() -> Self {
        Self { inner: fixtures::brute_force_toy() }
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps
    }

    #[getter]
    fn dt_hours(&self) -> f64 {
        self.inner.dt_hours
    }

    #[getter]
    fn buckets(&self) -> usize {
        self.inner.buckets
    }

    #[getter]
    fn fingerprint(&self) -> &str {
        &self.inner.fingerprint
    }

    /// Airport codes in table order.
    #[getter]
    fn airports(&self) -> Vec<String> {
        self.inner.airports.iter().map(|a| a.code.clone()).collect()
    }

    /// `(code, chargers)` for airports with a parked fleet.
    #[getter]
    fn chargers(&self) -> Vec<(String, u32)> {
        self.inner.airports.iter().filter(|a| a.has_fleet()).map(|a| (a.code.clone(), a.chargers)).collect()
    }

    #[getter]
    fn aircraft(&self) -> usize {
        self.inner.rotations.len()
    }

    #[getter]
    fn flights(&self) -> usize {
        self.inner.flights.len()
    }

    /// Flight ids per aircraft.
    #[getter]
    fn rotations(&self) -> Vec<Vec<u32>> {
        self.inner.rotations.iter().map(|r| r.flights.clone()).collect()
    }

    /// The LP in free MPS format.
    fn to_mps(&self) -> PyResult<String> {
        let model = build_problem(&self.inner).map_err(value_error)?;
        Ok(write_mps(&model, "APRONV2G"))
    }

    /// Builds, solves, verifies and extracts.
    #[pyo3(signature = (backend="external", tol=1e-6))]
    fn solve(&self, py: Python<'_>, backend: &str, tol: f64) -> PyResult<PyRun> {
        let backend = match backend {
            "external" => Backend::External,
            "reference" => Backend::Reference,
            other => return Err(PyValueError::new_err(format!("unknown backend `{other}`"))),
        };
        let config = SolverConfig { backend, feasibility_tol: tol, optimality_tol: tol, ..SolverConfig::default() };
        let scenario = &self.inner;
        let inner = py.detach(|| cli::run_scenario(scenario, &config)).map_err(to_py)?;
        Ok(PyRun { inner, scenario: scenario.clone() })
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "Scenario(airports={}, aircraft={}, flights={}, steps={}, dt_hours={}, buckets={})",
            s.airports.len(),
            s.rotations.len(),
            s.flights.len(),
            s.steps,
            s.dt_hours,
            s.buckets
        )
    }
}

/// A solved and verified scenario.
#[pyclass(name = "Run", module = "apron_v2g", frozen)]
struct PyRun {
    inner: RunOutput,
    scenario: Scenario,
}

impl PyRun {
    fn airport(&self, code: &str) -> PyResult<usize> {
        self.scenario.airport_index(code).ok_or_else(|| PyKeyError::new_err(code.to_string()))
    }

    fn trajectory(&self, aircraft: usize) -> PyResult<&apron_v2g::lpcore::AircraftTrajectory> {
        self.inner.report.aircraft.get(aircraft).ok_or_else(|| PyKeyError::new_err(aircraft))
    }
}

#[pymethods]
impl PyRun {
    #[getter]
    fn status(&self) -> String {
        self.inner.outcome.status.to_string()
    }

    /// Grid cost [EUR].
    #[getter]
    fn objective(&self) -> f64 {
        self.inner.outcome.objective
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.outcome.iterations
    }

    #[getter]
    fn backend(&self) -> String {
        format!("{:?}", self.inner.outcome.backend).to_lowercase()
    }

    /// Solve time [s].
    #[getter]
    fn wall_time(&self) -> f64 {
        self.inner.outcome.wall_time
    }

    #[getter]
    fn columns(&self) -> usize {
        self.inner.model.columns
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.model.rows()
    }

    /// Largest row or bound violation of the solution.
    #[getter]
    fn max_residual(&self) -> f64 {
        self.inner.report.residuals.max()
    }

    /// The verification checks as text.
    fn verification(&self) -> String {
        self.inner.verification.to_string()
    }

    /// Grid draw per step [MW].
    fn grid_power(&self, airport: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.report.airports[self.airport(airport)?].grid.clone())
    }

    /// Aircraft charging demand per step [MW].
    fn apron_power(&self, airport: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.report.airports[self.airport(airport)?].apron.clone())
    }

    /// Net parked-fleet power per step [MW]; negative while feeding back.
    fn fleet_power(&self, airport: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.report.airports[self.airport(airport)?].fleet.clone())
    }

    /// Battery energy at steps `0..=N` [MWh].
    fn aircraft_energy(&self, aircraft: usize) -> PyResult<Vec<f64>> {
        Ok(self.trajectory(aircraft)?.energy.clone())
    }

    /// Charging power per step [MW].
    fn aircraft_power(&self, aircraft: usize) -> PyResult<Vec<f64>> {
        Ok(self.trajectory(aircraft)?.power.clone())
    }

    /// `(charging, idle, discharging)` vehicle counts per bucket at steps `0..=N`.
    fn fleet_states(&self, airport: &str) -> PyResult<Vec<Snapshot>> {
        let h = self.airport(airport)?;
        let fleet = self.inner.report.fleets.iter().find(|f| f.airport == h);
        let fleet = fleet.ok_or_else(|| PyKeyError::new_err(format!("{airport} has no parked fleet")))?;
        Ok(fleet.states.states.iter().map(snapshot).collect())
    }

    /// `(to_charging, to_discharging, departures)` per step.
    fn fleet_controls(&self, airport: &str) -> PyResult<Vec<Snapshot>> {
        let h = self.airport(airport)?;
        let fleet = self.inner.report.fleets.iter().find(|f| f.airport == h);
        let fleet = fleet.ok_or_else(|| PyKeyError::new_err(format!("{airport} has no parked fleet")))?;
        Ok(fleet
            .controls
            .iter()
            .map(|c| (c.to_charging.clone(), c.to_discharging.clone(), c.departures.clone()))
            .collect())
    }

    /// Writes the report directory; returns the summary as `key,value` text.
    #[pyo3(signature = (out, mps=false))]
    fn write(&self, out: PathBuf, mps: bool) -> PyResult<String> {
        let overrides = Overrides::default();
        cli::write_outputs(&out, &self.scenario, &self.inner, &overrides, mps).map_err(to_py)?;
        Ok(RunSummary::from_run(&self.scenario, &self.inner, &overrides).to_csv())
    }

    fn __repr__(&self) -> String {
        format!(
            "Run(status={}, objective={}, backend={}, iterations={})",
            self.status(),
            self.objective(),
            self.backend(),
            self.iterations()
        )
    }
}

/// Cruise energy [MWh] of a flight over `distance_km`.
#[pyfunction]
#[pyo3(signature = (distance_km, mass_kg=None, lift_to_drag=None, powertrain_efficiency=None))]
fn breguet_energy(
    distance_km: f64,
    mass_kg: Option<f64>,
    lift_to_drag: Option<f64>,
    powertrain_efficiency: Option<f64>,
) -> PyResult<f64> {
    let d = AircraftParams::default();
    let params = AircraftParams {
        mass_kg: mass_kg.unwrap_or(d.mass_kg),
        lift_to_drag: lift_to_drag.unwrap_or(d.lift_to_drag),
        powertrain_efficiency: powertrain_efficiency.unwrap_or(d.powertrain_efficiency),
        ..d
    };
    schedule::breguet_energy(distance_km, &params).map_err(value_error)
}

/// Great-circle distance [km] between two `(lat, lon)` points.
#[pyfunction]
fn great_circle_km(a: (f64, f64), b: (f64, f64)) -> PyResult<f64> {
    let a = LatLon::new(a.0, a.1).map_err(value_error)?;
    let b = LatLon::new(b.0, b.1).map_err(value_error)?;
    Ok(schedule::great_circle_km(a, b))
}

/// Fewest rotations covering `(id, origin, destination, depart_step, arrive_step)` flights.
#[pyfunction]
#[pyo3(signature = (flights, turnaround_steps, horizon_steps=96))]
fn assign_fleet(flights: Vec<(u32, usize, usize, usize, usize)>, turnaround_steps: usize, horizon_steps: usize) -> Vec<Vec<u32>> {
    let flights = flights
        .into_iter()
        .map(|(id, origin, destination, depart_step, arrive_step)| Flight {
            id,
            origin,
            destination,
            depart_step,
            arrive_step,
            energy_mwh: 0.0,
        })
        .collect();
    schedule::assign_fleet(&FlightSet::new(flights, horizon_steps), turnaround_steps)
        .into_iter()
        .map(|r| r.flights)
        .collect()
}

/// `ν = p·Δt/Δξ`; raises when the grid is unstable.
#[pyfunction]
fn courant_number(buckets: usize, rate_per_hour: f64, dt_hours: f64) -> PyResult<f64> {
    evfleet::validate_cfl(&SocGrid::new(buckets, rate_per_hour, dt_hours)).map_err(value_error)
}

/// Replays fleet controls from an all-idle start.
///
/// `controls` holds `(to_charging, to_discharging, departures)` per step and
/// `arrivals` the arriving vehicles per step and bucket.
#[pyfunction]
fn simulate_fleet(
    initial_idle: Vec<f64>,
    controls: Vec<Snapshot>,
    arrivals: Vec<Vec<f64>>,
    rate_per_hour: f64,
    dt_hours: f64,
) -> PyResult<Vec<Snapshot>> {
    let buckets = initial_idle.len();
    let grid = SocGrid::new(buckets, rate_per_hour, dt_hours);
    evfleet::validate_cfl(&grid).map_err(value_error)?;
    if arrivals.len() != controls.len() {
        return Err(PyValueError::new_err(format!("{} control steps, {} arrival steps", controls.len(), arrivals.len())));
    }
    let mut stream = OccupancyStream::empty(buckets, controls.len());
    stream.arrivals = arrivals;
    let controls: Vec<StepControls> = controls
        .into_iter()
        .map(|(to_charging, to_discharging, departures)| StepControls { to_charging, to_discharging, departures })
        .collect();
    let states = evfleet::simulate_forward(&FleetSnapshot::idle(initial_idle), &controls, &stream, &grid).map_err(value_error)?;
    Ok(states.states.iter().map(snapshot).collect())
}

/// Writes the synthetic hub-and-spoke scenario into `out`.
#[pyfunction]
#[pyo3(signature = (out, seed=1, chargers=3000))]
fn generate_hub(out: PathBuf, seed: u64, chargers: u32) -> PyResult<Vec<PathBuf>> {
    cli::write_inputs(&out, &cli::hub_network(seed, chargers)).map_err(to_py)
}

/// `(name, cost, savings)` for a baseline report directory and its variants.
#[pyfunction]
fn compare_reports(baseline: PathBuf, variants: Vec<PathBuf>) -> PyResult<Vec<(String, f64, f64)>> {
    let base = RunSummary::load(&baseline).map_err(to_py)?;
    let variants = variants
        .iter()
        .map(|d| Ok((d.display().to_string(), RunSummary::load(d)?)))
        .collect::<Result<Vec<_>, CliError>>()
        .map_err(to_py)?;
    let report = cli::compare((&baseline.display().to_string(), &base), &variants).map_err(to_py)?;
    Ok(std::iter::once(&report.baseline)
        .chain(&report.variants)
        .map(|v| (v.name.clone(), v.cost, v.savings))
        .collect())
}

#[pymodule(name = "apron_v2g")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRun>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(breguet_energy, m)?)?;
    m.add_function(wrap_pyfunction!(great_circle_km, m)?)?;
    m.add_function(wrap_pyfunction!(assign_fleet, m)?)?;
    m.add_function(wrap_pyfunction!(courant_number, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_fleet, m)?)?;
    m.add_function(wrap_pyfunction!(generate_hub, m)?)?;
    m.add_function(wrap_pyfunction!(compare_reports, m)?)?;
    Ok(())
}
