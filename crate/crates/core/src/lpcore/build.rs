use crate::scenario::Scenario;
use crate::schedule::GroundIndicator;

use super::{BuildError, LpModel, RowGroup, VarIndex, VarKind};

const INF: f64 = f64::INFINITY;

/// Assembles the cost-minimisation LP for a scenario.
///
/// Rows, per aircraft: departure energy, flight energy, energy balance,
/// periodicity. Per airport and step: apron aggregation and power split.
/// Per fleet: the three transport equalities, fleet power, departure SoC,
/// departure total, charger capacity and SoC-weighted periodicity. The grid
/// connection limit, the Pb bounds and the closed end buckets of the fleet
/// are column bounds.
pub fn build_problem(scenario: &Scenario) -> Result<LpModel, BuildError> {
    let ground = scenario.validate()?;
    static_checks(scenario)?;
    let idx = VarIndex::new(
        scenario.rotations.len(),
        scenario.airports.len(),
        scenario.steps,
        scenario.buckets,
        &scenario.fleet_airports(),
    );
    let mut model = LpModel::new(idx.columns());
    model.col_names = (0..idx.columns()).map(|j| idx.name(j)).collect();

    aircraft_block(&mut model, &idx, scenario, &ground);
    airport_block(&mut model, &idx, scenario, &ground);
    for site in 0..scenario.fleets.len() {
        fleet_block(&mut model, &idx, scenario, site);
    }
    model.index = Some(idx);
    debug_assert!(model.well_formed().is_ok());
    Ok(model)
}

/// The problem with every grid cap relaxed by a per-airport excess `Δ_h ≥ 0`.
#[derive(Debug, Clone)]
pub struct ElasticModel {
    pub model: LpModel,
    /// Column of `Δ_h` for each airport.
    pub excess_columns: Vec<usize>,
}

/// Builds the feasibility-diagnosis model minimising `Σ_h Δ_h`.
pub fn build_elastic(scenario: &Scenario) -> Result<ElasticModel, BuildError> {
    let mut model = build_problem(scenario)?;
    let idx = model.index.clone().expect("built models carry an index");
    model.objective.iter_mut().for_each(|c| *c = 0.0);
    let mut excess_columns = Vec::with_capacity(scenario.airports.len());
    for (h, airport) in scenario.airports.iter().enumerate() {
        let delta = model.add_column(format!("Dcap_h{h}"), 0.0, INF, 1.0);
        excess_columns.push(delta);
        for k in 0..scenario.steps {
            let pgr = idx.col(VarKind::Pgr { airport: h, k });
            model.col_bounds[pgr].1 = INF;
            model.add_row(
                RowGroup::GridCapRelaxed,
                format!("gcap_h{h}_k{k}"),
                [(pgr, 1.0), (delta, -1.0)],
                -INF,
                airport.grid_cap_mw,
            );
        }
    }
    Ok(ElasticModel { model, excess_columns })
}

fn static_checks(scenario: &Scenario) -> Result<(), BuildError> {
    let usable = scenario.aircraft.usable_energy_mwh();
    if let Some(f) = scenario.flights.flights.iter().find(|f| f.energy_mwh > usable) {
        return Err(BuildError::StaticInfeasible(format!(
            "flight {} needs {:.3} MWh but only {:.3} MWh are usable above the reserve",
            f.id, f.energy_mwh, usable
        )));
    }
    Ok(())
}

fn aircraft_block(model: &mut LpModel, idx: &VarIndex, scenario: &Scenario, ground: &GroundIndicator) {
    let params = &scenario.aircraft;
    let (n, dt) = (scenario.steps, scenario.dt_hours);
    let e_min = params.reserve_mwh;
    for (p, rotation) in scenario.rotations.iter().enumerate() {
        let eb = |k| idx.col(VarKind::Eb { aircraft: p, k });
        let pb = |k| idx.col(VarKind::Pb { aircraft: p, k });
        for k in 0..=n {
            model.col_bounds[eb(k)] = (e_min, params.battery_capacity_mwh);
        }
        for k in 0..n {
            let cap = if ground.location(p, k).is_some() { params.max_charge_power_mw } else { 0.0 };
            model.col_bounds[pb(k)] = (0.0, cap);
        }
        for id in &rotation.flights {
            let f = scenario.flights.get(*id).expect("validated rotation");
            let (dep, arr) = (f.depart_step, scenario.flights.arrival_in_horizon(f));
            model.add_row(
                RowGroup::DepartureEnergy,
                format!("depE_p{p}_f{id}"),
                [(eb(dep), 1.0)],
                e_min + f.energy_mwh,
                INF,
            );
            model.add_row(
                RowGroup::FlightEnergy,
                format!("fltE_p{p}_f{id}"),
                [(eb(arr), 1.0), (eb(dep), -1.0)],
                -f.energy_mwh,
                -f.energy_mwh,
            );
        }
        for k in 0..n {
            model.add_row(
                RowGroup::EnergyBalance,
                format!("ebal_p{p}_k{k}"),
                [(eb(k + 1), 1.0), (eb(k), -1.0), (pb(k), -dt)],
                -INF,
                0.0,
            );
        }
        model.add_row(RowGroup::AircraftPeriodicity, format!("perE_p{p}"), [(eb(n), 1.0), (eb(0), -1.0)], 0.0, INF);
    }
}

fn airport_block(model: &mut LpModel, idx: &VarIndex, scenario: &Scenario, ground: &GroundIndicator) {
    let (n, dt) = (scenario.steps, scenario.dt_hours);
    for (h, airport) in scenario.airports.iter().enumerate() {
        let cap = airport.grid_cap_mw;
        let lower = if scenario.policy.grid_export { -cap } else { 0.0 };
        for k in 0..n {
            let pgr = idx.col(VarKind::Pgr { airport: h, k });
            let pa = idx.col(VarKind::Pa { airport: h, k });
            let pc = idx.col(VarKind::Pc { airport: h, k });
            model.col_bounds[pgr] = (lower, cap);
            model.objective[pgr] = scenario.prices.price(&airport.price_zone, k).expect("validated zone") * dt;
            model.col_bounds[pa] = (-INF, INF);
            model.col_bounds[pc] = if idx.has_fleet(h) { (-INF, INF) } else { (0.0, 0.0) };

            let parked = ground.parked_at(h, k).map(|p| (idx.col(VarKind::Pb { aircraft: p, k }), -1.0));
            model.add_row(
                RowGroup::AirsideAggregation,
                format!("air_h{h}_k{k}"),
                std::iter::once((pa, 1.0)).chain(parked),
                0.0,
                0.0,
            );
            model.add_row(
                RowGroup::PowerSplit,
                format!("split_h{h}_k{k}"),
                [(pa, 1.0), (pgr, -1.0), (pc, 1.0)],
                0.0,
                0.0,
            );
        }
    }
}

fn fleet_block(model: &mut LpModel, idx: &VarIndex, scenario: &Scenario, site: usize) {
    let site = &scenario.fleets[site];
    let h = site.airport;
    let airport = &scenario.airports[h];
    let (n, nb) = (scenario.steps, scenario.buckets);
    let nu = scenario.soc_grid(h).courant();
    let eta = site.charging_efficiency;
    let stream = &site.stream;
    let xc = |b, k| idx.col(VarKind::Xc { airport: h, bucket: b, k });
    let xi = |b, k| idx.col(VarKind::Xi { airport: h, bucket: b, k });
    let xd = |b, k| idx.col(VarKind::Xd { airport: h, bucket: b, k });
    let uc = |b, k| idx.col(VarKind::Uc { airport: h, bucket: b, k });
    let ud = |b, k| idx.col(VarKind::Ud { airport: h, bucket: b, k });
    let vout = |b, k| idx.col(VarKind::Vout { airport: h, bucket: b, k });

    // an empty battery cannot discharge and a full one cannot charge; without
    // this, discharge leaving the bottom bucket lands back in it and can be
    // discharged again indefinitely
    for k in 1..=n {
        model.col_bounds[xd(0, k)] = (0.0, 0.0);
        model.col_bounds[xc(nb - 1, k)] = (0.0, 0.0);
    }
    for b in 0..nb {
        model.col_bounds[xc(b, 0)] = (0.0, 0.0);
        model.col_bounds[xd(b, 0)] = (0.0, 0.0);
        model.col_bounds[xi(b, 0)] = (stream.initial_idle[b], stream.initial_idle[b]);
        for k in 0..n {
            model.col_bounds[uc(b, k)] = (-INF, INF);
            model.col_bounds[ud(b, k)] = (-INF, INF);
        }
    }

    for k in 0..n {
        for b in 0..nb {
            let mut terms = vec![(xc(b, k + 1), 1.0), (xc(b, k), -(1.0 - nu)), (uc(b, k), -1.0)];
            if b > 0 {
                terms.push((xc(b - 1, k), -nu));
            }
            model.add_row(RowGroup::ChargingTransport, format!("xc_h{h}_b{b}_k{k}"), terms, 0.0, 0.0);

            let mut terms = vec![(xd(b, k + 1), 1.0), (xd(b, k), -(1.0 - nu)), (ud(b, k), -1.0)];
            if b + 1 < nb {
                terms.push((xd(b + 1, k), -nu));
            }
            model.add_row(RowGroup::DischargingTransport, format!("xd_h{h}_b{b}_k{k}"), terms, 0.0, 0.0);

            let mut terms = vec![
                (xi(b, k + 1), 1.0),
                (xi(b, k), -1.0),
                (vout(b, k), 1.0),
                (uc(b, k), 1.0),
                (ud(b, k), 1.0),
            ];
            if b + 1 == nb {
                terms.push((xc(b, k), -nu));
            }
            if b == 0 {
                terms.push((xd(b, k), -nu));
            }
            let v_in = stream.arrivals[k][b];
            model.add_row(RowGroup::IdleBalance, format!("xi_h{h}_b{b}_k{k}"), terms, v_in, v_in);
        }

        let scale = airport.charger_kw / 1000.0;
        let terms = std::iter::once((idx.col(VarKind::Pc { airport: h, k }), 1.0))
            .chain((0..nb).map(|b| (xc(b, k), -scale / eta)))
            .chain((0..nb).map(|b| (xd(b, k), scale * eta)));
        model.add_row(RowGroup::FleetPower, format!("pc_h{h}_k{k}"), terms, 0.0, 0.0);

        for b in 0..nb {
            let required = stream.v_out_ref[k][b];
            if required > 0.0 {
                model.add_row(
                    RowGroup::DepartureSoc,
                    format!("dsoc_h{h}_b{b}_k{k}"),
                    (b..nb).map(|l| (vout(l, k), 1.0)),
                    required,
                    INF,
                );
            }
        }
        let total = stream.departures_total[k];
        model.add_row(RowGroup::DepartureTotal, format!("dtot_h{h}_k{k}"), (0..nb).map(|b| (vout(b, k), 1.0)), total, total);
    }

    let chargers = f64::from(airport.chargers);
    for k in 1..=n {
        let terms = (0..nb).flat_map(|b| [(xc(b, k), 1.0), (xd(b, k), 1.0)]);
        model.add_row(RowGroup::ChargerCapacity, format!("chg_h{h}_k{k}"), terms, -INF, chargers);
    }

    let weighted = |k: usize, sign: f64| {
        (0..nb).flat_map(move |b| {
            let w = sign * (b + 1) as f64;
            [(xc(b, k), w), (xi(b, k), w), (xd(b, k), w)]
        })
    };
    let terms: Vec<_> = weighted(n, 1.0).chain(weighted(0, -1.0)).collect();
    model.add_row(RowGroup::FleetPeriodicity, format!("perX_h{h}"), terms, 0.0, INF);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evfleet::fleet_power;
    use crate::fixtures::{empty_flight_toy, toy_scenario, ToyConfig, TOY_BUCKETS, TOY_STEPS};
    use crate::lpcore::{residuals, PriceSeries};
    use crate::scenario::ScenarioError;

    fn parked_only() -> Scenario {
        toy_scenario(&ToyConfig { with_flows: false, ..ToyConfig::default() })
    }

    /// Aircraft recharges to full right after each landing, the fleet stays idle.
    fn feasible_point(scenario: &Scenario, model: &LpModel) -> Vec<f64> {
        let idx = model.index.as_ref().unwrap();
        let ground = scenario.validate().unwrap();
        let (n, dt) = (scenario.steps, scenario.dt_hours);
        let cap = scenario.aircraft.battery_capacity_mwh;
        let mut x = vec![0.0; model.columns];
        for p in 0..scenario.rotations.len() {
            let mut e = cap;
            x[idx.col(VarKind::Eb { aircraft: p, k: 0 })] = e;
            for k in 0..n {
                if ground.location(p, k).is_some() {
                    let pb = ((cap - e) / dt).min(scenario.aircraft.max_charge_power_mw);
                    x[idx.col(VarKind::Pb { aircraft: p, k })] = pb;
                    e += pb * dt;
                } else if let Some(f) = scenario.flights.flights.iter().find(|f| f.depart_step == k) {
                    assert_eq!(scenario.flights.arrival_in_horizon(f), k + 1);
                    e -= f.energy_mwh;
                }
                x[idx.col(VarKind::Eb { aircraft: p, k: k + 1 })] = e;
            }
        }
        for site in &scenario.fleets {
            for k in 0..=n {
                for b in 0..scenario.buckets {
                    x[idx.col(VarKind::Xi { airport: site.airport, bucket: b, k })] = site.stream.initial_idle[b];
                }
            }
        }
        for (h, airport) in scenario.airports.iter().enumerate() {
            for k in 0..n {
                let pa: f64 = ground.parked_at(h, k).map(|p| x[idx.col(VarKind::Pb { aircraft: p, k })]).sum();
                let pc = scenario.fleet(h).map_or(0.0, |site| {
                    let snap = crate::evfleet::FleetSnapshot::idle(site.stream.initial_idle.clone());
                    fleet_power(&snap, airport, site.charging_efficiency)
                });
                x[idx.col(VarKind::Pa { airport: h, k })] = pa;
                x[idx.col(VarKind::Pc { airport: h, k })] = pc;
                x[idx.col(VarKind::Pgr { airport: h, k })] = pa + pc;
            }
        }
        x
    }

    #[test]
    fn empty_schedule_has_only_core_columns() {
        let s = empty_flight_toy(6);
        let m = build_problem(&s).unwrap();
        // one aircraft (2N+1) plus one airport (3N), no fleet
        assert_eq!(m.columns, 13 + 18);
        let x = feasible_point(&s, &m);
        assert_eq!(m.objective_value(&x), 0.0);
        assert!(residuals(&m, &x).max() == 0.0);
    }

    #[test]
    fn column_count_matches_layout() {
        let m = build_problem(&toy_scenario(&ToyConfig::default())).unwrap();
        let (n, b) = (TOY_STEPS, TOY_BUCKETS);
        let expected = (2 * n + 1) + 2 * 3 * n + 3 * b * (n + 1) + 3 * b * n;
        assert_eq!(m.columns, expected);
        assert_eq!(m.col_names.len(), expected);
        assert!(m.well_formed().is_ok());
    }

    #[test]
    fn only_grid_power_is_priced() {
        let m = build_problem(&toy_scenario(&ToyConfig::default())).unwrap();
        let idx = m.index.as_ref().unwrap();
        for (j, &c) in m.objective.iter().enumerate() {
            let is_grid = matches!(idx.kind(j), Some(VarKind::Pgr { .. }));
            assert_eq!(c != 0.0, is_grid, "{}", m.col_names[j]);
        }
        // hub zone, hour 11, one-hour steps
        assert_eq!(m.objective[idx.col(VarKind::Pgr { airport: 0, k: 11 })], 26.0);
    }

    #[test]
    fn equality_groups_have_equal_bounds() {
        let m = build_problem(&toy_scenario(&ToyConfig::default())).unwrap();
        use RowGroup::*;
        for (i, g) in m.row_groups.iter().enumerate() {
            let (l, u) = m.row_bounds[i];
            let equality = matches!(
                g,
                FlightEnergy
                    | AirsideAggregation
                    | PowerSplit
                    | ChargingTransport
                    | IdleBalance
                    | DischargingTransport
                    | FleetPower
                    | DepartureTotal
            );
            assert_eq!(l == u, equality, "{}", m.row_names[i]);
        }
    }

    #[test]
    fn missing_price_zone_is_reported() {
        let mut s = toy_scenario(&ToyConfig::default());
        s.prices = PriceSeries::flat(["Z1"], 50.0, 1.0);
        match build_problem(&s) {
            Err(BuildError::Scenario(ScenarioError::MissingPriceZone { zone, airport })) => {
                assert_eq!((zone.as_str(), airport.as_str()), ("Z2", "SPK"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oversized_flight_is_statically_infeasible() {
        let mut s = toy_scenario(&ToyConfig::default());
        s.flights.flights[1].energy_mwh = 11.0;
        let err = build_problem(&s).unwrap_err();
        assert!(matches!(err, BuildError::StaticInfeasible(ref m) if m.contains("flight 2")), "{err}");
    }

    #[test]
    fn unstable_soc_grid_names_the_courant_number() {
        let mut s = toy_scenario(&ToyConfig::default());
        s.airports[0].charger_kw = 100.0;
        let err = build_problem(&s).unwrap_err().to_string();
        assert!(err.contains("ν = ") && err.contains("HUB"), "{err}");
    }

    #[test]
    fn hand_built_point_is_feasible() {
        let s = parked_only();
        let m = build_problem(&s).unwrap();
        let x = feasible_point(&s, &m);
        let r = residuals(&m, &x);
        assert!(r.max() <= 1e-12, "{r:?}");
    }

    #[test]
    fn energy_perturbation_shows_in_the_balance_rows() {
        let s = parked_only();
        let m = build_problem(&s).unwrap();
        let idx = m.index.as_ref().unwrap();
        let mut x = feasible_point(&s, &m);
        // lowering E_b[3] breaks E_b[4] ≤ E_b[3] + P_b[3]·Δt by the same amount
        x[idx.col(VarKind::Eb { aircraft: 0, k: 3 })] -= 1e-3;
        let r = residuals(&m, &x);
        assert!((r.group(RowGroup::EnergyBalance) - 1e-3).abs() < 1e-12, "{r:?}");
        assert!(r.group(RowGroup::FlightEnergy) < 1e-12);
    }

    #[test]
    fn elastic_model_relaxes_every_cap() {
        let s = toy_scenario(&ToyConfig { grid_cap_mw: 0.5, ..ToyConfig::default() });
        let e = build_elastic(&s).unwrap();
        assert_eq!(e.excess_columns.len(), 2);
        let gcap = e.model.row_groups.iter().filter(|g| **g == RowGroup::GridCapRelaxed).count();
        assert_eq!(gcap, 2 * TOY_STEPS);
        let nonzero: Vec<usize> = (0..e.model.columns).filter(|&j| e.model.objective[j] != 0.0).collect();
        assert_eq!(nonzero, e.excess_columns);
    }
}
