//! CSV ingestion for airports, flights and precomputed rotations.
//!
//! All tables are UTF-8, comma separated, with a header row; lines starting
//! with `#` are ignored.

use std::collections::{HashMap, HashSet};

use super::{
    breguet_energy, great_circle_km, AircraftParams, Airport, Flight, FlightSet, Rotation,
    ScheduleError,
};

pub const AIRPORT_HEADER: [&str; 8] =
    ["code", "lat", "lon", "grid_cap_mw", "price_zone", "chargers", "charger_kw", "ev_kwh"];
pub const FLIGHT_HEADER: [&str; 5] = ["id", "origin", "destination", "dep_hhmm", "arr_hhmm"];
pub const ROTATION_HEADER: [&str; 2] = ["aircraft_id", "flight_id"];

/// Time grid and aircraft data needed to turn flight rows into [`Flight`]s.
#[derive(Debug, Clone)]
pub struct FlightTableConfig {
    pub dt_hours: f64,
    pub horizon_steps: usize,
    /// Map flights that cross midnight onto the next day instead of rejecting them.
    pub wrap: bool,
    pub aircraft: AircraftParams,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<(), ScheduleError> {
    let header = rdr
        .headers()
        .map_err(|e| ScheduleError::Parse { line: 1, message: e.to_string() })?;
    let got: Vec<&str> = header.iter().collect();
    if header.is_empty() {
        // empty document: no rows either
        return Ok(());
    }
    if got != expected {
        return Err(ScheduleError::Parse {
            line: 1,
            message: format!("expected header `{}`, found `{}`", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

fn records<'a>(
    rdr: &'a mut csv::Reader<&[u8]>,
    width: usize,
) -> Box<dyn Iterator<Item = Result<(u64, csv::StringRecord), ScheduleError>> + 'a> {
    Box::new(rdr.records().map(move |rec| {
        let rec = rec.map_err(|e| ScheduleError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(ScheduleError::Parse {
                line,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        Ok((line, rec))
    }))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<T, ScheduleError> {
    rec[idx]
        .parse()
        .map_err(|_| ScheduleError::Parse { line, message: format!("invalid {name} `{}`", &rec[idx]) })
}

pub fn parse_airport_table(text: &str) -> Result<Vec<Airport>, ScheduleError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &AIRPORT_HEADER)?;
    let mut airports: Vec<Airport> = Vec::new();
    let mut seen = HashSet::new();
    for row in records(&mut rdr, AIRPORT_HEADER.len()) {
        let (line, rec) = row?;
        let airport = Airport {
            code: rec[0].to_string(),
            lat: field(&rec, 1, "lat", line)?,
            lon: field(&rec, 2, "lon", line)?,
            grid_cap_mw: field(&rec, 3, "grid_cap_mw", line)?,
            price_zone: rec[4].to_string(),
            chargers: field(&rec, 5, "chargers", line)?,
            charger_kw: field(&rec, 6, "charger_kw", line)?,
            ev_kwh: field(&rec, 7, "ev_kwh", line)?,
        };
        airport
            .validate()
            .map_err(|e| ScheduleError::Parse { line, message: e.to_string() })?;
        if !seen.insert(airport.code.clone()) {
            return Err(ScheduleError::Parse { line, message: format!("duplicate airport `{}`", airport.code) });
        }
        airports.push(airport);
    }
    Ok(airports)
}

/// Minutes after midnight for a 24 h `HHMM` string. `2400` is accepted as end of day.
pub fn parse_hhmm(s: &str) -> Option<u32> {
    if s.len() != 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let hh: u32 = s[..2].parse().ok()?;
    let mm: u32 = s[2..].parse().ok()?;
    match (hh, mm) {
        (24, 0) => Some(1440),
        (0..=23, 0..=59) => Some(hh * 60 + mm),
        _ => None,
    }
}

pub fn parse_flight_table(
    text: &str,
    airports: &[Airport],
    config: &FlightTableConfig,
) -> Result<FlightSet, ScheduleError> {
    let by_code: HashMap<&str, usize> =
        airports.iter().enumerate().map(|(i, a)| (a.code.as_str(), i)).collect();
    let step_minutes = config.dt_hours * 60.0;
    let n = config.horizon_steps;

    let mut rdr = reader(text);
    check_header(&mut rdr, &FLIGHT_HEADER)?;
    let mut flights = Vec::new();
    let mut ids = HashSet::new();
    for row in records(&mut rdr, FLIGHT_HEADER.len()) {
        let (line, rec) = row?;
        let id: u32 = field(&rec, 0, "id", line)?;
        if !ids.insert(id) {
            return Err(ScheduleError::Parse { line, message: format!("duplicate flight id {id}") });
        }
        let lookup = |code: &str| {
            by_code
                .get(code)
                .copied()
                .ok_or_else(|| ScheduleError::UnknownAirport { code: code.to_string(), line })
        };
        let origin = lookup(&rec[1])?;
        let destination = lookup(&rec[2])?;
        if origin == destination {
            return Err(ScheduleError::Validation(format!(
                "line {line}: flight {id} departs and arrives at {}",
                &rec[1]
            )));
        }
        let time = |idx: usize, name: &str| {
            parse_hhmm(&rec[idx]).ok_or_else(|| ScheduleError::Parse {
                line,
                message: format!("invalid {name} `{}`", &rec[idx]),
            })
        };
        let dep = time(3, "dep_hhmm")?;
        let mut arr = time(4, "arr_hhmm")?;
        if dep >= 1440 {
            return Err(ScheduleError::Parse { line, message: "departure at 2400".into() });
        }
        if arr <= dep {
            if !config.wrap {
                return Err(ScheduleError::Validation(format!(
                    "line {line}: flight {id} crosses the end of the horizon (enable wrap to fold it)"
                )));
            }
            arr += 1440;
        }

        // departures round down, arrivals round up
        let depart_step = (dep as f64 / step_minutes + 1e-9).floor() as usize;
        let arrive_step = (arr as f64 / step_minutes - 1e-9).ceil() as usize;
        if arrive_step <= depart_step {
            return Err(ScheduleError::Validation(format!(
                "line {line}: flight {id} arrives at step {arrive_step}, not after departure step {depart_step}"
            )));
        }
        if arrive_step > n && arrive_step - n >= depart_step {
            return Err(ScheduleError::Validation(format!(
                "line {line}: wrapped flight {id} overlaps its own departure"
            )));
        }

        let distance = great_circle_km(airports[origin].location(), airports[destination].location());
        let energy_mwh = breguet_energy(distance, &config.aircraft)
            .map_err(|e| ScheduleError::Validation(format!("line {line}: flight {id}: {e}")))?;
        if !(energy_mwh > 0.0) || energy_mwh > config.aircraft.usable_energy_mwh() {
            return Err(ScheduleError::Validation(format!(
                "line {line}: flight {id} needs {energy_mwh:.3} MWh, usable battery is {:.3} MWh",
                config.aircraft.usable_energy_mwh()
            )));
        }
        flights.push(Flight { id, origin, destination, depart_step, arrive_step, energy_mwh });
    }
    Ok(FlightSet::new(flights, n))
}

/// Precomputed rotations as `aircraft_id,flight_id` rows, flights listed in flying order.
pub fn parse_rotation_table(
    text: &str,
    flights: &FlightSet,
) -> Result<Vec<Rotation>, ScheduleError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &ROTATION_HEADER)?;
    let mut order: Vec<usize> = Vec::new();
    let mut grouped: HashMap<usize, Vec<u32>> = HashMap::new();
    let mut used = HashSet::new();
    for row in records(&mut rdr, ROTATION_HEADER.len()) {
        let (line, rec) = row?;
        let aircraft: usize = field(&rec, 0, "aircraft_id", line)?;
        let flight: u32 = field(&rec, 1, "flight_id", line)?;
        if flights.get(flight).is_none() {
            return Err(ScheduleError::Parse { line, message: format!("unknown flight id {flight}") });
        }
        if !used.insert(flight) {
            return Err(ScheduleError::Parse { line, message: format!("flight {flight} assigned twice") });
        }
        grouped
            .entry(aircraft)
            .or_insert_with(|| {
                order.push(aircraft);
                Vec::new()
            })
            .push(flight);
    }
    if let Some(missing) = flights.flights.iter().find(|f| !used.contains(&f.id)) {
        return Err(ScheduleError::Validation(format!("flight {} is not assigned to any aircraft", missing.id)));
    }
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(aircraft_id, key)| {
            let ids = grouped.remove(&key).unwrap_or_default();
            let home = flights.get(ids[0]).map_or(0, |f| f.origin);
            Rotation { aircraft_id, home, flights: ids }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const AIRPORTS: &str = "\
code,lat,lon,grid_cap_mw,price_zone,chargers,charger_kw,ev_kwh
# hub
AMS,52.308,4.764,80,NL,100,44,60
LHR,51.470,-0.454,80,GB,0,44,60
";

    fn config(wrap: bool) -> FlightTableConfig {
        FlightTableConfig { dt_hours: 0.25, horizon_steps: 96, wrap, aircraft: AircraftParams::default() }
    }

    fn airports() -> Vec<Airport> {
        parse_airport_table(AIRPORTS).unwrap()
    }

    #[test]
    fn airports_parse() {
        let a = airports();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].code, "AMS");
        assert_eq!(a[0].chargers, 100);
        assert!(!a[1].has_fleet());
    }

    #[test]
    fn airport_errors_carry_line() {
        let bad = "code,lat,lon,grid_cap_mw,price_zone,chargers,charger_kw,ev_kwh\nAMS,abc,4,80,NL,0,44,60\n";
        match parse_airport_table(bad) {
            Err(ScheduleError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad_cap = "code,lat,lon,grid_cap_mw,price_zone,chargers,charger_kw,ev_kwh\nAMS,52,4,-1,NL,0,44,60\n";
        assert!(parse_airport_table(bad_cap).is_err());
    }

    #[test]
    fn empty_flight_table() {
        let set = parse_flight_table("", &airports(), &config(false)).unwrap();
        assert!(set.is_empty());
        let set = parse_flight_table("id,origin,destination,dep_hhmm,arr_hhmm\n", &airports(), &config(false)).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn snapping() {
        let text = "id,origin,destination,dep_hhmm,arr_hhmm\n1,AMS,LHR,0710,0830\n";
        let set = parse_flight_table(text, &airports(), &config(false)).unwrap();
        let f = &set.flights[0];
        assert_eq!((f.depart_step, f.arrive_step), (28, 34));
        assert_eq!((f.origin, f.destination), (0, 1));
        assert!(f.energy_mwh > 0.0);
    }

    #[test]
    fn flight_errors() {
        let a = airports();
        let dup = "id,origin,destination,dep_hhmm,arr_hhmm\n1,AMS,LHR,0710,0830\n1,LHR,AMS,0900,1000\n";
        assert!(matches!(parse_flight_table(dup, &a, &config(false)), Err(ScheduleError::Parse { line: 3, .. })));

        let unknown = "id,origin,destination,dep_hhmm,arr_hhmm\n1,AMS,CDG,0710,0830\n";
        assert!(matches!(
            parse_flight_table(unknown, &a, &config(false)),
            Err(ScheduleError::UnknownAirport { ref code, line: 2 }) if code == "CDG"
        ));

        let malformed = "id,origin,destination,dep_hhmm,arr_hhmm\n1,AMS,LHR,7:10,0830\n";
        assert!(matches!(parse_flight_table(malformed, &a, &config(false)), Err(ScheduleError::Parse { line: 2, .. })));

        let short = "id,origin,destination,dep_hhmm,arr_hhmm\n1,AMS,LHR,0710\n";
        assert!(matches!(parse_flight_table(short, &a, &config(false)), Err(ScheduleError::Parse { line: 2, .. })));
    }

    #[test]
    fn midnight_crossing() {
        let a = airports();
        let text = "id,origin,destination,dep_hhmm,arr_hhmm\n7,AMS,LHR,2330,0040\n";
        assert!(matches!(parse_flight_table(text, &a, &config(false)), Err(ScheduleError::Validation(_))));
        let set = parse_flight_table(text, &a, &config(true)).unwrap();
        let f = &set.flights[0];
        assert_eq!(f.depart_step, 94);
        assert_eq!(f.arrive_step, 96 + 3);
        assert!(set.wraps(f));
        assert_eq!(set.arrival_in_horizon(f), 3);
    }

    #[test]
    fn hhmm() {
        assert_eq!(parse_hhmm("0000"), Some(0));
        assert_eq!(parse_hhmm("2359"), Some(1439));
        assert_eq!(parse_hhmm("2400"), Some(1440));
        assert_eq!(parse_hhmm("2401"), None);
        assert_eq!(parse_hhmm("1260"), None);
        assert_eq!(parse_hhmm("710"), None);
    }

    #[test]
    fn rotations_table() {
        let a = airports();
        let text = "id,origin,destination,dep_hhmm,arr_hhmm\n1,AMS,LHR,0710,0830\n2,LHR,AMS,1000,1120\n";
        let set = parse_flight_table(text, &a, &config(false)).unwrap();
        let rot = parse_rotation_table("aircraft_id,flight_id\n5,1\n5,2\n", &set).unwrap();
        assert_eq!(rot, vec![Rotation { aircraft_id: 0, home: 0, flights: vec![1, 2] }]);
        assert!(parse_rotation_table("aircraft_id,flight_id\n5,1\n", &set).is_err());
        assert!(parse_rotation_table("aircraft_id,flight_id\n5,1\n6,1\n6,2\n", &set).is_err());
    }
}
