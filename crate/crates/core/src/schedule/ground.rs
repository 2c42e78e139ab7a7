//! Where each aircraft is parked at each time step.

use super::{connection_allowed, AirportIdx, FlightSet, Rotation, ScheduleError};

/// Apron presence `g[p][h][k]`, stored as the single airport (if any) per aircraft and step.
///
/// Storing one location per `(aircraft, step)` makes `Σ_h g ≤ 1` hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundIndicator {
    steps: usize,
    locations: Vec<Vec<Option<AirportIdx>>>,
}

impl GroundIndicator {
    pub fn aircraft(&self) -> usize {
        self.locations.len()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Airport the aircraft is parked at during step `k`, `None` while airborne.
    pub fn location(&self, aircraft: usize, k: usize) -> Option<AirportIdx> {
        self.locations[aircraft][k]
    }

    pub fn on_ground(&self, aircraft: usize, airport: AirportIdx, k: usize) -> bool {
        self.locations[aircraft][k] == Some(airport)
    }

    /// Aircraft parked at `airport` during step `k`.
    pub fn parked_at(&self, airport: AirportIdx, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.locations.len()).filter(move |&p| self.locations[p][k] == Some(airport))
    }
}

/// Derives apron presence from rotations.
///
/// An aircraft waits at its first origin until the first departure, sits at
/// each destination from arrival until the next departure, and stays at the
/// last destination until the end of the horizon. A flight folded past
/// midnight keeps the aircraft airborne from step 0 until its folded arrival.
pub fn ground_indicator(
    rotations: &[Rotation],
    flights: &FlightSet,
    airports: usize,
    turnaround_steps: usize,
) -> Result<GroundIndicator, ScheduleError> {
    let n = flights.horizon_steps;
    let mut locations = Vec::with_capacity(rotations.len());
    for rotation in rotations {
        let legs = rotation
            .flights
            .iter()
            .map(|id| {
                flights.get(*id).ok_or_else(|| {
                    ScheduleError::Validation(format!(
                        "aircraft {}: unknown flight {id}",
                        rotation.aircraft_id
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if rotation.home >= airports {
            return Err(ScheduleError::Validation(format!(
                "aircraft {}: home airport index {} out of range",
                rotation.aircraft_id, rotation.home
            )));
        }
        for pair in legs.windows(2) {
            if pair[0].arrive_step > n || !connection_allowed(pair[0], pair[1], turnaround_steps) {
                return Err(ScheduleError::Validation(format!(
                    "aircraft {}: flight {} cannot be followed by flight {}",
                    rotation.aircraft_id, pair[0].id, pair[1].id
                )));
            }
        }

        let mut row = vec![Some(rotation.home); n];
        if let Some(first) = legs.first() {
            row.iter_mut().for_each(|g| *g = Some(first.origin));
            for (i, leg) in legs.iter().enumerate() {
                let until = legs.get(i + 1).map_or(n, |next| next.depart_step);
                for g in &mut row[leg.depart_step..leg.arrive_step.min(n)] {
                    *g = None;
                }
                if leg.arrive_step < until {
                    for g in &mut row[leg.arrive_step..until] {
                        *g = Some(leg.destination);
                    }
                }
            }
            let last = legs.last().unwrap();
            if last.arrive_step > n {
                let landed = last.arrive_step - n;
                if landed + turnaround_steps > first.depart_step && legs.len() > 1
                    || landed > first.depart_step
                {
                    return Err(ScheduleError::Validation(format!(
                        "aircraft {}: overnight flight {} lands after the day's first departure",
                        rotation.aircraft_id, last.id
                    )));
                }
                for g in &mut row[..landed] {
                    *g = None;
                }
            }
        }
        locations.push(row);
    }
    Ok(GroundIndicator { steps: n, locations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{assign_fleet, Flight};

    fn flight(id: u32, origin: usize, destination: usize, dep: usize, arr: usize) -> Flight {
        Flight { id, origin, destination, depart_step: dep, arrive_step: arr, energy_mwh: 1.0 }
    }

    #[test]
    fn idle_aircraft_stays_home() {
        let set = FlightSet::new(vec![], 8);
        let rot = vec![Rotation { aircraft_id: 0, home: 1, flights: vec![] }];
        let g = ground_indicator(&rot, &set, 2, 3).unwrap();
        assert!((0..8).all(|k| g.on_ground(0, 1, k) && !g.on_ground(0, 0, k)));
    }

    #[test]
    fn single_flight() {
        let set = FlightSet::new(vec![flight(1, 0, 1, 28, 34)], 96);
        let rot = assign_fleet(&set, 3);
        let g = ground_indicator(&rot, &set, 2, 3).unwrap();
        for k in 0..96 {
            let expected = match k {
                _ if k < 28 => Some(0),
                _ if k < 34 => None,
                _ => Some(1),
            };
            assert_eq!(g.location(0, k), expected, "k = {k}");
        }
        assert_eq!(g.parked_at(1, 40).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn flight_boundaries_consistent() {
        let set = FlightSet::new(
            vec![flight(1, 0, 1, 10, 16), flight(2, 1, 0, 20, 26), flight(3, 0, 2, 40, 44)],
            96,
        );
        let rot = assign_fleet(&set, 3);
        let g = ground_indicator(&rot, &set, 3, 3).unwrap();
        for r in &rot {
            for id in &r.flights {
                let f = set.get(*id).unwrap();
                assert!(g.on_ground(r.aircraft_id, f.origin, f.depart_step - 1));
                assert!(g.on_ground(r.aircraft_id, f.destination, f.arrive_step));
            }
        }
    }

    #[test]
    fn rejects_bad_rotation() {
        let set = FlightSet::new(vec![flight(1, 0, 1, 10, 16), flight(2, 1, 0, 17, 26)], 96);
        let rot = vec![Rotation { aircraft_id: 0, home: 0, flights: vec![1, 2] }];
        assert!(ground_indicator(&rot, &set, 2, 3).is_err());
        let rot = vec![Rotation { aircraft_id: 0, home: 0, flights: vec![2, 1] }];
        assert!(ground_indicator(&rot, &set, 2, 0).is_err());
    }

    #[test]
    fn wrapped_flight_airborne_at_start() {
        let set = FlightSet::new(vec![flight(1, 0, 1, 20, 30), flight(2, 1, 0, 90, 96 + 5)], 96);
        let rot = assign_fleet(&set, 3);
        let g = ground_indicator(&rot, &set, 2, 3).unwrap();
        assert!((0..5).all(|k| g.location(0, k).is_none()));
        assert_eq!(g.location(0, 5), Some(0));
        assert!((90..96).all(|k| g.location(0, k).is_none()));
    }
}
