//! Minimum-fleet assignment as a minimum path cover of the flight connection DAG.
//!
//! Flight `j` may precede flight `i` on the same aircraft when it lands where
//! `i` departs and at least the turnaround time before `i` leaves. The path
//! cover size equals `|flights| - |maximum matching|` in the bipartite split
//! of that graph; the matching is found with augmenting paths.

use super::{Flight, FlightSet, Rotation};

pub fn connection_allowed(from: &Flight, to: &Flight, turnaround_steps: usize) -> bool {
    from.destination == to.origin && from.arrive_step + turnaround_steps <= to.depart_step
}

struct Matcher<'a> {
    successors: &'a [Vec<usize>],
    matched_pred: Vec<Option<usize>>,
    visited: Vec<bool>,
}

impl Matcher<'_> {
    fn augment(&mut self, left: usize) -> bool {
        for &right in &self.successors[left] {
            if self.visited[right] {
                continue;
            }
            self.visited[right] = true;
            let free = match self.matched_pred[right] {
                None => true,
                Some(other) => self.augment(other),
            };
            if free {
                self.matched_pred[right] = Some(left);
                return true;
            }
        }
        false
    }
}

/// Covers every flight with the fewest aircraft rotations.
///
/// Flights are processed in `(depart_step, id)` order and successors are tried
/// in `(arrive_step, id)` order, which makes the result reproducible.
/// Rotations are numbered by their first flight in the same order.
pub fn assign_fleet(flights: &FlightSet, turnaround_steps: usize) -> Vec<Rotation> {
    let mut order: Vec<&Flight> = flights.flights.iter().collect();
    order.sort_by_key(|f| (f.depart_step, f.id));
    let count = order.len();

    let successors: Vec<Vec<usize>> = order
        .iter()
        .map(|from| {
            let mut next: Vec<usize> = (0..count)
                .filter(|&i| connection_allowed(from, order[i], turnaround_steps))
                .collect();
            next.sort_by_key(|&i| (order[i].arrive_step, order[i].id));
            next
        })
        .collect();

    let mut matcher =
        Matcher { successors: &successors, matched_pred: vec![None; count], visited: vec![false; count] };
    for left in 0..count {
        matcher.visited.iter_mut().for_each(|v| *v = false);
        matcher.augment(left);
    }

    let mut next: Vec<Option<usize>> = vec![None; count];
    for (right, pred) in matcher.matched_pred.iter().enumerate() {
        if let Some(left) = pred {
            next[*left] = Some(right);
        }
    }

    let mut chains: Vec<Vec<usize>> = Vec::new();
    for head in (0..count).filter(|&i| matcher.matched_pred[i].is_none()) {
        let mut chain = vec![head];
        let mut cur = head;
        while let Some(n) = next[cur] {
            chain.push(n);
            cur = n;
        }
        chains.push(chain);
    }

    // A flight folded past midnight lands before the chain's first departure
    // the same day; if that clashes with the head, fly it on its own aircraft.
    let horizon = flights.horizon_steps;
    let mut split_off = Vec::new();
    for chain in chains.iter_mut() {
        let last = order[*chain.last().unwrap()];
        if chain.len() > 1 && last.arrive_step > horizon {
            let head = order[chain[0]];
            if last.arrive_step - horizon + turnaround_steps > head.depart_step {
                split_off.push(chain.pop().unwrap());
            }
        }
    }
    chains.extend(split_off.into_iter().map(|i| vec![i]));
    chains.sort_by_key(|c| (order[c[0]].depart_step, order[c[0]].id));

    chains
        .into_iter()
        .enumerate()
        .map(|(aircraft_id, chain)| Rotation {
            aircraft_id,
            home: order[chain[0]].origin,
            flights: chain.iter().map(|&i| order[i].id).collect(),
        })
        .collect()
}
