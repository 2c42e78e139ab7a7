//! Dense column numbering for every decision and state variable.
//!
//! Columns are laid out as all aircraft blocks, then all airport power
//! blocks, then one fleet block per airport with chargers:
//!
//! - aircraft `p`: `E_b[0..=N]`, `P_b[0..N]`
//! - airport `h`: `P_gr[0..N]`, `P_a[0..N]`, `P_c[0..N]`
//! - fleet at `h`: `x_c`, `x_i`, `x_d` over buckets × `0..=N`, then
//!   `u_c`, `u_d`, `v_out` over buckets × `0..N`

use std::fmt;

use thiserror::Error;

use crate::schedule::AirportIdx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Eb { aircraft: usize, k: usize },
    Pb { aircraft: usize, k: usize },
    Pgr { airport: AirportIdx, k: usize },
    Pa { airport: AirportIdx, k: usize },
    Pc { airport: AirportIdx, k: usize },
    Xc { airport: AirportIdx, bucket: usize, k: usize },
    Xi { airport: AirportIdx, bucket: usize, k: usize },
    Xd { airport: AirportIdx, bucket: usize, k: usize },
    Uc { airport: AirportIdx, bucket: usize, k: usize },
    Ud { airport: AirportIdx, bucket: usize, k: usize },
    Vout { airport: AirportIdx, bucket: usize, k: usize },
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use VarKind::*;
        match *self {
            Eb { aircraft, k } => write!(f, "Eb_p{aircraft}_k{k}"),
            Pb { aircraft, k } => write!(f, "Pb_p{aircraft}_k{k}"),
            Pgr { airport, k } => write!(f, "Pgr_h{airport}_k{k}"),
            Pa { airport, k } => write!(f, "Pa_h{airport}_k{k}"),
            Pc { airport, k } => write!(f, "Pc_h{airport}_k{k}"),
            Xc { airport, bucket, k } => write!(f, "Xc_h{airport}_b{bucket}_k{k}"),
            Xi { airport, bucket, k } => write!(f, "Xi_h{airport}_b{bucket}_k{k}"),
            Xd { airport, bucket, k } => write!(f, "Xd_h{airport}_b{bucket}_k{k}"),
            Uc { airport, bucket, k } => write!(f, "Uc_h{airport}_b{bucket}_k{k}"),
            Ud { airport, bucket, k } => write!(f, "Ud_h{airport}_b{bucket}_k{k}"),
            Vout { airport, bucket, k } => write!(f, "Vout_h{airport}_b{bucket}_k{k}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("variable {kind:?} out of range")]
pub struct IndexError {
    pub kind: VarKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarIndex {
    aircraft: usize,
    airports: usize,
    steps: usize,
    buckets: usize,
    fleet_airports: Vec<AirportIdx>,
    fleet_slot: Vec<Option<usize>>,
}

impl VarIndex {
    /// `fleet_airports` lists airports with a parked fleet; each gets a block.
    pub fn new(aircraft: usize, airports: usize, steps: usize, buckets: usize, fleet_airports: &[AirportIdx]) -> Self {
        let mut sorted = fleet_airports.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut fleet_slot = vec![None; airports];
        for (slot, &h) in sorted.iter().enumerate() {
            fleet_slot[h] = Some(slot);
        }
        Self { aircraft, airports, steps, buckets, fleet_airports: sorted, fleet_slot }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn aircraft(&self) -> usize {
        self.aircraft
    }

    pub fn airports(&self) -> usize {
        self.airports
    }

    pub fn fleet_airports(&self) -> &[AirportIdx] {
        &self.fleet_airports
    }

    pub fn has_fleet(&self, airport: AirportIdx) -> bool {
        self.fleet_slot.get(airport).copied().flatten().is_some()
    }

    fn aircraft_block(&self) -> usize {
        2 * self.steps + 1
    }

    fn airport_block(&self) -> usize {
        3 * self.steps
    }

    fn state_span(&self) -> usize {
        self.buckets * (self.steps + 1)
    }

    fn control_span(&self) -> usize {
        self.buckets * self.steps
    }

    fn fleet_block(&self) -> usize {
        3 * self.state_span() + 3 * self.control_span()
    }

    fn airports_start(&self) -> usize {
        self.aircraft * self.aircraft_block()
    }

    fn fleets_start(&self) -> usize {
        self.airports_start() + self.airports * self.airport_block()
    }

    /// Total column count.
    pub fn columns(&self) -> usize {
        self.fleets_start() + self.fleet_airports.len() * self.fleet_block()
    }

    pub fn column(&self, kind: VarKind) -> Result<usize, IndexError> {
        use VarKind::*;
        let err = || IndexError { kind };
        let n = self.steps;
        let aircraft_ok = |p: usize, k: usize, last: usize| p < self.aircraft && k <= last;
        let airport_ok = |h: usize, k: usize| h < self.airports && k < n;
        let fleet_base = |h: usize, b: usize| -> Result<usize, IndexError> {
            let slot = self.fleet_slot.get(h).copied().flatten().ok_or_else(err)?;
            if b >= self.buckets {
                return Err(err());
            }
            Ok(self.fleets_start() + slot * self.fleet_block())
        };
        let col = match kind {
            Eb { aircraft, k } if aircraft_ok(aircraft, k, n) => aircraft * self.aircraft_block() + k,
            Pb { aircraft, k } if n > 0 && aircraft_ok(aircraft, k, n - 1) => {
                aircraft * self.aircraft_block() + n + 1 + k
            }
            Pgr { airport, k } if airport_ok(airport, k) => self.airports_start() + airport * self.airport_block() + k,
            Pa { airport, k } if airport_ok(airport, k) => {
                self.airports_start() + airport * self.airport_block() + n + k
            }
            Pc { airport, k } if airport_ok(airport, k) => {
                self.airports_start() + airport * self.airport_block() + 2 * n + k
            }
            Xc { airport, bucket, k } | Xi { airport, bucket, k } | Xd { airport, bucket, k } => {
                if k > n {
                    return Err(err());
                }
                let which = match kind {
                    Xc { .. } => 0,
                    Xi { .. } => 1,
                    _ => 2,
                };
                fleet_base(airport, bucket)? + which * self.state_span() + bucket * (n + 1) + k
            }
            Uc { airport, bucket, k } | Ud { airport, bucket, k } | Vout { airport, bucket, k } => {
                if k >= n {
                    return Err(err());
                }
                let which = match kind {
                    Uc { .. } => 0,
                    Ud { .. } => 1,
                    _ => 2,
                };
                fleet_base(airport, bucket)? + 3 * self.state_span() + which * self.control_span() + bucket * n + k
            }
            _ => return Err(err()),
        };
        Ok(col)
    }

    /// Column lookup for indices the builder itself generated.
    pub(crate) fn col(&self, kind: VarKind) -> usize {
        self.column(kind).expect("builder produced an out-of-range variable")
    }

    /// Inverse of [`VarIndex::column`].
    pub fn kind(&self, column: usize) -> Option<VarKind> {
        use VarKind::*;
        let n = self.steps;
        if column < self.airports_start() {
            let (p, off) = (column / self.aircraft_block(), column % self.aircraft_block());
            return Some(if off <= n { Eb { aircraft: p, k: off } } else { Pb { aircraft: p, k: off - n - 1 } });
        }
        if column < self.fleets_start() {
            let rel = column - self.airports_start();
            let (h, off) = (rel / self.airport_block(), rel % self.airport_block());
            return Some(match off / n {
                0 => Pgr { airport: h, k: off },
                1 => Pa { airport: h, k: off - n },
                _ => Pc { airport: h, k: off - 2 * n },
            });
        }
        if column >= self.columns() {
            return None;
        }
        let rel = column - self.fleets_start();
        let airport = self.fleet_airports[rel / self.fleet_block()];
        let off = rel % self.fleet_block();
        let states = 3 * self.state_span();
        if off < states {
            let (which, r) = (off / self.state_span(), off % self.state_span());
            let (bucket, k) = (r / (n + 1), r % (n + 1));
            Some(match which {
                0 => Xc { airport, bucket, k },
                1 => Xi { airport, bucket, k },
                _ => Xd { airport, bucket, k },
            })
        } else {
            let off = off - states;
            let (which, r) = (off / self.control_span(), off % self.control_span());
            let (bucket, k) = (r / n, r % n);
            Some(match which {
                0 => Uc { airport, bucket, k },
                1 => Ud { airport, bucket, k },
                _ => Vout { airport, bucket, k },
            })
        }
    }

    pub fn name(&self, column: usize) -> String {
        self.kind(column).map_or_else(|| format!("C{column}"), |k| k.to_string())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;

    /// Every variable the model may contain, listed straight from the layout description.
    fn enumerate(idx: &VarIndex, aircraft: usize, airports: usize, n: usize, nb: usize, fleets: &[usize]) -> Vec<VarKind> {
        use VarKind::*;
        let mut all = Vec::new();
        for p in 0..aircraft {
            all.extend((0..=n).map(|k| Eb { aircraft: p, k }));
            all.extend((0..n).map(|k| Pb { aircraft: p, k }));
        }
        for h in 0..airports {
            all.extend((0..n).map(|k| Pgr { airport: h, k }));
            all.extend((0..n).map(|k| Pa { airport: h, k }));
            all.extend((0..n).map(|k| Pc { airport: h, k }));
        }
        let _ = idx;
        for &h in fleets {
            for b in 0..nb {
                for k in 0..=n {
                    all.extend([Xc { airport: h, bucket: b, k }, Xi { airport: h, bucket: b, k }, Xd { airport: h, bucket: b, k }]);
                }
                for k in 0..n {
                    all.extend([Uc { airport: h, bucket: b, k }, Ud { airport: h, bucket: b, k }, Vout { airport: h, bucket: b, k }]);
                }
            }
        }
        all
    }

    #[test]
    fn origin_of_ordering() {
        let idx = VarIndex::new(1, 1, 4, 3, &[]);
        assert_eq!(idx.column(VarKind::Eb { aircraft: 0, k: 0 }).unwrap(), 0);
        assert_eq!(idx.columns(), 9 + 12);
    }

    #[test]
    fn toy_count_matches_enumeration() {
        // 2 airports, 1 aircraft, N = 24, 4 buckets, fleet at airport 0
        let idx = VarIndex::new(1, 2, 24, 4, &[0]);
        let closed_form = (2 * 24 + 1) + 2 * 3 * 24 + 3 * 4 * 25 + 3 * 4 * 24;
        assert_eq!(idx.columns(), closed_form);
        assert_eq!(enumerate(&idx, 1, 2, 24, 4, &[0]).len(), closed_form);
    }

    #[test]
    fn out_of_range() {
        let idx = VarIndex::new(2, 3, 5, 4, &[1]);
        assert!(idx.column(VarKind::Eb { aircraft: 2, k: 0 }).is_err());
        assert!(idx.column(VarKind::Pb { aircraft: 0, k: 5 }).is_err());
        assert!(idx.column(VarKind::Eb { aircraft: 0, k: 5 }).is_ok());
        assert!(idx.column(VarKind::Xc { airport: 0, bucket: 0, k: 0 }).is_err());
        assert!(idx.column(VarKind::Xc { airport: 1, bucket: 4, k: 0 }).is_err());
        assert!(idx.column(VarKind::Uc { airport: 1, bucket: 0, k: 5 }).is_err());
        assert!(idx.column(VarKind::Pgr { airport: 3, k: 0 }).is_err());
        assert_eq!(idx.kind(idx.columns()), None);
    }

    proptest! {
        #[test]
        fn bijection(aircraft in 0usize..4, airports in 1usize..4, n in 1usize..7, nb in 2usize..5, mask in 0u8..8) {
            let fleets: Vec<usize> = (0..airports).filter(|h| mask & (1 << h) != 0).collect();
            let idx = VarIndex::new(aircraft, airports, n, nb, &fleets);
            let all = enumerate(&idx, aircraft, airports, n, nb, &fleets);
            prop_assert_eq!(all.len(), idx.columns());
            let mut cols = HashSet::new();
            for kind in all {
                let c = idx.column(kind).unwrap();
                prop_assert!(c < idx.columns());
                prop_assert!(cols.insert(c));
                prop_assert_eq!(idx.kind(c), Some(kind));
            }
        }
    }
}
