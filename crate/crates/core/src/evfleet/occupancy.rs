//! Synthetic parking-garage occupancy and departure SoC requirements.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{FleetError, SocGrid};

/// Exogenous flows of one parked fleet, indexed `[step][bucket]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyStream {
    pub arrivals: Vec<Vec<f64>>,
    pub departures_total: Vec<f64>,
    /// `v_out_ref[k][b]`: vehicles leaving at `k` that need at least bucket `b`.
    pub v_out_ref: Vec<Vec<f64>>,
    /// Idle vehicles per bucket at step 0.
    pub initial_idle: Vec<f64>,
}

impl OccupancyStream {
    pub fn empty(buckets: usize, steps: usize) -> Self {
        Self {
            arrivals: vec![vec![0.0; buckets]; steps],
            departures_total: vec![0.0; steps],
            v_out_ref: vec![vec![0.0; buckets]; steps],
            initial_idle: vec![0.0; buckets],
        }
    }

    pub fn steps(&self) -> usize {
        self.departures_total.len()
    }

    pub fn buckets(&self) -> usize {
        self.initial_idle.len()
    }

    /// Parked population after each step, starting with the initial population.
    pub fn population(&self) -> Vec<f64> {
        let mut pop = Vec::with_capacity(self.steps() + 1);
        pop.push(self.initial_idle.iter().sum::<f64>());
        for k in 0..self.steps() {
            let next = pop[k] + self.arrivals[k].iter().sum::<f64>() - self.departures_total[k];
            pop.push(next);
        }
        pop
    }

    /// `step,bucket,v_in,v_out_ref` with one-based buckets.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,bucket,v_in,v_out_ref\n");
        for k in 0..self.steps() {
            for b in 0..self.buckets() {
                let _ = writeln!(out, "{k},{},{},{}", b + 1, self.arrivals[k][b], self.v_out_ref[k][b]);
            }
        }
        out
    }
}

/// Hourly occupancy profile of a parking garage.
///
/// With `relative = true` the counts are fractions of the airport's charger
/// count, so a charger sweep scales the participating population.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OccupancyProfile {
    pub seed: u64,
    pub arrival_max_soc: f64,
    pub departure_min_soc: f64,
    pub initial_occupancy: f64,
    pub arrivals: Vec<f64>,
    pub departures: Vec<f64>,
    pub relative: bool,
    /// Battery round-trip leg efficiency `η`.
    pub charging_efficiency: f64,
}

impl Default for OccupancyProfile {
    /// Travellers park in the morning and return in the evening; the garage
    /// ends the day as full as it started.
    fn default() -> Self {
        let mut arrivals = vec![0.0; 24];
        let mut departures = vec![0.0; 24];
        for (h, share) in [(5, 0.04), (6, 0.06), (7, 0.06), (8, 0.05), (9, 0.04), (10, 0.03), (11, 0.02)] {
            arrivals[h] = share;
        }
        for (h, share) in [(14, 0.03), (15, 0.04), (16, 0.05), (17, 0.06), (18, 0.05), (19, 0.04), (20, 0.03)] {
            departures[h] = share;
        }
        Self {
            seed: 1,
            arrival_max_soc: 0.5,
            departure_min_soc: 0.67,
            initial_occupancy: 0.6,
            arrivals,
            departures,
            relative: true,
            charging_efficiency: 0.95,
        }
    }
}

impl OccupancyProfile {
    pub fn empty() -> Self {
        Self { initial_occupancy: 0.0, arrivals: vec![0.0; 24], departures: vec![0.0; 24], ..Self::default() }
    }
}

/// One-based bucket a required SoC maps to: the bucket whose upper edge first reaches it.
pub fn requirement_bucket(required_soc: f64, buckets: usize) -> usize {
    let raw = (required_soc * buckets as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(buckets)
}

/// Cumulative departure requirements from per-vehicle minimum SoCs.
///
/// `v_out_ref[k][b]` counts vehicles leaving at `k` whose requirement exceeds
/// the lower edge of (zero-based) bucket `b`; the result is non-increasing in
/// `b` and its first entry is the step's departure count.
pub fn build_vout_ref(requirements: &[Vec<f64>], buckets: usize) -> Vec<Vec<f64>> {
    requirements
        .iter()
        .map(|step| {
            let mut hist = vec![0.0; buckets];
            for &r in step {
                hist[requirement_bucket(r, buckets) - 1] += 1.0;
            }
            let mut cumulative = vec![0.0; buckets];
            let mut acc = 0.0;
            for b in (0..buckets).rev() {
                acc += hist[b];
                cumulative[b] = acc;
            }
            cumulative
        })
        .collect()
}

fn spread(count: u64, parts: usize) -> impl Iterator<Item = u64> {
    let base = count / parts as u64;
    let extra = (count % parts as u64) as usize;
    (0..parts).map(move |i| base + u64::from(i < extra))
}

/// Draws a deterministic occupancy stream for one airport.
///
/// Arriving vehicles get a uniformly random bucket among those whose upper
/// edge does not exceed `arrival_max_soc`; each departing vehicle a uniformly
/// random requirement in `(departure_min_soc, 1]`. Initial vehicles are idle
/// with a uniformly random bucket.
pub fn synthesize_occupancy(
    profile: &OccupancyProfile,
    seed: u64,
    grid: &SocGrid,
    steps: usize,
    chargers: u32,
) -> Result<OccupancyStream, FleetError> {
    let nb = grid.buckets;
    let steps_per_hour = (1.0 / grid.dt_hours).round() as usize;
    if steps_per_hour == 0 || (steps_per_hour as f64 * grid.dt_hours - 1.0).abs() > 1e-9 {
        return Err(FleetError::Generation(format!("time step {} h does not divide an hour", grid.dt_hours)));
    }
    if profile.arrivals.len() != 24 || profile.departures.len() != 24 {
        return Err(FleetError::Generation("profile needs 24 hourly arrival and departure values".into()));
    }
    let arrival_buckets = (profile.arrival_max_soc / grid.delta_xi() + 1e-9).floor() as usize;
    if arrival_buckets == 0 {
        return Err(FleetError::Generation(format!(
            "no bucket lies entirely below arrival SoC {}",
            profile.arrival_max_soc
        )));
    }
    if !(0.0..1.0).contains(&profile.departure_min_soc) {
        return Err(FleetError::Generation("departure SoC threshold must lie in [0, 1)".into()));
    }

    let scale = if profile.relative { f64::from(chargers) } else { 1.0 };
    let count = |x: f64| -> Result<u64, FleetError> {
        if !(x >= 0.0) {
            return Err(FleetError::Generation(format!("negative occupancy value {x}")));
        }
        Ok((x * scale).round() as u64)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stream = OccupancyStream::empty(nb, steps);
    for _ in 0..count(profile.initial_occupancy)? {
        stream.initial_idle[rng.gen_range(0..nb)] += 1.0;
    }

    let mut requirements = vec![Vec::new(); steps];
    let hours = steps.div_ceil(steps_per_hour);
    for hour in 0..hours.min(24) {
        let base = hour * steps_per_hour;
        let span = steps_per_hour.min(steps - base);
        let arrivals = spread(count(profile.arrivals[hour])?, span);
        let departures = spread(count(profile.departures[hour])?, span);
        for (i, (n_in, n_out)) in arrivals.zip(departures).enumerate() {
            let k = base + i;
            for _ in 0..n_in {
                stream.arrivals[k][rng.gen_range(0..arrival_buckets)] += 1.0;
            }
            for _ in 0..n_out {
                let u: f64 = rng.gen();
                requirements[k].push(1.0 - u * (1.0 - profile.departure_min_soc));
            }
            stream.departures_total[k] = n_out as f64;
        }
    }
    stream.v_out_ref = build_vout_ref(&requirements, nb);

    for (k, pop) in stream.population().into_iter().enumerate() {
        if pop < 0.0 {
            return Err(FleetError::Generation(format!(
                "departures exceed the parked population by step {k}"
            )));
        }
        if pop > f64::from(chargers) {
            return Err(FleetError::Generation(format!(
                "{pop} parked vehicles at step {k} exceed {chargers} chargers"
            )));
        }
    }
    Ok(stream)
}
