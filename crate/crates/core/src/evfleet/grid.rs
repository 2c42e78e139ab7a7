use log::warn;

use super::FleetError;

/// Preferred number of SoC buckets; resolves the 0.5 / 0.67 thresholds at 0.1 granularity.
pub const PREFERRED_BUCKETS: usize = 10;

/// Uniform SoC discretisation for one parked fleet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocGrid {
    pub buckets: usize,
    /// Fraction of a battery (dis)charged per hour, `P_ch / E_EV`.
    pub rate_per_hour: f64,
    pub dt_hours: f64,
}

impl SocGrid {
    pub fn new(buckets: usize, rate_per_hour: f64, dt_hours: f64) -> Self {
        Self { buckets, rate_per_hour, dt_hours }
    }

    pub fn delta_xi(&self) -> f64 {
        1.0 / self.buckets as f64
    }

    /// Courant number `ν = p·Δt/Δξ`.
    pub fn courant(&self) -> f64 {
        self.rate_per_hour * self.dt_hours / self.delta_xi()
    }

    /// Lower SoC edge of zero-based bucket `b`.
    pub fn lower_edge(&self, b: usize) -> f64 {
        b as f64 * self.delta_xi()
    }

    pub fn upper_edge(&self, b: usize) -> f64 {
        (b + 1) as f64 * self.delta_xi()
    }
}

/// Checks the upwind stability condition `0 < ν ≤ 1` and returns `ν`.
pub fn validate_cfl(grid: &SocGrid) -> Result<f64, FleetError> {
    if grid.buckets < 2 {
        return Err(FleetError::Parameter(format!("need at least 2 SoC buckets, got {}", grid.buckets)));
    }
    if !(grid.rate_per_hour > 0.0) || !(grid.dt_hours > 0.0) {
        return Err(FleetError::Parameter(format!(
            "charging rate ({}/h) and time step ({} h) must be positive",
            grid.rate_per_hour, grid.dt_hours
        )));
    }
    let nu = grid.courant();
    // a hair of slack so that exactly-one-bucket-per-step grids pass despite rounding
    if nu > 1.0 + 1e-12 {
        return Err(FleetError::Stability {
            nu,
            rate_per_hour: grid.rate_per_hour,
            dt_hours: grid.dt_hours,
            delta_xi: grid.delta_xi(),
        });
    }
    Ok(nu)
}

/// Bucket count for a fleet when none is configured: [`PREFERRED_BUCKETS`] if
/// stable, otherwise the finest grid with `ν ≤ 1`.
pub fn auto_buckets(rate_per_hour: f64, dt_hours: f64) -> Result<usize, FleetError> {
    let per_step = rate_per_hour * dt_hours;
    if per_step * PREFERRED_BUCKETS as f64 <= 1.0 + 1e-12 {
        return Ok(PREFERRED_BUCKETS);
    }
    let buckets = (1.0 / per_step + 1e-12).floor() as usize;
    if buckets < 2 {
        return Err(FleetError::Parameter(format!(
            "a vehicle moves {per_step:.3} of its capacity per step; no stable SoC grid with 2+ buckets"
        )));
    }
    warn!(
        "coarsening SoC grid to {buckets} buckets (Δξ = {:.4}) to keep p·Δt/Δξ ≤ 1",
        1.0 / buckets as f64
    );
    Ok(buckets)
}
