//! Cruise energy of battery-electric flights from the electric Breguet range relation.

use super::{AircraftParams, ScheduleError};

/// Standard gravity [m/s²].
pub const G0: f64 = 9.81;

const JOULES_PER_MWH: f64 = 3.6e9;

/// Energy [MWh] drawn from the battery to cruise `distance_km`.
///
/// `E = m·g0·d / (η_tot · L/D)`. Distances beyond `params.range_cap_km` are rejected.
pub fn breguet_energy(distance_km: f64, params: &AircraftParams) -> Result<f64, ScheduleError> {
    if !(distance_km >= 0.0) {
        return Err(ScheduleError::Validation(format!(
            "flight distance must be nonnegative, got {distance_km}"
        )));
    }
    if distance_km > params.range_cap_km {
        return Err(ScheduleError::Validation(format!(
            "flight distance {distance_km:.1} km exceeds range cap {} km",
            params.range_cap_km
        )));
    }
    let joules = params.mass_kg * G0 * distance_km * 1000.0
        / (params.powertrain_efficiency * params.lift_to_drag);
    Ok(joules / JOULES_PER_MWH)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_aircraft() -> AircraftParams {
        AircraftParams::default()
    }

    #[test]
    fn zero_distance() {
        assert_eq!(breguet_energy(0.0, &reference_aircraft()).unwrap(), 0.0);
    }

    #[test]
    fn full_range_flight() {
        // 78000·9.81·800000 / (0.90·23) / 3.6e9
        let expected = 78000.0 * 9.81 * 800_000.0 / (0.90 * 23.0) / 3.6e9;
        let e = breguet_energy(800.0, &reference_aircraft()).unwrap();
        assert!((e - expected).abs() < 1e-12);
        assert!((e - 8.214).abs() < 1e-3, "{e}");
    }

    #[test]
    fn range_cap() {
        assert!(breguet_energy(800.1, &reference_aircraft()).is_err());
        assert!(breguet_energy(-1.0, &reference_aircraft()).is_err());
    }

    #[test]
    fn homogeneity() {
        let base = reference_aircraft();
        let e = breguet_energy(300.0, &base).unwrap();
        assert!((breguet_energy(600.0, &base).unwrap() - 2.0 * e).abs() < 1e-12);

        let heavy = AircraftParams { mass_kg: base.mass_kg * 1.5, ..base.clone() };
        assert!((breguet_energy(300.0, &heavy).unwrap() - 1.5 * e).abs() < 1e-12);

        let sleek = AircraftParams { lift_to_drag: base.lift_to_drag * 2.0, ..base.clone() };
        assert!((breguet_energy(300.0, &sleek).unwrap() - e / 2.0).abs() < 1e-12);

        let lossy = AircraftParams { powertrain_efficiency: 0.45, ..base };
        assert!((breguet_energy(300.0, &lossy).unwrap() - 2.0 * e).abs() < 1e-12);
    }
}
