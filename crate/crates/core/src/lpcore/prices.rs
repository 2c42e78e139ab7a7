use std::collections::BTreeMap;

/// Hourly wholesale prices per zone, held constant across the sub-steps of each hour.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dt_hours: f64,
    hourly: BTreeMap<String, Vec<f64>>,
}

impl PriceSeries {
    /// `hourly` maps each zone to exactly 24 finite prices.
    pub fn from_hourly(hourly: BTreeMap<String, Vec<f64>>, dt_hours: f64) -> Result<Self, String> {
        if !(dt_hours > 0.0) {
            return Err(format!("time step must be positive, got {dt_hours}"));
        }
        for (zone, values) in &hourly {
            if values.len() != 24 {
                return Err(format!("zone {zone}: expected 24 hourly prices, got {}", values.len()));
            }
            if let Some(h) = values.iter().position(|v| !v.is_finite()) {
                return Err(format!("zone {zone}: non-finite price at hour {h}"));
            }
        }
        Ok(Self { dt_hours, hourly })
    }

    pub fn flat<'a>(zones: impl IntoIterator<Item = &'a str>, value: f64, dt_hours: f64) -> Self {
        let hourly = zones.into_iter().map(|z| (z.to_string(), vec![value; 24])).collect();
        Self { dt_hours, hourly }
    }

    pub fn dt_hours(&self) -> f64 {
        self.dt_hours
    }

    pub fn zones(&self) -> impl Iterator<Item = &str> {
        self.hourly.keys().map(String::as_str)
    }

    pub fn hourly(&self, zone: &str) -> Option<&[f64]> {
        self.hourly.get(zone).map(Vec::as_slice)
    }

    /// Price in zone `zone` during step `k`; the horizon repeats every 24 h.
    pub fn price(&self, zone: &str, k: usize) -> Option<f64> {
        let hour = ((k as f64 * self.dt_hours + 1e-9).floor() as usize) % 24;
        self.hourly.get(zone).map(|v| v[hour])
    }

    pub fn series(&self, zone: &str, steps: usize) -> Option<Vec<f64>> {
        self.hourly.contains_key(zone).then(|| (0..steps).map(|k| self.price(zone, k).unwrap()).collect())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let hourly = self.hourly.iter().map(|(z, v)| (z.clone(), v.iter().map(|p| p * alpha).collect())).collect();
        Self { dt_hours: self.dt_hours, hourly }
    }

    pub fn with_dt(&self, dt_hours: f64) -> Self {
        Self { dt_hours, hourly: self.hourly.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replication_across_sub_steps() {
        let values: Vec<f64> = (0..24).map(|h| h as f64 * 10.0).collect();
        let prices = PriceSeries::from_hourly([("NL".to_string(), values)].into(), 0.25).unwrap();
        let series = prices.series("NL", 96).unwrap();
        assert_eq!(series.len(), 96);
        for (k, p) in series.iter().enumerate() {
            assert_eq!(*p, (k / 4) as f64 * 10.0);
        }
        assert!(prices.series("DE", 4).is_none());
    }

    #[test]
    fn rejects_short_or_nonfinite() {
        assert!(PriceSeries::from_hourly([("NL".to_string(), vec![1.0; 23])].into(), 1.0).is_err());
        let mut v = vec![1.0; 24];
        v[3] = f64::NAN;
        assert!(PriceSeries::from_hourly([("NL".to_string(), v)].into(), 1.0).is_err());
    }

    #[test]
    fn scaling() {
        let p = PriceSeries::flat(["A", "B"], 100.0, 0.5).scaled(2.5);
        assert_eq!(p.price("B", 47), Some(250.0));
    }
}
