use std::fmt;

use super::{CliError, RunSummary};

#[derive(Debug, Clone, PartialEq)]
pub struct VariantCost {
    pub name: String,
    pub cost: f64,
    /// `1 - cost / baseline cost`.
    pub savings: f64,
}

/// Per-airport energy of a variant against the baseline [MWh].
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyShift {
    pub variant: String,
    pub airport: String,
    pub baseline_apron: f64,
    pub variant_apron: f64,
    pub baseline_grid: f64,
    pub variant_grid: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakDelta {
    pub variant: String,
    pub airport: String,
    pub baseline_mw: f64,
    pub variant_mw: f64,
    pub grid_cap_mw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub fingerprint: String,
    pub baseline: VariantCost,
    pub variants: Vec<VariantCost>,
    pub energy_shift: Vec<EnergyShift>,
    pub peaks: Vec<PeakDelta>,
}

fn savings(baseline: f64, variant: f64) -> Result<f64, CliError> {
    if baseline == variant {
        Ok(0.0)
    } else if baseline == 0.0 {
        Err(CliError::Compare("baseline cost is zero; savings are undefined".into()))
    } else {
        Ok(1.0 - variant / baseline)
    }
}

/// Relates each variant to the baseline; all runs must share a fingerprint.
pub fn compare(baseline: (&str, &RunSummary), variants: &[(String, RunSummary)]) -> Result<ComparisonReport, CliError> {
    let (base_name, base) = baseline;
    let mut report = ComparisonReport {
        fingerprint: base.fingerprint.clone(),
        baseline: VariantCost { name: base_name.to_string(), cost: base.objective, savings: 0.0 },
        variants: Vec::new(),
        energy_shift: Vec::new(),
        peaks: Vec::new(),
    };
    for (name, v) in variants {
        if v.fingerprint != base.fingerprint {
            return Err(CliError::Compare(format!(
                "{name} was run on different inputs ({}…) than {base_name} ({}…)",
                &v.fingerprint[..v.fingerprint.len().min(12)],
                &base.fingerprint[..base.fingerprint.len().min(12)]
            )));
        }
        report.variants.push(VariantCost { name: name.clone(), cost: v.objective, savings: savings(base.objective, v.objective)? });
        for b in &base.airports {
            let Some(a) = v.airports.iter().find(|a| a.code == b.code) else {
                return Err(CliError::Compare(format!("{name} has no airport {}", b.code)));
            };
            report.energy_shift.push(EnergyShift {
                variant: name.clone(),
                airport: b.code.clone(),
                baseline_apron: b.apron_energy_mwh,
                variant_apron: a.apron_energy_mwh,
                baseline_grid: b.grid_energy_mwh,
                variant_grid: a.grid_energy_mwh,
            });
            report.peaks.push(PeakDelta {
                variant: name.clone(),
                airport: b.code.clone(),
                baseline_mw: b.peak_grid_mw,
                variant_mw: a.peak_grid_mw,
                grid_cap_mw: a.grid_cap_mw,
            });
        }
    }
    Ok(report)
}

impl ComparisonReport {
    pub fn costs_csv(&self) -> String {
        let mut s = String::from("variant,cost,savings\n");
        for v in std::iter::once(&self.baseline).chain(&self.variants) {
            s += &format!("{},{},{}\n", v.name, v.cost, v.savings);
        }
        s
    }

    pub fn energy_csv(&self) -> String {
        let mut s = String::from("variant,airport,apron_baseline_mwh,apron_variant_mwh,apron_delta_mwh,grid_baseline_mwh,grid_variant_mwh,grid_delta_mwh\n");
        for e in &self.energy_shift {
            s += &format!(
                "{},{},{},{},{},{},{},{}\n",
                e.variant,
                e.airport,
                e.baseline_apron,
                e.variant_apron,
                e.variant_apron - e.baseline_apron,
                e.baseline_grid,
                e.variant_grid,
                e.variant_grid - e.baseline_grid
            );
        }
        s
    }

    pub fn peaks_csv(&self) -> String {
        let mut s = String::from("variant,airport,peak_baseline_mw,peak_variant_mw,peak_delta_mw,grid_cap_mw\n");
        for p in &self.peaks {
            s += &format!(
                "{},{},{},{},{},{}\n",
                p.variant,
                p.airport,
                p.baseline_mw,
                p.variant_mw,
                p.variant_mw - p.baseline_mw,
                p.grid_cap_mw
            );
        }
        s
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24} {:>14} {:>9}", "variant", "cost", "savings")?;
        for v in std::iter::once(&self.baseline).chain(&self.variants) {
            writeln!(f, "{:<24} {:>14.2} {:>8.2}%", v.name, v.cost, 100.0 * v.savings)?;
        }
        writeln!(f, "\n{:<24} {:<8} {:>12} {:>12} {:>12}", "variant", "airport", "apron Δ MWh", "grid Δ MWh", "peak Δ MW")?;
        for (e, p) in self.energy_shift.iter().zip(&self.peaks) {
            let de = e.variant_apron - e.baseline_apron;
            let dg = e.variant_grid - e.baseline_grid;
            let dp = p.variant_mw - p.baseline_mw;
            if de.abs() > 1e-9 || dg.abs() > 1e-9 || dp.abs() > 1e-9 {
                writeln!(f, "{:<24} {:<8} {:>12.3} {:>12.3} {:>12.3}", e.variant, e.airport, de, dg, dp)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{AirportSummary, Overrides};

    fn summary(cost: f64, hub_apron: f64) -> RunSummary {
        let airport = |code: &str, apron: f64| AirportSummary {
            code: code.into(),
            chargers: 0,
            grid_cap_mw: 8.0,
            grid_energy_mwh: apron,
            apron_energy_mwh: apron,
            fleet_energy_mwh: 0.0,
            peak_grid_mw: apron / 2.0,
            cost: 0.0,
        };
        RunSummary {
            fingerprint: "f".repeat(64),
            status: "optimal".into(),
            backend: "reference".into(),
            objective: cost,
            iterations: 1,
            steps: 24,
            dt_hours: 1.0,
            buckets: 4,
            aircraft: 1,
            flights: 2,
            overrides: Overrides::default(),
            max_residual: 0.0,
            airports: vec![airport("HUB", hub_apron), airport("SPK", 4.0 - hub_apron)],
        }
    }

    #[test]
    fn identical_runs_save_nothing() {
        let b = summary(200.0, 2.0);
        let r = compare(("base", &b), &[("same".into(), b.clone())]).unwrap();
        assert_eq!(r.variants[0].savings, 0.0);
        assert!(r.energy_shift.iter().all(|e| e.baseline_apron == e.variant_apron));
    }

    #[test]
    fn savings_and_shift() {
        let b = summary(200.0, 2.0);
        let v = summary(150.0, 3.0);
        let r = compare(("base", &b), &[("v2g".into(), v)]).unwrap();
        assert_eq!(r.variants[0].savings, 0.25);
        let hub = &r.energy_shift[0];
        assert_eq!((hub.airport.as_str(), hub.variant_apron - hub.baseline_apron), ("HUB", 1.0));
        assert_eq!(r.energy_shift[1].variant_apron - r.energy_shift[1].baseline_apron, -1.0);
        assert!(r.costs_csv().contains("v2g,150,0.25"));
        assert_eq!(r.peaks_csv().lines().count(), 3);
    }

    #[test]
    fn refuses_other_scenarios() {
        let b = summary(200.0, 2.0);
        let mut v = summary(150.0, 3.0);
        v.fingerprint = "0".repeat(64);
        assert!(matches!(compare(("base", &b), &[("x".into(), v)]), Err(CliError::Compare(_))));
    }

    #[test]
    fn zero_baseline() {
        let b = summary(0.0, 2.0);
        assert!(compare(("base", &b), &[("x".into(), summary(0.0, 2.0))]).is_ok());
        assert!(compare(("base", &b), &[("x".into(), summary(-1.0, 2.0))]).is_err());
    }
}
