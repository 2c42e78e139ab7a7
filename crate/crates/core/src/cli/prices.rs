use std::collections::BTreeMap;

use crate::lpcore::PriceSeries;

use super::CliError;

pub const PRICE_HEADER: [&str; 3] = ["zone", "hour_utc", "price_eur_mwh"];

/// Collapses sorted hours into `a-b` ranges.
fn ranges(hours: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < hours.len() {
        let start = hours[i];
        while i + 1 < hours.len() && hours[i + 1] == hours[i] + 1 {
            i += 1;
        }
        parts.push(if hours[i] == start { start.to_string() } else { format!("{start}-{}", hours[i]) });
        i += 1;
    }
    parts.join(",")
}

/// Reads `zone,hour_utc,price_eur_mwh` rows into a series on a `dt_hours` grid.
///
/// Every zone in the file must list all 24 hours exactly once.
pub fn parse_prices(text: &str, dt_hours: f64) -> Result<PriceSeries, CliError> {
    let err = |line: u64, message: String| CliError::Prices { line, message };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().map_err(|e| err(1, e.to_string()))?.iter().map(String::from).collect();
    if header != PRICE_HEADER {
        return Err(err(1, format!("expected header `{}`, found `{}`", PRICE_HEADER.join(","), header.join(","))));
    }
    let mut zones: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let hour: usize = rec[1]
            .parse()
            .ok()
            .filter(|h| *h < 24)
            .ok_or_else(|| err(line, format!("hour `{}` is not in 0..=23", &rec[1])))?;
        let price: f64 = rec[2]
            .parse()
            .ok()
            .filter(|p: &f64| p.is_finite())
            .ok_or_else(|| err(line, format!("invalid price `{}`", &rec[2])))?;
        let slot = &mut zones.entry(rec[0].to_string()).or_insert_with(|| vec![None; 24])[hour];
        if slot.is_some() {
            return Err(err(line, format!("zone {} lists hour {hour} twice", &rec[0])));
        }
        *slot = Some(price);
    }
    let gaps: Vec<String> = zones
        .iter()
        .filter_map(|(zone, hours)| {
            let missing: Vec<usize> = (0..24).filter(|&h| hours[h].is_none()).collect();
            (!missing.is_empty()).then(|| format!("zone {zone} missing hours {}", ranges(&missing)))
        })
        .collect();
    if !gaps.is_empty() {
        return Err(CliError::PriceGaps(gaps.join("; ")));
    }
    let hourly = zones.into_iter().map(|(z, h)| (z, h.into_iter().flatten().collect())).collect();
    PriceSeries::from_hourly(hourly, dt_hours).map_err(|m| err(0, m))
}

/// Writes a series back in the `parse_prices` format.
pub fn prices_csv(prices: &PriceSeries) -> String {
    let mut out = PRICE_HEADER.join(",") + "\n";
    for zone in prices.zones() {
        for (h, p) in prices.hourly(zone).unwrap_or_default().iter().enumerate() {
            out += &format!("{zone},{h},{p}\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(rows: impl Iterator<Item = (String, usize, f64)>) -> String {
        let mut s = PRICE_HEADER.join(",") + "\n";
        for (z, h, p) in rows {
            s += &format!("{z},{h},{p}\n");
        }
        s
    }

    #[test]
    fn flat_file() {
        let text = file(["A", "B"].into_iter().flat_map(|z| (0..24).map(move |h| (z.to_string(), h, 100.0))));
        let p = parse_prices(&text, 1.0).unwrap();
        assert_eq!(p, PriceSeries::flat(["A", "B"], 100.0, 1.0));
    }

    #[test]
    fn quarter_hour_replication() {
        let text = file((0..24).map(|h| ("NL".to_string(), h, h as f64 * 1.5)));
        let p = parse_prices(&text, 0.25).unwrap();
        let s = p.series("NL", 96).unwrap();
        assert_eq!(s.len(), 96);
        for (k, v) in s.iter().enumerate() {
            assert_eq!(*v, (k / 4) as f64 * 1.5);
        }
    }

    #[test]
    fn disjoint_hours_name_both_gaps() {
        let text = file((0..12).map(|h| ("A".to_string(), h, 1.0)).chain((12..24).map(|h| ("B".to_string(), h, 1.0))));
        let e = parse_prices(&text, 1.0).unwrap_err().to_string();
        assert!(e.contains("zone A missing hours 12-23"), "{e}");
        assert!(e.contains("zone B missing hours 0-11"), "{e}");
    }

    #[test]
    fn bad_rows_carry_line_numbers() {
        let text = file((0..24).map(|h| ("A".to_string(), h, 1.0))) + "A,24,1\n";
        assert!(matches!(parse_prices(&text, 1.0), Err(CliError::Prices { line: 26, .. })));
        let dup = file((0..24).map(|h| ("A".to_string(), h, 1.0))) + "A,3,1\n";
        assert!(parse_prices(&dup, 1.0).unwrap_err().to_string().contains("twice"));
        assert!(parse_prices("zone,hour,price\n", 1.0).is_err());
    }

    #[test]
    fn round_trip() {
        let text = file((0..24).map(|h| ("Z".to_string(), h, 40.0 + h as f64 / 3.0)));
        let p = parse_prices(&text, 1.0).unwrap();
        assert_eq!(parse_prices(&prices_csv(&p), 1.0).unwrap(), p);
    }
}
