//! Free-format MPS export and import.
//!
//! Numbers use Rust's shortest round-trip formatting. Rows with both bounds
//! finite and distinct are written as `G` rows with a `RANGES` entry `U - L`;
//! rows with no finite bound as extra `N` rows, which read back as free rows.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{LpModel, RowGroup, Triplet};

const OBJ: &str = "COST";
const INF: f64 = f64::INFINITY;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("MPS line {line}: {message}")]
pub struct MpsError {
    pub line: usize,
    pub message: String,
}

pub fn write_mps(model: &LpModel, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N {OBJ}");
    for (i, &(l, u)) in model.row_bounds.iter().enumerate() {
        let kind = match (l.is_finite(), u.is_finite()) {
            (true, true) if l == u => "E",
            (true, _) => "G",
            (false, true) => "L",
            (false, false) => "N",
        };
        let _ = writeln!(out, " {kind} {}", model.row_names[i]);
    }

    out.push_str("COLUMNS\n");
    for (j, entries) in model.column_entries().iter().enumerate() {
        let col = &model.col_names[j];
        let c = model.objective[j];
        if c != 0.0 || entries.is_empty() {
            let _ = writeln!(out, " {col} {OBJ} {c}");
        }
        for &(i, v) in entries {
            let _ = writeln!(out, " {col} {} {v}", model.row_names[i]);
        }
    }

    out.push_str("RHS\n");
    for (i, &(l, u)) in model.row_bounds.iter().enumerate() {
        let rhs = if l.is_finite() { l } else { u };
        if rhs.is_finite() && rhs != 0.0 {
            let _ = writeln!(out, " RHS {} {rhs}", model.row_names[i]);
        }
    }

    out.push_str("RANGES\n");
    for (i, &(l, u)) in model.row_bounds.iter().enumerate() {
        if l.is_finite() && u.is_finite() && l != u {
            let _ = writeln!(out, " RNG {} {}", model.row_names[i], u - l);
        }
    }

    out.push_str("BOUNDS\n");
    for (j, &(l, u)) in model.col_bounds.iter().enumerate() {
        let col = &model.col_names[j];
        match (l, u) {
            (l, u) if l == u => {
                let _ = writeln!(out, " FX BND {col} {l}");
            }
            (l, u) if l == -INF && u == INF => {
                let _ = writeln!(out, " FR BND {col}");
            }
            (l, u) => {
                if l == -INF {
                    let _ = writeln!(out, " MI BND {col}");
                } else if l != 0.0 {
                    let _ = writeln!(out, " LO BND {col} {l}");
                }
                if u.is_finite() {
                    let _ = writeln!(out, " UP BND {col} {u}");
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

#[derive(Clone, Copy, PartialEq)]
enum RowKind {
    E,
    L,
    G,
    Free,
}

/// Reads a free-format MPS model. The first `N` row is the objective.
pub fn read_mps(text: &str) -> Result<LpModel, MpsError> {
    let mut section = Section::None;
    let mut objective_row: Option<String> = None;
    let mut rows: Vec<(String, RowKind)> = Vec::new();
    let mut row_of: HashMap<String, usize> = HashMap::new();
    let mut col_of: HashMap<String, usize> = HashMap::new();
    let mut model = LpModel::new(0);
    let mut rhs: Vec<f64> = Vec::new();
    let mut range: Vec<Option<f64>> = Vec::new();
    let mut ended = false;

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| MpsError { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let number = |s: &str| s.parse::<f64>().map_err(|_| err(format!("invalid number `{s}`")));
        if !raw.starts_with(char::is_whitespace) {
            section = match toks[0] {
                "NAME" => Section::None,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    ended = true;
                    break;
                }
                other => return Err(err(format!("unknown section `{other}`"))),
            };
            if section == Section::Columns {
                rhs = vec![0.0; rows.len()];
                range = vec![None; rows.len()];
            }
            continue;
        }
        let row_index = |name: &str| row_of.get(name).copied().ok_or_else(|| err(format!("unknown row `{name}`")));
        match section {
            Section::None => return Err(err("data outside a section".into())),
            Section::Rows => {
                let [kind, name] = toks[..] else { return Err(err("expected `<type> <row>`".into())) };
                let kind = match kind {
                    "N" if objective_row.is_none() => {
                        objective_row = Some(name.to_string());
                        continue;
                    }
                    "N" => RowKind::Free,
                    "E" => RowKind::E,
                    "L" => RowKind::L,
                    "G" => RowKind::G,
                    other => return Err(err(format!("unknown row type `{other}`"))),
                };
                if row_of.insert(name.to_string(), rows.len()).is_some() || objective_row.as_deref() == Some(name) {
                    return Err(err(format!("duplicate row `{name}`")));
                }
                rows.push((name.to_string(), kind));
            }
            Section::Columns => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err("expected `<col> <row> <value> [<row> <value>]`".into()));
                }
                let col = match col_of.get(toks[0]) {
                    Some(&j) => j,
                    None => {
                        let j = model.add_column(toks[0], 0.0, INF, 0.0);
                        col_of.insert(toks[0].to_string(), j);
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let value = number(pair[1])?;
                    if objective_row.as_deref() == Some(pair[0]) {
                        model.objective[col] = value;
                    } else {
                        model.triplets.push(Triplet { row: row_index(pair[0])?, col, value });
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err("expected `<set> <row> <value> [<row> <value>]`".into()));
                }
                for pair in toks[1..].chunks(2) {
                    let value = number(pair[1])?;
                    if objective_row.as_deref() == Some(pair[0]) {
                        continue;
                    }
                    let i = row_index(pair[0])?;
                    if section == Section::Rhs {
                        rhs[i] = value;
                    } else {
                        range[i] = Some(value);
                    }
                }
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(err("expected `<type> <set> <col> [<value>]`".into()));
                }
                let j = *col_of.get(toks[2]).ok_or_else(|| err(format!("unknown column `{}`", toks[2])))?;
                let value = || toks.get(3).ok_or_else(|| err("missing bound value".into())).and_then(|s| number(s));
                let b = &mut model.col_bounds[j];
                match toks[0] {
                    "FX" => {
                        let v = value()?;
                        *b = (v, v);
                    }
                    "FR" => *b = (-INF, INF),
                    "MI" => b.0 = -INF,
                    "PL" => b.1 = INF,
                    "LO" => b.0 = value()?,
                    "UP" => b.1 = value()?,
                    "BV" => *b = (0.0, 1.0),
                    other => return Err(err(format!("unsupported bound type `{other}`"))),
                }
            }
        }
    }
    if !ended {
        return Err(MpsError { line: text.lines().count(), message: "missing ENDATA".into() });
    }
    if rhs.len() != rows.len() {
        rhs = vec![0.0; rows.len()];
        range = vec![None; rows.len()];
    }

    for (i, (name, kind)) in rows.into_iter().enumerate() {
        let r = rhs[i];
        let bounds = match (kind, range[i]) {
            (RowKind::Free, _) => (-INF, INF),
            (RowKind::E, None) => (r, r),
            (RowKind::E, Some(rg)) if rg >= 0.0 => (r, r + rg),
            (RowKind::E, Some(rg)) => (r + rg, r),
            (RowKind::L, None) => (-INF, r),
            (RowKind::L, Some(rg)) => (r - rg.abs(), r),
            (RowKind::G, None) => (r, INF),
            (RowKind::G, Some(rg)) => (r, r + rg.abs()),
        };
        model.row_bounds.push(bounds);
        model.row_groups.push(RowGroup::from_row_name(&name));
        model.row_names.push(name);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn canonical(model: &LpModel) -> LpModel {
        let mut m = model.clone();
        m.triplets.sort_by_key(|t| (t.col, t.row));
        m.index = None;
        m
    }

    #[test]
    fn hand_model_round_trip() {
        let mut m = LpModel::new(3);
        m.col_names = vec!["x".into(), "y".into(), "z".into()];
        m.objective = vec![1.0, -0.1, 0.0];
        m.col_bounds = vec![(0.0, 4.0), (-INF, INF), (2.5, 2.5)];
        m.add_row(RowGroup::EnergyBalance, "ebal_0", [(0, 1.0), (1, 1.0)], 1.0, INF);
        m.add_row(RowGroup::PowerSplit, "split_0", [(1, 3.0)], -2.0, 5.0);
        m.add_row(RowGroup::FlightEnergy, "fltE_0", [(0, 1e-7)], 0.3, 0.3);
        m.add_row(RowGroup::Other, "free", [(0, 2.0)], -INF, INF);
        let text = write_mps(&m, "hand");
        assert!(text.contains(" z COST 0\n"), "{text}");
        assert_eq!(canonical(&read_mps(&text).unwrap()), canonical(&m));
    }

    #[test]
    fn reads_two_pair_lines_and_errors() {
        let text = "NAME t\nROWS\n N obj\n L c1\nCOLUMNS\n x obj 1 c1 2\nRHS\n RHS c1 4\nBOUNDS\n UP BND x 3\nENDATA\n";
        let m = read_mps(text).unwrap();
        assert_eq!(m.objective, vec![1.0]);
        assert_eq!(m.row_bounds, vec![(-INF, 4.0)]);
        assert_eq!(m.col_bounds, vec![(0.0, 3.0)]);
        assert_eq!(m.row_groups, vec![RowGroup::Other]);

        let bad = read_mps("ROWS\n N obj\nCOLUMNS\n x c9 1\nENDATA\n").unwrap_err();
        assert_eq!(bad.line, 4);
        assert!(read_mps("ROWS\n N obj\n").is_err());
    }

    fn bound() -> impl Strategy<Value = f64> {
        prop_oneof![Just(f64::INFINITY), Just(f64::NEG_INFINITY), Just(0.0), -1e3..1e3f64]
    }

    // Integer row bounds keep `L + (U - L)` exact for ranged rows.
    fn row_bound() -> impl Strategy<Value = f64> {
        prop_oneof![Just(f64::INFINITY), Just(f64::NEG_INFINITY), (-1000i32..1000).prop_map(f64::from)]
    }

    proptest! {
        #[test]
        fn round_trip(
            n in 1usize..6,
            rows in prop::collection::vec((row_bound(), row_bound(), 0usize..16), 0..6),
            entries in prop::collection::vec((0usize..6, 0usize..6, -1e6..1e6f64), 0..20),
            cols in prop::collection::vec((bound(), bound(), -1e3..1e3f64), 6),
        ) {
            let mut m = LpModel::new(n);
            for (j, &(a, b, c)) in cols.iter().take(n).enumerate() {
                let (l, u) = if a <= b { (a, b) } else { (b, a) };
                if l == INF || u == -INF {
                    continue;
                }
                m.col_bounds[j] = (l, u);
                m.objective[j] = c;
            }
            for (i, &(a, b, g)) in rows.iter().enumerate() {
                let (l, u) = if a <= b { (a, b) } else { (b, a) };
                let l = if l == INF { -INF } else { l };
                let u = if u == -INF { INF } else { u };
                let group = RowGroup::ALL[g];
                let terms: Vec<_> = entries.iter().filter(|e| e.0 == i && e.1 < n).map(|e| (e.1, e.2)).collect();
                let mut seen = std::collections::HashSet::new();
                let terms: Vec<_> = terms.into_iter().filter(|t| seen.insert(t.0)).collect();
                m.add_row(group, format!("{}_{i}", group.code()), terms, l, u);
            }
            let text = write_mps(&m, "prop");
            let back = read_mps(&text).unwrap();
            prop_assert_eq!(canonical(&back), canonical(&m));
        }
    }
}
