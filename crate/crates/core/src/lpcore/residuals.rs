use std::collections::BTreeMap;

use super::{LpModel, RowGroup};

/// Largest constraint and bound violations of a primal point, in model units.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualSummary {
    /// Max violation per row group; groups without rows are absent.
    pub by_group: BTreeMap<RowGroup, f64>,
    pub worst_row: Option<usize>,
    pub column_bounds: f64,
    pub worst_column: Option<usize>,
}

impl ResidualSummary {
    pub fn max_row(&self) -> f64 {
        self.by_group.values().copied().fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.max_row().max(self.column_bounds)
    }

    pub fn group(&self, group: RowGroup) -> f64 {
        self.by_group.get(&group).copied().unwrap_or(0.0)
    }
}

fn violation(value: f64, (lower, upper): (f64, f64)) -> f64 {
    (lower - value).max(value - upper).max(0.0)
}

/// Per-group max row violation and max column bound violation of `x`.
///
/// Panics if `x` does not have one entry per column.
pub fn residuals(model: &LpModel, x: &[f64]) -> ResidualSummary {
    assert_eq!(x.len(), model.columns, "primal vector length");
    let mut summary = ResidualSummary::default();
    let mut worst = -1.0;
    for (i, a) in model.activities(x).into_iter().enumerate() {
        let v = violation(a, model.row_bounds[i]);
        let slot = summary.by_group.entry(model.row_groups[i]).or_insert(0.0);
        *slot = slot.max(v);
        if v > worst {
            worst = v;
            summary.worst_row = Some(i);
        }
    }
    let mut worst = -1.0;
    for (j, &v) in x.iter().enumerate() {
        let v = violation(v, model.col_bounds[j]);
        if v > worst {
            worst = v;
            summary.column_bounds = v;
            summary.worst_column = Some(j);
        }
    }
    summary
}
