use std::fmt;

use crate::lpcore::{residuals, LpModel};

use super::{SolveOutcome, SolveStatus, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// The measured quantity, e.g. the largest violation.
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<18} {:<4} {:e}  {}", c.name, if c.passed { "ok" } else { "FAIL" }, c.value, c.detail)?;
        }
        Ok(())
    }
}

/// `Σ_i y_i·(L_i or U_i) + Σ_j d_j·(l_j or u_j)` and the largest multiplier
/// sitting on an infinite bound, which makes the dual infeasible.
fn dual_objective(model: &LpModel, y: &[f64], tol: f64) -> (f64, f64) {
    let mut d = model.objective.clone();
    for t in &model.triplets {
        d[t.col] -= t.value * y[t.row];
    }
    let mut value = 0.0;
    let mut infeasible = 0.0f64;
    let mut add = |mult: f64, (lo, hi): (f64, f64)| {
        let bound = if mult > 0.0 { lo } else { hi };
        if mult == 0.0 {
            return;
        }
        if bound.is_finite() {
            value += mult * bound;
        } else if mult.abs() > tol {
            infeasible = infeasible.max(mult.abs());
        }
    };
    for (i, &yi) in y.iter().enumerate() {
        add(yi, model.row_bounds[i]);
    }
    for (j, &dj) in d.iter().enumerate() {
        add(dj, model.col_bounds[j]);
    }
    (value, infeasible)
}

/// Recomputes feasibility, objective and, with duals, the duality gap in original units.
pub fn verify(model: &LpModel, outcome: &SolveOutcome, config: &SolverConfig) -> VerificationReport {
    let mut checks = Vec::new();
    let optimal = outcome.status == SolveStatus::Optimal;
    checks.push(Check {
        name: "status",
        passed: optimal,
        value: 0.0,
        detail: outcome.status.to_string(),
    });
    if outcome.primal.len() != model.columns {
        checks.push(Check {
            name: "primal length",
            passed: false,
            value: outcome.primal.len() as f64,
            detail: format!("expected {}", model.columns),
        });
        return VerificationReport { checks };
    }
    let x = &outcome.primal;
    let r = residuals(model, x);
    checks.push(Check {
        name: "row residuals",
        passed: r.max_row() <= config.feasibility_tol,
        value: r.max_row(),
        detail: r.worst_row.map_or_else(String::new, |i| format!("worst row {}", model.row_names[i])),
    });
    checks.push(Check {
        name: "column bounds",
        passed: r.column_bounds <= config.feasibility_tol,
        value: r.column_bounds,
        detail: r.worst_column.map_or_else(String::new, |j| format!("worst column {}", model.col_names[j])),
    });
    let recomputed = model.objective_value(x);
    let diff = (recomputed - outcome.objective).abs();
    checks.push(Check {
        name: "objective",
        passed: diff <= config.optimality_tol * (1.0 + recomputed.abs()),
        value: diff,
        detail: format!("recomputed {recomputed}"),
    });
    if let Some(y) = outcome.dual.as_ref().filter(|y| y.len() == model.rows()) {
        let scale = 1.0 + model.objective.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let (dual, infeasible) = dual_objective(model, y, config.optimality_tol * scale);
        checks.push(Check {
            name: "dual feasibility",
            passed: infeasible <= config.optimality_tol * scale,
            value: infeasible,
            detail: String::new(),
        });
        let gap = (recomputed - dual).abs();
        checks.push(Check {
            name: "duality gap",
            passed: gap <= config.optimality_tol * (1.0 + recomputed.abs()),
            value: gap,
            detail: format!("dual objective {dual}"),
        });
    }
    VerificationReport { checks }
}
