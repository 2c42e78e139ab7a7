//! LP solving behind a narrow contract, with a dense reference simplex as the oracle.
//!
//! [`solve`] equilibrates the model, dispatches to a backend, maps the result
//! back to original units and refuses to report an unverified answer: an
//! optimal claim whose residuals exceed the feasibility tolerance, or an
//! infeasible claim not confirmed by an elastic re-solve, comes back as
//! [`SolveStatus::IterationLimit`] with a diagnostic.

mod elastic;
#[cfg(feature = "clarabel")]
mod external;
mod reference;
mod scaling;
mod verify;

pub use elastic::{elastic_relaxation, minimum_violation};
pub use reference::{reference_solve, REFERENCE_MAX_COLUMNS};
pub use scaling::Scaling;
pub use verify::{verify, Check, VerificationReport};

use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use crate::lpcore::{residuals, LpModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Dense bounded simplex: Bland entering rule, Harris ratio test.
    Reference,
    /// Interior-point solver for large models.
    External,
}

impl Backend {
    pub fn available(self) -> bool {
        match self {
            Backend::Reference => true,
            Backend::External => cfg!(feature = "clarabel"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub max_iterations: usize,
    pub backend: Backend,
    /// Equilibrate rows and columns before solving.
    pub scale: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-6,
            optimality_tol: 1e-6,
            max_iterations: 1_000_000,
            backend: if Backend::External.available() { Backend::External } else { Backend::Reference },
            scale: true,
        }
    }
}

impl SolverConfig {
    pub fn reference() -> Self {
        Self { backend: Backend::Reference, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.feasibility_tol > 0.0 && self.optimality_tol > 0.0) {
            return Err(SolveError::Config("tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::Config("iteration limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterationLimit => "iteration-limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// One entry per column, in original units.
    pub primal: Vec<f64>,
    /// Row prices `y` with reduced costs `d = c - Aᵀy`.
    pub dual: Option<Vec<f64>>,
    pub objective: f64,
    pub iterations: usize,
    /// Seconds.
    pub wall_time: f64,
    pub backend: Backend,
    pub scaling: Option<Scaling>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("model has {columns} columns; the reference solver accepts at most {limit}")]
    TooLarge { columns: usize, limit: usize },
    #[error("backend {0:?} is not compiled in")]
    Unavailable(Backend),
    #[error("solver configuration: {0}")]
    Config(String),
}

/// What a backend returns, in the units of the model it was given.
#[derive(Debug, Clone)]
pub(crate) struct RawSolution {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    pub dual: Option<Vec<f64>>,
    pub iterations: usize,
    pub note: Option<String>,
}

fn dispatch(model: &LpModel, config: &SolverConfig) -> Result<RawSolution, SolveError> {
    match config.backend {
        Backend::Reference => reference::simplex(model, config),
        #[cfg(feature = "clarabel")]
        Backend::External => Ok(external::interior_point(model, config)),
        #[cfg(not(feature = "clarabel"))]
        Backend::External => Err(SolveError::Unavailable(Backend::External)),
    }
}

/// Solves `model`, scaling it first when configured.
pub fn solve(model: &LpModel, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    config.validate()?;
    model.well_formed().map_err(SolveError::Malformed)?;
    if config.backend == Backend::Reference && model.columns > REFERENCE_MAX_COLUMNS {
        return Err(SolveError::TooLarge { columns: model.columns, limit: REFERENCE_MAX_COLUMNS });
    }
    let start = Instant::now();
    let (raw, scaling) = if config.scale {
        let scaling = Scaling::equilibrate(model);
        let raw = dispatch(&scaling.apply(model), config)?;
        (scaling.unscale(raw), Some(scaling))
    } else {
        (dispatch(model, config)?, None)
    };
    let mut outcome = finish(model, raw, config, scaling);
    if outcome.status == SolveStatus::Infeasible {
        confirm_infeasible(model, config, &mut outcome)?;
    }
    outcome.wall_time = start.elapsed().as_secs_f64();
    Ok(outcome)
}

fn finish(model: &LpModel, raw: RawSolution, config: &SolverConfig, scaling: Option<Scaling>) -> SolveOutcome {
    let mut diagnostics: Vec<String> = raw.note.into_iter().collect();
    let mut status = raw.status;
    let mut primal = raw.primal;
    if status == SolveStatus::Optimal {
        // clip interior-point round-off back onto the column bounds
        for (x, &(l, u)) in primal.iter_mut().zip(&model.col_bounds) {
            *x = x.clamp(l, u);
        }
        let r = residuals(model, &primal);
        if primal.len() != model.columns || !(r.max() <= config.feasibility_tol) {
            let mut msg = format!("solver claimed optimality but the max residual is {:e}", r.max());
            if let Some(i) = r.worst_row {
                let _ = write!(msg, " (worst row {})", model.row_names[i]);
            }
            diagnostics.push(msg);
            status = SolveStatus::IterationLimit;
        }
    }
    let objective = if primal.len() == model.columns { model.objective_value(&primal) } else { f64::NAN };
    SolveOutcome {
        status,
        primal,
        dual: raw.dual,
        objective,
        iterations: raw.iterations,
        wall_time: 0.0,
        backend: config.backend,
        scaling,
        diagnostics,
    }
}

fn confirm_infeasible(model: &LpModel, config: &SolverConfig, outcome: &mut SolveOutcome) -> Result<(), SolveError> {
    let relaxed = elastic_relaxation(model);
    let inner = SolverConfig { scale: config.scale, ..config.clone() };
    let check = if inner.scale {
        let scaling = Scaling::equilibrate(&relaxed);
        scaling.unscale(dispatch(&scaling.apply(&relaxed), &inner)?)
    } else {
        dispatch(&relaxed, &inner)?
    };
    if check.status != SolveStatus::Optimal {
        outcome.status = SolveStatus::IterationLimit;
        outcome.diagnostics.push(format!("infeasibility not confirmed: elastic re-solve ended {}", check.status));
        return Ok(());
    }
    let slack = minimum_violation(model, &check.primal);
    if slack > config.feasibility_tol {
        outcome.diagnostics.push(format!("elastic re-solve needs total constraint violation {slack:e}"));
    } else {
        outcome.status = SolveStatus::IterationLimit;
        outcome.diagnostics.push(format!(
            "backend reported infeasible but an elastic re-solve reaches violation {slack:e}"
        ));
    }
    Ok(())
}

/// `column_name,value` lines for a primal vector.
pub fn solution_csv(model: &LpModel, primal: &[f64]) -> String {
    let mut out = String::from("column_name,value\n");
    for (name, v) in model.col_names.iter().zip(primal) {
        let _ = writeln!(out, "{name},{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpcore::RowGroup;

    pub(crate) fn textbook() -> LpModel {
        let mut m = LpModel::new(2);
        m.objective = vec![1.0, 1.0];
        m.add_row(RowGroup::Other, "cover", [(0, 1.0), (1, 1.0)], 1.0, f64::INFINITY);
        m
    }

    #[test]
    fn textbook_lp_on_every_backend() {
        for backend in [Backend::Reference, Backend::External] {
            if !backend.available() {
                continue;
            }
            let config = SolverConfig { backend, ..SolverConfig::default() };
            let out = solve(&textbook(), &config).unwrap();
            assert_eq!(out.status, SolveStatus::Optimal, "{backend:?}");
            assert!((out.objective - 1.0).abs() < 1e-7, "{backend:?}: {}", out.objective);
            assert!(verify(&textbook(), &out, &config).passed());
        }
    }

    #[test]
    fn infeasible_is_confirmed() {
        let mut m = textbook();
        m.col_bounds = vec![(0.0, 0.25), (0.0, 0.25)];
        for backend in [Backend::Reference, Backend::External] {
            if !backend.available() {
                continue;
            }
            let out = solve(&m, &SolverConfig { backend, ..SolverConfig::default() }).unwrap();
            assert_eq!(out.status, SolveStatus::Infeasible, "{backend:?} {:?}", out.diagnostics);
        }
    }

    #[test]
    fn unbounded_is_reported() {
        let mut m = textbook();
        m.objective = vec![-1.0, 0.0];
        for backend in [Backend::Reference, Backend::External] {
            if !backend.available() {
                continue;
            }
            let out = solve(&m, &SolverConfig { backend, ..SolverConfig::default() }).unwrap();
            assert_eq!(out.status, SolveStatus::Unbounded, "{backend:?}");
        }
    }

    #[test]
    fn config_and_size_guards() {
        let bad = SolverConfig { feasibility_tol: 0.0, ..SolverConfig::default() };
        assert!(matches!(solve(&textbook(), &bad), Err(SolveError::Config(_))));
        let big = LpModel::new(REFERENCE_MAX_COLUMNS + 1);
        assert!(matches!(solve(&big, &SolverConfig::reference()), Err(SolveError::TooLarge { .. })));
    }

    #[test]
    fn csv_lists_every_column() {
        let csv = solution_csv(&textbook(), &[0.25, 0.75]);
        assert_eq!(csv, "column_name,value\nC0,0.25\nC1,0.75\n");
    }
}
