//! Interior-point backend on top of the `clarabel` crate.
//!
//! Clarabel solves `min cᵀx s.t. Ax + s = b, s ∈ K`. Equality rows and fixed
//! columns go to the zero cone; every finite one-sided row or column bound
//! becomes one nonnegative-cone row.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::lpcore::LpModel;

use super::{RawSolution, SolveStatus, SolverConfig};

/// How a cone row maps back to a model row's dual.
#[derive(Clone, Copy)]
enum Origin {
    Row { row: usize, sign: f64 },
    Column,
}

struct Conic {
    rows: Vec<(Vec<(usize, f64)>, f64, Origin)>,
    zero: usize,
}

fn conic_form(model: &LpModel) -> Conic {
    let entries = model.row_entries();
    let mut eq = Vec::new();
    let mut ineq = Vec::new();
    for (i, &(l, u)) in model.row_bounds.iter().enumerate() {
        let a = &entries[i];
        if l == u {
            eq.push((a.clone(), l, Origin::Row { row: i, sign: -1.0 }));
            continue;
        }
        if u.is_finite() {
            ineq.push((a.clone(), u, Origin::Row { row: i, sign: -1.0 }));
        }
        if l.is_finite() {
            ineq.push((a.iter().map(|&(j, v)| (j, -v)).collect(), -l, Origin::Row { row: i, sign: 1.0 }));
        }
    }
    for (j, &(l, u)) in model.col_bounds.iter().enumerate() {
        if l == u {
            eq.push((vec![(j, 1.0)], l, Origin::Column));
            continue;
        }
        if u.is_finite() {
            ineq.push((vec![(j, 1.0)], u, Origin::Column));
        }
        if l.is_finite() {
            ineq.push((vec![(j, -1.0)], -l, Origin::Column));
        }
    }
    let zero = eq.len();
    eq.extend(ineq);
    Conic { rows: eq, zero }
}

pub(crate) fn interior_point(model: &LpModel, config: &SolverConfig) -> RawSolution {
    let n = model.columns;
    let conic = conic_form(model);
    let m = conic.rows.len();
    let (mut ri, mut ci, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    let mut b = Vec::with_capacity(m);
    for (r, (terms, rhs, _)) in conic.rows.iter().enumerate() {
        for &(j, v) in terms {
            ri.push(r);
            ci.push(j);
            vals.push(v);
        }
        b.push(*rhs);
    }
    let a = CscMatrix::new_from_triplets(m, n, ri, ci, vals);
    let p = CscMatrix::new(n, n, vec![0; n + 1], Vec::new(), Vec::new());
    let mut cones = Vec::new();
    if conic.zero > 0 {
        cones.push(SupportedConeT::ZeroConeT(conic.zero));
    }
    if m > conic.zero {
        cones.push(SupportedConeT::NonnegativeConeT(m - conic.zero));
    }
    // tighter than the acceptance tolerance, so residuals survive unscaling
    let tol = (config.feasibility_tol.min(config.optimality_tol) * 1e-2).max(1e-12);
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(config.max_iterations.min(u32::MAX as usize) as u32)
        .tol_feas(tol)
        .tol_gap_abs(tol)
        .tol_gap_rel(tol)
        .presolve_enable(false)
        .build()
        .expect("static solver settings are valid");

    let fail = |note: String| RawSolution {
        status: SolveStatus::IterationLimit,
        primal: vec![0.0; n],
        dual: None,
        iterations: 0,
        note: Some(note),
    };
    let mut solver = match DefaultSolver::new(&p, &model.objective, &a, &b, &cones, settings) {
        Ok(s) => s,
        Err(e) => return fail(format!("interior-point setup failed: {e}")),
    };
    solver.solve();
    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
        _ => SolveStatus::IterationLimit,
    };
    let note = (status == SolveStatus::IterationLimit).then(|| format!("interior point stopped: {:?}", sol.status));
    let dual = (status == SolveStatus::Optimal).then(|| {
        let mut y = vec![0.0; model.rows()];
        for ((_, _, origin), z) in conic.rows.iter().zip(&sol.z) {
            if let Origin::Row { row, sign } = *origin {
                y[row] += sign * z;
            }
        }
        y
    });
    RawSolution { status, primal: sol.x.clone(), dual, iterations: sol.iterations as usize, note }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpcore::RowGroup;

    #[test]
    fn duals_follow_the_model_sign_convention() {
        // min x s.t. x ≥ 2 (row), x ≤ 5 (column): y = +1 on the row
        let mut m = LpModel::new(1);
        m.objective = vec![1.0];
        m.col_bounds = vec![(f64::NEG_INFINITY, 5.0)];
        m.add_row(RowGroup::Other, "lo", [(0, 1.0)], 2.0, f64::INFINITY);
        let raw = interior_point(&m, &SolverConfig::default());
        assert_eq!(raw.status, SolveStatus::Optimal);
        assert!((raw.primal[0] - 2.0).abs() < 1e-6);
        assert!((raw.dual.unwrap()[0] - 1.0).abs() < 1e-6);
    }
}
