use crate::lpcore::{LpModel, Triplet};

/// Copy of `model` with a nonnegative excess and shortfall column on every
/// row, minimising their sum; always feasible when the column bounds are.
///
/// The first `model.columns` columns keep their meaning.
pub fn elastic_relaxation(model: &LpModel) -> LpModel {
    let mut relaxed = model.clone();
    relaxed.index = None;
    relaxed.objective.iter_mut().for_each(|c| *c = 0.0);
    for i in 0..model.rows() {
        let name = &model.row_names[i];
        let up = relaxed.add_column(format!("{name}_up"), 0.0, f64::INFINITY, 1.0);
        let down = relaxed.add_column(format!("{name}_dn"), 0.0, f64::INFINITY, 1.0);
        relaxed.triplets.push(Triplet { row: i, col: up, value: 1.0 });
        relaxed.triplets.push(Triplet { row: i, col: down, value: -1.0 });
    }
    relaxed
}

/// Total slack used by a solution of [`elastic_relaxation`].
pub fn minimum_violation(model: &LpModel, relaxed_primal: &[f64]) -> f64 {
    relaxed_primal[model.columns..].iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpcore::RowGroup;
    use crate::solver::{solve, SolveStatus, SolverConfig};

    #[test]
    fn measures_the_gap() {
        let mut m = LpModel::new(1);
        m.col_bounds = vec![(0.0, 1.0)];
        m.add_row(RowGroup::Other, "need", [(0, 1.0)], 3.0, f64::INFINITY);
        let relaxed = elastic_relaxation(&m);
        let out = solve(&relaxed, &SolverConfig::reference()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((minimum_violation(&m, &out.primal) - 2.0).abs() < 1e-12);
    }
}
