use crate::lpcore::LpModel;

use super::RawSolution;

const PASSES: usize = 20;

/// Row and column equilibration factors, all powers of two so scaling is exact.
///
/// The scaled model has entries `r_i·a_ij·c_j` and variables `x'_j = x_j / c_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
}

fn pow2_inv_sqrt(max: f64) -> f64 {
    if max > 0.0 && max.is_finite() {
        2f64.powi((-0.5 * max.log2()).round() as i32)
    } else {
        1.0
    }
}

impl Scaling {
    pub fn identity(model: &LpModel) -> Self {
        Self { row: vec![1.0; model.rows()], col: vec![1.0; model.columns] }
    }

    /// Iterative max-norm equilibration of rows and columns.
    pub fn equilibrate(model: &LpModel) -> Self {
        let mut s = Self::identity(model);
        for _ in 0..PASSES {
            let mut row_max = vec![0.0f64; model.rows()];
            for t in &model.triplets {
                row_max[t.row] = row_max[t.row].max((t.value * s.row[t.row] * s.col[t.col]).abs());
            }
            let mut changed = false;
            for (r, m) in s.row.iter_mut().zip(&row_max) {
                let f = pow2_inv_sqrt(*m);
                changed |= f != 1.0;
                *r *= f;
            }
            let mut col_max = vec![0.0f64; model.columns];
            for t in &model.triplets {
                col_max[t.col] = col_max[t.col].max((t.value * s.row[t.row] * s.col[t.col]).abs());
            }
            for (c, m) in s.col.iter_mut().zip(&col_max) {
                let f = pow2_inv_sqrt(*m);
                changed |= f != 1.0;
                *c *= f;
            }
            if !changed {
                break;
            }
        }
        s
    }

    pub fn apply(&self, model: &LpModel) -> LpModel {
        let mut m = model.clone();
        for t in &mut m.triplets {
            t.value *= self.row[t.row] * self.col[t.col];
        }
        for (b, r) in m.row_bounds.iter_mut().zip(&self.row) {
            *b = (b.0 * r, b.1 * r);
        }
        for ((b, c), cost) in m.col_bounds.iter_mut().zip(&self.col).zip(&mut m.objective) {
            *b = (b.0 / c, b.1 / c);
            *cost *= c;
        }
        m
    }

    pub(crate) fn unscale(&self, mut raw: RawSolution) -> RawSolution {
        for (x, c) in raw.primal.iter_mut().zip(&self.col) {
            *x *= c;
        }
        if let Some(y) = raw.dual.as_mut() {
            for (y, r) in y.iter_mut().zip(&self.row) {
                *y *= r;
            }
        }
        raw
    }

    /// Largest over smallest factor across rows and columns.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .row
            .iter()
            .chain(&self.col)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if lo.is_finite() { hi / lo } else { 1.0 }
    }
}
