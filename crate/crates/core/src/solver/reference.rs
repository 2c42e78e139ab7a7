//! Dense bounded-variable primal simplex with Bland's rule.
//!
//! Every row gets a slack `s_i = a_iᵀx` carrying the row bounds, so the
//! system is `Ax - s = 0` over bounded variables. Rows whose slack starts
//! outside its bounds get an artificial; phase 1 drives the artificials to
//! zero, phase 2 optimises the real cost with artificials fixed at zero.
//! Entering and leaving choices always take the smallest eligible index,
//! which rules out cycling.

use std::time::Instant;

use crate::lpcore::LpModel;

use super::{RawSolution, SolveError, SolveOutcome, SolveStatus, SolverConfig};

pub const REFERENCE_MAX_COLUMNS: usize = 5000;

/// Pivot elements below this magnitude are treated as zero.
const PIVOT_TOL: f64 = 1e-9;
/// Bound relaxation used to widen ties in the ratio test.
const HARRIS_TOL: f64 = 1e-9;

/// Solves without scaling or post-processing.
pub fn reference_solve(model: &LpModel, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    config.validate()?;
    model.well_formed().map_err(SolveError::Malformed)?;
    if model.columns > REFERENCE_MAX_COLUMNS {
        return Err(SolveError::TooLarge { columns: model.columns, limit: REFERENCE_MAX_COLUMNS });
    }
    let start = Instant::now();
    let raw = simplex(model, config)?;
    let objective = model.objective_value(&raw.primal);
    Ok(SolveOutcome {
        status: raw.status,
        primal: raw.primal,
        dual: raw.dual,
        objective,
        iterations: raw.iterations,
        wall_time: start.elapsed().as_secs_f64(),
        backend: super::Backend::Reference,
        scaling: None,
        diagnostics: raw.note.into_iter().collect(),
    })
}

/// Pivots between refactorisations of the tableau from the original rows.
const REFRESH: usize = 100;

struct Tableau {
    rows: usize,
    width: usize,
    /// `B⁻¹[A | -I | artificials]`, row-major.
    t: Vec<f64>,
    /// `[A | -I | artificials]` as built.
    original: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

enum Phase {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.width..(i + 1) * self.width]
    }

    fn price(&mut self) {
        self.reduced.copy_from_slice(&self.cost);
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let (t, w) = (&self.t, self.width);
                for (d, a) in self.reduced.iter_mut().zip(&t[i * w..(i + 1) * w]) {
                    *d -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    /// Smallest-index nonbasic variable whose move improves the objective, with its direction.
    fn entering(&self, tol: f64, allowed: usize) -> Option<(usize, f64)> {
        (0..allowed).find_map(|j| {
            if self.is_basic[j] || self.lower[j] == self.upper[j] {
                return None;
            }
            let d = self.reduced[j];
            if d < -tol && self.value[j] < self.upper[j] {
                Some((j, 1.0))
            } else if d > tol && self.value[j] > self.lower[j] {
                Some((j, -1.0))
            } else {
                None
            }
        })
    }

    /// Rebuilds `B⁻¹[A | -I | artificials]` by Gauss-Jordan elimination on the
    /// original rows with partial pivoting, then recomputes basic values and
    /// reduced costs. Returns false if the basis is numerically singular.
    fn refactor(&mut self) -> bool {
        self.t.copy_from_slice(&self.original);
        let basis = self.basis.clone();
        let mut assigned = vec![false; self.rows];
        let mut new_basis = vec![usize::MAX; self.rows];
        for &v in &basis {
            let mut best = None;
            let mut best_abs = 1e-11;
            for i in (0..self.rows).filter(|&i| !assigned[i]) {
                let a = self.t[i * self.width + v].abs();
                if a > best_abs {
                    best_abs = a;
                    best = Some(i);
                }
            }
            let Some(r) = best else { return false };
            assigned[r] = true;
            new_basis[r] = v;
            self.eliminate(r, v);
        }
        self.basis = new_basis;
        for i in 0..self.rows {
            let row = self.row(i);
            let xb: f64 = -(0..self.width)
                .filter(|&j| !self.is_basic[j] && row[j] != 0.0)
                .map(|j| row[j] * self.value[j])
                .sum::<f64>();
            self.value[self.basis[i]] = xb;
        }
        self.price();
        true
    }

    /// Scales row `r` to a unit pivot on column `q` and clears `q` from every other row.
    fn eliminate(&mut self, r: usize, q: usize) -> (Vec<usize>, Vec<f64>) {
        let w = self.width;
        let p = self.t[r * w + q];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        self.t[r * w + q] = 1.0;
        let nz: Vec<usize> = (0..w).filter(|&j| self.t[r * w + j] != 0.0).collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&j| self.t[r * w + j]).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (&j, &v) in nz.iter().zip(&pivot_row) {
                row[j] -= f * v;
            }
            row[q] = 0.0;
        }
        (nz, pivot_row)
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let (nz, pivot_row) = self.eliminate(r, q);
        let dq = self.reduced[q];
        if dq != 0.0 {
            for (&j, &v) in nz.iter().zip(&pivot_row) {
                self.reduced[j] -= dq * v;
            }
            self.reduced[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    fn run(&mut self, tol: f64, allowed: usize) -> Phase {
        loop {
            if self.iterations >= self.max_iterations {
                return Phase::IterationLimit;
            }
            if self.iterations % REFRESH == 0 && self.iterations > 0 && !self.refactor() {
                return Phase::IterationLimit;
            }
            let Some((q, dir)) = self.entering(tol, allowed) else {
                return Phase::Optimal;
            };
            self.iterations += 1;

            let flip = self.upper[q] - self.lower[q];
            // two-pass ratio test: bounds relaxed by HARRIS_TOL give the step
            // ceiling, then the largest pivot among rows under it leaves
            let limits: Vec<(usize, f64, f64, bool)> = (0..self.rows)
                .filter_map(|i| {
                    let alpha = self.t[i * self.width + q];
                    if alpha.abs() <= PIVOT_TOL {
                        return None;
                    }
                    let bv = self.basis[i];
                    let rate = -dir * alpha;
                    if rate < 0.0 {
                        let l = self.lower[bv];
                        l.is_finite().then(|| (i, (self.value[bv] - l) / -rate, HARRIS_TOL / -rate, false))
                    } else {
                        let u = self.upper[bv];
                        u.is_finite().then(|| (i, (u - self.value[bv]) / rate, HARRIS_TOL / rate, true))
                    }
                })
                .collect();
            let ceiling = limits.iter().map(|&(_, t, slack, _)| t + slack).fold(f64::INFINITY, f64::min);
            let mut best: Option<(f64, usize, usize, bool)> = None;
            let mut best_alpha = 0.0;
            for &(i, t, _, to_upper) in &limits {
                if t > ceiling {
                    continue;
                }
                let alpha = self.t[i * self.width + q].abs();
                let bv = self.basis[i];
                let better = match best {
                    None => true,
                    Some((_, _, b, _)) => alpha > best_alpha || (alpha == best_alpha && bv < b),
                };
                if better {
                    best = Some((t.max(0.0), i, bv, to_upper));
                    best_alpha = alpha;
                }
            }

            let step = match best {
                Some((t, ..)) if t < flip => t,
                _ if flip.is_finite() => flip,
                _ => return Phase::Unbounded,
            };
            if step != 0.0 {
                self.value[q] += dir * step;
                for i in 0..self.rows {
                    let alpha = self.t[i * self.width + q];
                    if alpha != 0.0 {
                        self.value[self.basis[i]] -= dir * alpha * step;
                    }
                }
            }
            match best {
                Some((t, r, bv, to_upper)) if t < flip => {
                    self.value[bv] = if to_upper { self.upper[bv] } else { self.lower[bv] };
                    self.pivot(r, q);
                }
                _ => {
                    self.value[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
            }
        }
    }
}

fn start_value(l: f64, u: f64) -> f64 {
    if l.is_finite() {
        l
    } else if u.is_finite() {
        u
    } else {
        0.0
    }
}

pub(crate) fn simplex(model: &LpModel, config: &SolverConfig) -> Result<RawSolution, SolveError> {
    let (n, m) = (model.columns, model.rows());
    let x0: Vec<f64> = model.col_bounds.iter().map(|&(l, u)| start_value(l, u)).collect();
    let activity = model.activities(&x0);

    // rows whose slack cannot start inside its bounds need an artificial
    let mut artificial = vec![None; m];
    let mut slack_start = vec![0.0; m];
    let mut na = 0;
    for i in 0..m {
        let (l, u) = model.row_bounds[i];
        let a = activity[i];
        if a >= l && a <= u {
            slack_start[i] = a;
        } else {
            let s = if a < l { l } else { u };
            slack_start[i] = s;
            artificial[i] = Some((n + m + na, if s - a > 0.0 { 1.0 } else { -1.0 }));
            na += 1;
        }
    }
    let width = n + m + na;
    let mut tab = Tableau {
        rows: m,
        width,
        t: vec![0.0; m * width],
        original: Vec::new(),
        lower: Vec::with_capacity(width),
        upper: Vec::with_capacity(width),
        value: vec![0.0; width],
        basis: vec![0; m],
        is_basic: vec![false; width],
        cost: vec![0.0; width],
        reduced: vec![0.0; width],
        iterations: 0,
        max_iterations: config.max_iterations,
    };
    for &(l, u) in &model.col_bounds {
        tab.lower.push(l);
        tab.upper.push(u);
    }
    for &(l, u) in &model.row_bounds {
        tab.lower.push(l);
        tab.upper.push(u);
    }
    tab.lower.extend(std::iter::repeat(0.0).take(na));
    tab.upper.extend(std::iter::repeat(f64::INFINITY).take(na));
    tab.value[..n].copy_from_slice(&x0);

    for t in &model.triplets {
        tab.t[t.row * width + t.col] += t.value;
    }
    for i in 0..m {
        tab.t[i * width + n + i] = -1.0;
        if let Some((a, sigma)) = artificial[i] {
            tab.t[i * width + a] = sigma;
        }
    }
    tab.original = tab.t.clone();
    for i in 0..m {
        let row = &mut tab.t[i * width..(i + 1) * width];
        match artificial[i] {
            None => {
                // basic slack with column -e_i: negate the row
                row.iter_mut().for_each(|v| *v = -*v);
                tab.basis[i] = n + i;
                tab.value[n + i] = slack_start[i];
            }
            Some((a, sigma)) => {
                if sigma < 0.0 {
                    row.iter_mut().for_each(|v| *v = -*v);
                }
                tab.basis[i] = a;
                tab.value[n + i] = slack_start[i];
                tab.value[a] = (slack_start[i] - activity[i]).abs();
            }
        }
        tab.is_basic[tab.basis[i]] = true;
    }

    let tol = config.optimality_tol * 1e-3;
    if na > 0 {
        tab.cost[n + m..].iter_mut().for_each(|c| *c = 1.0);
        tab.price();
        match tab.run(tol, width) {
            Phase::Optimal => {}
            Phase::IterationLimit => return Ok(limit_hit(&tab, n, m)),
            Phase::Unbounded => {
                let mut raw = limit_hit(&tab, n, m);
                raw.note = Some("phase 1 reported an unbounded ray; numerical breakdown".into());
                return Ok(raw);
            }
        }
        let infeasibility: f64 = tab.value[n + m..].iter().sum();
        if infeasibility > config.feasibility_tol {
            return Ok(RawSolution {
                status: SolveStatus::Infeasible,
                primal: tab.value[..n].to_vec(),
                dual: None,
                iterations: tab.iterations,
                note: Some(format!("phase 1 ended with artificial sum {infeasibility:e}")),
            });
        }
        for a in n + m..width {
            tab.lower[a] = 0.0;
            tab.upper[a] = 0.0;
            tab.value[a] = 0.0;
            tab.cost[a] = 0.0;
        }
        for r in 0..m {
            if tab.basis[r] >= n + m {
                if let Some(q) = (0..n + m).find(|&j| !tab.is_basic[j] && tab.row(r)[j].abs() > PIVOT_TOL) {
                    tab.pivot(r, q);
                }
            }
        }
    }

    tab.cost[..n].copy_from_slice(&model.objective);
    tab.price();
    let status = match tab.run(tol, n + m) {
        Phase::Optimal => SolveStatus::Optimal,
        Phase::Unbounded => SolveStatus::Unbounded,
        Phase::IterationLimit => return Ok(limit_hit(&tab, n, m)),
    };
    Ok(RawSolution {
        status,
        primal: tab.value[..n].to_vec(),
        dual: (status == SolveStatus::Optimal).then(|| tab.reduced[n..n + m].to_vec()),
        iterations: tab.iterations,
        note: None,
    })
}

fn limit_hit(tab: &Tableau, n: usize, _m: usize) -> RawSolution {
    RawSolution {
        status: SolveStatus::IterationLimit,
        primal: tab.value[..n].to_vec(),
        dual: None,
        iterations: tab.iterations,
        note: Some(format!("stopped after {} pivots", tab.iterations)),
    }
}
