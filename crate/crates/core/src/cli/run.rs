use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;

use crate::lpcore::{build_elastic, build_problem, extract_solution, write_mps, LpModel, SolutionReport};
use crate::scenario::Scenario;
use crate::solver::{
    elastic_relaxation, minimum_violation, solution_csv, solve, verify, SolveOutcome, SolveStatus, SolverConfig,
    VerificationReport,
};

use super::{CliError, Overrides, RunSummary};

/// Everything produced by one solved scenario.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub model: LpModel,
    pub outcome: SolveOutcome,
    pub verification: VerificationReport,
    pub report: SolutionReport,
    /// Seconds spent building the model.
    pub build_time: f64,
}

/// Builds, solves, verifies and extracts.
///
/// An infeasible model is re-solved with relaxed grid caps to say which
/// connection is too small.
pub fn run_scenario(scenario: &Scenario, config: &SolverConfig) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let model = build_problem(scenario)?;
    let build_time = start.elapsed().as_secs_f64();
    info!("built {} columns × {} rows in {build_time:.3} s", model.columns, model.rows());
    let outcome = solve(&model, config)?;
    info!("{:?} backend: {} after {} iterations, {:.3} s", outcome.backend, outcome.status, outcome.iterations, outcome.wall_time);
    match outcome.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(CliError::Infeasible(diagnose(scenario, config)?)),
        status => return Err(CliError::NotSolved { status, diagnostics: outcome.diagnostics.join("; ") }),
    }
    let verification = verify(&model, &outcome, config);
    if !verification.passed() {
        return Err(CliError::Verification(verification.to_string()));
    }
    let report = extract_solution(&model, scenario, &outcome.primal, outcome.objective)?;
    Ok(RunOutput { model, outcome, verification, report, build_time })
}

/// Explains an infeasible scenario: missing grid capacity per airport if that
/// suffices, otherwise the rows a least-violation relaxation has to bend.
pub fn diagnose(scenario: &Scenario, config: &SolverConfig) -> Result<String, CliError> {
    let tol = config.feasibility_tol;
    let elastic = build_elastic(scenario)?;
    let out = solve(&elastic.model, config)?;
    if out.status == SolveStatus::Optimal {
        let short: Vec<String> = elastic
            .excess_columns
            .iter()
            .zip(&scenario.airports)
            .filter(|(&j, _)| out.primal[j] > tol)
            .map(|(&j, a)| format!("{} needs {:.6} MW above its {} MW grid cap", a.code, out.primal[j], a.grid_cap_mw))
            .collect();
        if !short.is_empty() {
            return Ok(short.join("; "));
        }
    }
    let relaxed = elastic_relaxation(&build_problem(scenario)?);
    let out = solve(&relaxed, config)?;
    if out.status != SolveStatus::Optimal {
        return Ok(format!("infeasible even with every row relaxed ({})", out.status));
    }
    let base = relaxed.columns - 2 * relaxed.rows();
    let mut bent: Vec<(f64, &str)> = (base..relaxed.columns)
        .filter(|&j| out.primal[j] > tol)
        .map(|j| (out.primal[j], relaxed.col_names[j].as_str()))
        .collect();
    bent.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    let listed: Vec<String> = bent.iter().take(10).map(|(v, n)| format!("{n} by {v:.6}")).collect();
    let total = minimum_violation(&build_problem(scenario)?, &out.primal);
    Ok(format!("grid caps are not the cause; least total violation {total:.6}: {}", listed.join(", ")))
}

fn write(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
    written.push(path);
    Ok(())
}

/// Writes the summary and every trajectory table; returns the files written.
pub fn write_outputs(
    dir: &Path,
    scenario: &Scenario,
    run: &RunOutput,
    overrides: &Overrides,
    with_mps: bool,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    let mut written = Vec::new();
    let summary = RunSummary::from_run(scenario, run, overrides);
    write(dir, "summary.csv", &summary.to_csv(), &mut written)?;
    let r = &run.report;

    for a in &r.airports {
        let mut s = String::from("step,P_gr,P_c,P_a\n");
        for k in 0..scenario.steps {
            let _ = writeln!(s, "{k},{},{},{}", a.grid[k], a.fleet[k], a.apron[k]);
        }
        write(dir, &format!("power_{}.csv", a.code), &s, &mut written)?;
    }
    for t in &r.aircraft {
        let mut s = String::from("step,E_b,P_b,airport\n");
        for k in 0..=scenario.steps {
            let power = t.power.get(k).map_or(String::new(), f64::to_string);
            let at = t.location.get(k).copied().flatten().map_or("", |h| scenario.airports[h].code.as_str());
            let _ = writeln!(s, "{k},{},{power},{at}", t.energy[k]);
        }
        write(dir, &format!("aircraft_{}.csv", t.aircraft_id), &s, &mut written)?;
    }
    for (f, site) in r.fleets.iter().zip(&scenario.fleets) {
        let code = &scenario.airports[f.airport].code;
        let mut s = String::from("step,bucket,x_c,x_i,x_d\n");
        for (k, st) in f.states.states.iter().enumerate() {
            for b in 0..st.buckets() {
                let _ = writeln!(s, "{k},{},{},{},{}", b + 1, st.charging[b], st.idle[b], st.discharging[b]);
            }
        }
        write(dir, &format!("fleet_{code}.csv"), &s, &mut written)?;
        write(dir, &format!("stream_{code}.csv"), &site.stream.to_csv(), &mut written)?;
    }
    write(dir, "solution.csv", &solution_csv(&run.model, &run.outcome.primal), &mut written)?;
    write(dir, "verification.txt", &run.verification.to_string(), &mut written)?;
    if with_mps {
        write(dir, "model.mps", &write_mps(&run.model, "APRONV2G"), &mut written)?;
    }
    Ok(written)
}
