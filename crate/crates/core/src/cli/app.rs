use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use crate::solver::{Backend, SolverConfig};

use super::{
    compare, emit_plots, hub_network, run_scenario, write_inputs, write_outputs, CliError, Overrides, ReportData,
    RunSummary, ScenarioInputs,
};

#[derive(Debug, Parser)]
#[command(name = "apron-v2g", version, about = "Grid-cost-optimal charging of electric aircraft with landside V2G fleets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Reference,
    External,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// LP backend; the reference simplex only suits small models.
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        let mut c = SolverConfig { feasibility_tol: self.tol, optimality_tol: self.tol, ..SolverConfig::default() };
        match self.backend {
            Some(BackendArg::Reference) => c.backend = Backend::Reference,
            Some(BackendArg::External) => c.backend = Backend::External,
            None => {}
        }
        c
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one scenario and write its report directory.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Charger count at every occupancy site.
        #[arg(long)]
        chargers: Option<u32>,
        /// Grid connection limit at every airport [MW].
        #[arg(long = "grid-cap")]
        grid_cap: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Also write the model as free MPS.
        #[arg(long)]
        mps: bool,
        /// Also render the charts.
        #[arg(long)]
        plots: bool,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Cost savings, energy shift and peak changes of variants against a baseline.
    Compare {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        variant: Vec<PathBuf>,
        /// Directory for the comparison tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG charts from a report directory.
    Plot {
        #[arg(long)]
        report: PathBuf,
        /// Defaults to the report directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Baseline without chargers against a V2G variant for several scenarios.
    Batch {
        #[arg(long, required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
        /// Chargers in the V2G variant; defaults to the scenario's own.
        #[arg(long)]
        chargers: Option<u32>,
        #[arg(long, default_value = "batch")]
        out: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write the synthetic hub-and-spoke scenario.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3000)]
        chargers: u32,
    },
}

/// Solves one scenario into `out`; returns its summary.
pub fn run_to_dir(
    scenario_path: &Path,
    overrides: &Overrides,
    out: &Path,
    config: &SolverConfig,
    mps: bool,
    plots: bool,
) -> Result<RunSummary, CliError> {
    let scenario = ScenarioInputs::load(scenario_path)?.assemble(overrides)?;
    let run = run_scenario(&scenario, config)?;
    write_outputs(out, &scenario, &run, overrides, mps)?;
    if plots {
        emit_plots(&ReportData::load(out)?, out)?;
    }
    RunSummary::load(out)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, chargers, grid_cap, seed, out, mps, plots, solve } => {
            let overrides = Overrides { chargers, grid_cap_mw: grid_cap, seed };
            let s = run_to_dir(&scenario, &overrides, &out, &solve.config(), mps, plots)?;
            println!("{}: cost {} ({} via {}), report in {}", scenario.display(), s.objective, s.status, s.backend, out.display());
        }
        Command::Compare { baseline, variant, out } => {
            let base = RunSummary::load(&baseline)?;
            let variants = variant
                .iter()
                .map(|d| Ok((d.display().to_string(), RunSummary::load(d)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let report = compare((&baseline.display().to_string(), &base), &variants)?;
            print!("{report}");
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| CliError::Io { path: dir.clone(), source: e })?;
                for (name, text) in [
                    ("comparison.csv", report.costs_csv()),
                    ("energy_shift.csv", report.energy_csv()),
                    ("peaks.csv", report.peaks_csv()),
                ] {
                    let path = dir.join(name);
                    std::fs::write(&path, text).map_err(|e| CliError::Io { path, source: e })?;
                }
            }
        }
        Command::Plot { report, out } => {
            let files = emit_plots(&ReportData::load(&report)?, out.as_deref().unwrap_or(&report))?;
            for f in files {
                println!("{}", f.display());
            }
        }
        Command::Batch { scenario, chargers, out, solve } => {
            let config = solve.config();
            let mut rows = String::from("scenario,baseline_cost,v2g_cost,savings\n");
            let mut total = 0.0;
            for path in &scenario {
                let stem = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
                let dir = out.join(&stem);
                let base = Overrides { chargers: Some(0), ..Overrides::default() };
                let variant = Overrides { chargers, ..Overrides::default() };
                let b = run_to_dir(path, &base, &dir.join("baseline"), &config, false, false)?;
                let v = run_to_dir(path, &variant, &dir.join("v2g"), &config, false, false)?;
                let report = compare(("baseline", &b), &[("v2g".into(), v)])?;
                let saved = report.variants[0].savings;
                info!("{stem}: savings {:.2} %", 100.0 * saved);
                total += saved;
                rows += &format!("{stem},{},{},{saved}\n", b.objective, report.variants[0].cost);
            }
            let mean = total / scenario.len() as f64;
            rows += &format!("mean,,,{mean}\n");
            let path = out.join("batch.csv");
            std::fs::write(&path, &rows).map_err(|e| CliError::Io { path, source: e })?;
            println!("mean savings over {} scenarios: {:.2} %", scenario.len(), 100.0 * mean);
        }
        Command::Generate { out, seed, chargers } => {
            for f in write_inputs(&out, &hub_network(seed, chargers))? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and maps errors to exit codes:
/// 1 for input and I/O errors, 3 for an infeasible scenario, 4 for any
/// other unsolved or unverified model.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Infeasible(_) => 3,
                CliError::NotSolved { .. } | CliError::Verification(_) => 4,
                _ => 1,
            })
        }
    }
}
