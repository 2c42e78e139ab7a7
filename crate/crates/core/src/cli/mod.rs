//! Scenario files, the solve pipeline, reports, comparisons and charts.

mod app;
mod compare;
mod config;
mod generate;
mod plot;
mod prices;
mod run;
mod summary;

pub use app::{main_with, run_to_dir, Cli, Command};
pub use compare::{compare, ComparisonReport, EnergyShift, PeakDelta, VariantCost};
pub use config::{
    parse_config, AirportsConfig, HorizonConfig, OccupancyConfig, Overrides, PolicyConfig, ScenarioConfig,
    ScenarioInputs,
};
pub use generate::{hub_network, write_inputs, HUB_SPOKES, HUB_WAVES};
pub use plot::{aircraft_svg, emit_plots, fleet_svg, power_svg, series_values, ReportData};
pub use prices::{parse_prices, prices_csv, PRICE_HEADER};
pub use run::{diagnose, run_scenario, write_outputs, RunOutput};
pub use summary::{AirportSummary, RunSummary};

use std::path::PathBuf;

use thiserror::Error;

use crate::lpcore::{BuildError, ExtractError};
use crate::scenario::ScenarioError;
use crate::schedule::ScheduleError;
use crate::solver::{SolveError, SolveStatus};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario config: {0}")]
    Config(String),
    #[error("{table} table: {source}")]
    Table {
        table: &'static str,
        #[source]
        source: ScheduleError,
    },
    #[error("prices line {line}: {message}")]
    Prices { line: u64, message: String },
    #[error("incomplete prices: {0}")]
    PriceGaps(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("not solved ({status}): {diagnostics}")]
    NotSolved { status: SolveStatus, diagnostics: String },
    #[error("solution failed verification:\n{0}")]
    Verification(String),
    #[error("report: {0}")]
    Report(String),
    #[error("compare: {0}")]
    Compare(String),
}
