//! Experiment driver for the `rpmbm` tracker: single runs, Monte-Carlo
//! batches and parameter sweeps, written out as comma-separated tables.

mod error;
mod experiment;
mod report;

pub use error::{CliError, CliResult};
pub use experiment::{
    run_monte_carlo, run_scenario, run_single, run_sweep, MonteCarloReport, RunOptions, SweepParam, SweepReport,
    SweepRow,
};
pub use report::{average_series, long_format, read_records, Aggregate, RunReport, RunSummary, ScanRecord, SeriesRow};
