use std::fs::{self, File};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rpmbm::metrics::ospa;
use rpmbm::sim::{generate_measurements, generate_truth, FilterMode, ScenarioConfig};
use rpmbm::Posterior;

use crate::error::{CliError, CliResult};
use crate::report::{average_series, long_format, write_rows, Aggregate, RunReport, RunSummary, ScanRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: FilterMode,
    /// Record per-scan wall time. Off gives byte-identical reports.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { mode: FilterMode::RPmbm, timing: true }
    }
}

/// Simulate one scenario realization and filter it.
pub fn run_scenario(cfg: &ScenarioConfig, seed: u64, opts: &RunOptions) -> CliResult<RunReport> {
    cfg.validate()?;
    let filter = cfg.build_filter::<f64>(opts.mode)?;
    let truth = generate_truth(cfg, seed);
    let scans = generate_measurements(&truth, cfg, seed);
    let (c, p) = (cfg.filter.ospa_c, cfg.filter.ospa_p);
    let mut post = Posterior::initial();
    let mut records = Vec::with_capacity(scans.len());
    for (k, scan) in scans.iter().enumerate() {
        let start = Instant::now();
        post = filter.step(&post, &scan.observations())?;
        let est = filter.estimate(&post);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let positions: Vec<DVector<f64>> = est.states.iter().map(|(_, x)| x.rows(0, 2).into_owned()).collect();
        records.push(ScanRecord {
            scan: k as u32 + 1,
            ospa: ospa(&positions, &truth.positions(k), c, p)?,
            truth_count: truth.cardinality(k) as f64,
            estimated_count: est.cardinality_count as f64,
            expected_cardinality: est.cardinality_expected,
            p_d_estimate: est.p_d_estimate,
            wall_time_ms: if opts.timing { elapsed } else { 0.0 },
        });
    }
    Ok(RunReport::new(seed, records, cfg.filter.pd_window))
}

/// Load `cfg_path`, run one seed and write the per-scan records to `out_path`.
pub fn run_single(cfg_path: &Path, seed: u64, opts: &RunOptions, out_path: &Path) -> CliResult<RunReport> {
    let cfg = ScenarioConfig::load(cfg_path)?;
    let report = run_scenario(&cfg, seed, opts)?;
    report.save(out_path)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    /// Individual runs, sorted by seed.
    pub runs: Vec<RunReport>,
    /// Pointwise mean of the runs' series.
    pub mean: RunReport,
    /// Mean of the per-run aggregates.
    pub aggregate: Aggregate,
}

impl MonteCarloReport {
    pub fn from_runs(mut runs: Vec<RunReport>, pd_window: [u32; 2]) -> Self {
        runs.sort_by_key(|r| r.seed);
        let seed = runs.first().map_or(0, |r| r.seed);
        let mean = RunReport::new(seed, average_series(&runs), pd_window);
        let n = runs.len().max(1) as f64;
        let pd: Vec<f64> = runs.iter().filter_map(|r| r.aggregate.mean_p_d).collect();
        let aggregate = Aggregate {
            mean_ospa: runs.iter().map(|r| r.aggregate.mean_ospa).sum::<f64>() / n,
            mean_cardinality_error: runs.iter().map(|r| r.aggregate.mean_cardinality_error).sum::<f64>() / n,
            mean_p_d: (!pd.is_empty()).then(|| pd.iter().sum::<f64>() / pd.len() as f64),
        };
        Self { runs, mean, aggregate }
    }

    pub fn summaries(&self) -> Vec<RunSummary> {
        self.runs.iter().map(RunSummary::from).collect()
    }

    /// Averaged series, per-run table, long-format series and one metrics
    /// file per run, all prefixed with `experiment`.
    pub fn save(&self, dir: &Path, experiment: &str) -> CliResult<()> {
        fs::create_dir_all(dir.join("runs"))?;
        self.mean.save(&dir.join(format!("{experiment}_series.csv")))?;
        write_rows(&self.summaries(), File::create(dir.join(format!("{experiment}_runs.csv")))?)?;
        write_rows(&long_format(experiment, &self.mean.records), File::create(dir.join(format!("{experiment}_long.csv")))?)?;
        for r in &self.runs {
            r.save(&dir.join("runs").join(format!("{experiment}_seed{}.csv", r.seed)))?;
        }
        Ok(())
    }
}

/// Runs seeds `base_seed .. base_seed + n_runs` on the current rayon pool.
pub fn run_monte_carlo(cfg: &ScenarioConfig, n_runs: usize, base_seed: u64, opts: &RunOptions) -> CliResult<MonteCarloReport> {
    if n_runs == 0 {
        return Err(CliError::Config("need at least one run".into()));
    }
    cfg.validate()?;
    let runs = (0..n_runs as u64)
        .into_par_iter()
        .map(|i| run_scenario(cfg, base_seed + i, opts))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(MonteCarloReport::from_runs(runs, cfg.filter.pd_window))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    SigmaEps,
    LambdaC,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::SigmaEps => "sigma_eps",
            SweepParam::LambdaC => "lambda_c",
        }
    }

    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut cfg = cfg.clone();
        match self {
            SweepParam::SigmaEps => cfg.sigma_eps = value,
            SweepParam::LambdaC => cfg.lambda_c = value,
        }
        cfg
    }
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "sigma_eps" => Ok(SweepParam::SigmaEps),
            "lambda_c" => Ok(SweepParam::LambdaC),
            other => Err(CliError::Config(format!("unknown sweep parameter `{other}` (expected sigma_eps or lambda_c)"))),
        }
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub runs: usize,
    pub mean_ospa: f64,
    pub mean_cardinality_error: f64,
    pub mean_p_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    pub cells: Vec<MonteCarloReport>,
}

impl SweepReport {
    pub fn save(&self, dir: &Path) -> CliResult<()> {
        fs::create_dir_all(dir)?;
        let name = self.param.name();
        write_rows(&self.rows, File::create(dir.join(format!("sweep_{name}.csv")))?)?;
        let long: Vec<_> = self
            .rows
            .iter()
            .zip(&self.cells)
            .flat_map(|(row, cell)| long_format(&format!("{name}={}", row.value), &cell.mean.records))
            .collect();
        write_rows(&long, File::create(dir.join(format!("sweep_{name}_long.csv")))?)?;
        Ok(())
    }
}

/// Monte-Carlo runs at every value of one parameter, same seeds per cell.
pub fn run_sweep(
    cfg: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
    n_runs: usize,
    base_seed: u64,
    opts: &RunOptions,
) -> CliResult<SweepReport> {
    let mut rows = Vec::with_capacity(values.len());
    let mut cells = Vec::with_capacity(values.len());
    for &value in values {
        let cell_cfg = param.apply(cfg, value);
        let mc = run_monte_carlo(&cell_cfg, n_runs, base_seed, opts)?;
        rows.push(SweepRow {
            param: param.name().to_string(),
            value,
            runs: n_runs,
            mean_ospa: mc.aggregate.mean_ospa,
            mean_cardinality_error: mc.aggregate.mean_cardinality_error,
            mean_p_d: mc.aggregate.mean_p_d,
        });
        cells.push(mc);
    }
    Ok(SweepReport { param, rows, cells })
}
