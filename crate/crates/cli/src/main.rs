use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rpmbm::sim::{FilterMode, ScenarioConfig};
use rpmbm_cli::{run_monte_carlo, run_scenario, run_sweep, CliError, CliResult, RunOptions, SweepParam};

#[derive(Parser)]
#[command(name = "rpmbm", version, about = "PMBM tracking with unknown detection probability: simulation driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter one simulated realization.
    Run(Common),
    /// Monte-Carlo batch over consecutive seeds.
    Mc(Common),
    /// Monte-Carlo batches over a grid of one scenario parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `sigma_eps` or `lambda_c`.
        #[arg(long)]
        sweep_param: String,
        /// Comma-separated grid, e.g. `5,10,15,20,25`.
        #[arg(long, value_delimiter = ',', required = true)]
        sweep_values: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed of a single run, or the first seed of a batch.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// `r-pmbm` or `fixed-pd`.
    #[arg(long, default_value = "r-pmbm")]
    mode: String,
    /// Output file (run) or directory (mc, sweep).
    #[arg(long, env = "RPMBM_OUT_DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for batches; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
    /// Write zero wall times so repeated runs produce identical files.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn load(&self) -> CliResult<(ScenarioConfig, RunOptions)> {
        let cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::default(),
        };
        let mode: FilterMode = self.mode.parse()?;
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        }
        Ok((cfg, RunOptions { mode, timing: !self.no_timing }))
    }
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run(common) => {
            let (cfg, opts) = common.load()?;
            let report = run_scenario(&cfg, common.seed, &opts)?;
            let out = if common.out.extension().is_some() {
                common.out.clone()
            } else {
                std::fs::create_dir_all(&common.out)?;
                common.out.join(format!("run_seed{}.csv", common.seed))
            };
            ensure_parent(&out)?;
            report.save(&out)?;
            let a = report.aggregate;
            println!(
                "seed {}: mean ospa {:.3}, mean |dN| {:.3}, mean p_d {} -> {}",
                report.seed,
                a.mean_ospa,
                a.mean_cardinality_error,
                a.mean_p_d.map_or("n/a".to_string(), |p| format!("{p:.4}")),
                out.display()
            );
        }
        Command::Mc(common) => {
            let (cfg, opts) = common.load()?;
            let mc = run_monte_carlo(&cfg, common.runs, common.seed, &opts)?;
            mc.save(&common.out, "mc")?;
            let a = mc.aggregate;
            println!(
                "{} runs: mean ospa {:.3}, mean |dN| {:.3}, mean p_d {} -> {}",
                mc.runs.len(),
                a.mean_ospa,
                a.mean_cardinality_error,
                a.mean_p_d.map_or("n/a".to_string(), |p| format!("{p:.4}")),
                common.out.display()
            );
        }
        Command::Sweep { common, sweep_param, sweep_values } => {
            let (cfg, opts) = common.load()?;
            let param: SweepParam = sweep_param.parse()?;
            let report = run_sweep(&cfg, param, &sweep_values, common.runs, common.seed, &opts)?;
            report.save(&common.out)?;
            println!("{:>10} {:>10} {:>10} {:>8}", param.name(), "ospa", "|dN|", "p_d");
            for row in &report.rows {
                println!(
                    "{:>10} {:>10.3} {:>10.3} {:>8}",
                    row.value,
                    row.mean_ospa,
                    row.mean_cardinality_error,
                    row.mean_p_d.map_or("n/a".to_string(), |p| format!("{p:.4}"))
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
