//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails.
//!
//! `RPMBM_SWEEP_RUNS` sets the runs per sweep cell (default 20).

#[path = "acceptance/assignment.rs"]
mod assignment;
#[path = "acceptance/degenerate.rs"]
mod degenerate;
#[path = "acceptance/invariants.rs"]
mod invariants;
#[path = "acceptance/oracle.rs"]
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rpmbm::sim::{FilterMode, ScenarioConfig};
use rpmbm_cli::{run_monte_carlo, MonteCarloReport, RunOptions, SweepParam};

const CASE_RUNS: usize = 100;
const BASE_SEED: u64 = 1;
const GRID: [f64; 5] = [5.0, 10.0, 15.0, 20.0, 25.0];

type Outcome = Result<String, String>;

struct Suite {
    failed: usize,
}

impl Suite {
    fn report(&mut self, id: u32, name: &str, started: Instant, outcome: Outcome) {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id}. {name}: {detail} ({secs:.1} s)"),
            Err(detail) => {
                self.failed += 1;
                println!("[FAIL] {id}. {name}: {detail} ({secs:.1} s)");
            }
        }
    }

    fn check(&mut self, id: u32, name: &str, f: impl FnOnce() -> Outcome) {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        self.report(id, name, started, outcome);
    }
}

fn config(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn opts() -> RunOptions {
    RunOptions { mode: FilterMode::RPmbm, timing: false }
}

fn within(value: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&value)
}

/// Ranks with ties sharing their mean rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        for &k in &order[i..=j] {
            out[k] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    out
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let (mut sxx, mut syy) = (0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

struct Case {
    cfg: ScenarioConfig,
    p_d: f64,
    mc: Option<MonteCarloReport>,
}

/// Mean OSPA of each grid cell over seeds `BASE_SEED..BASE_SEED + runs`. The
/// nominal cell reuses the first runs of the headline batch.
fn sweep(case: &Case, param: SweepParam, runs: usize) -> Result<Vec<f64>, String> {
    GRID.iter()
        .map(|&v| {
            let cell = param.apply(&case.cfg, v);
            match &case.mc {
                Some(mc) if cell == case.cfg && runs <= mc.runs.len() => {
                    let first = mc.runs.iter().filter(|r| r.seed < BASE_SEED + runs as u64).cloned().collect();
                    Ok(MonteCarloReport::from_runs(first, case.cfg.filter.pd_window).aggregate.mean_ospa)
                }
                _ => run_monte_carlo(&cell, runs, BASE_SEED, &opts()).map(|m| m.aggregate.mean_ospa).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

fn main() -> ExitCode {
    let mut suite = Suite { failed: 0 };
    let sweep_runs: usize = std::env::var("RPMBM_SWEEP_RUNS").ok().and_then(|s| s.parse().ok()).unwrap_or(20);

    suite.check(5, "k-best assignment oracle", || assignment::check(1000));
    suite.check(6, "hypothesis weight oracle", || oracle::check(300));
    suite.check(7, "degenerate Beta reduction", degenerate::check);
    suite.check(8, "invariant suite", invariants::check);

    let mut cases = vec![
        Case { cfg: config("case1.toml"), p_d: 0.95, mc: None },
        Case { cfg: config("case2.toml"), p_d: 0.65, mc: None },
    ];
    for (case, (id, lo, hi)) in cases.iter_mut().zip([(1, 9.0, 17.0), (2, 14.0, 27.0)]) {
        let name = format!("headline OSPA, p_D = {}", case.p_d);
        let mut mc = None;
        suite.check(id, &name, || {
            let m = run_monte_carlo(&case.cfg, CASE_RUNS, BASE_SEED, &opts()).map_err(|e| e.to_string())?;
            let ospa = m.aggregate.mean_ospa;
            let detail = format!("{CASE_RUNS} runs, mean OSPA {ospa:.2} m, target [{lo}, {hi}]");
            mc = Some(m);
            if within(ospa, lo, hi) {
                Ok(detail)
            } else {
                Err(detail)
            }
        });
        case.mc = mc;
    }

    let started = Instant::now();
    let outcome = (|| {
        let mut parts = Vec::new();
        let mut ok = true;
        for case in &cases {
            let mc = case.mc.as_ref().ok_or("headline batch did not complete")?;
            let p = mc.aggregate.mean_p_d.ok_or("no detection-probability estimate in scans 30-60")?;
            ok &= (p - case.p_d).abs() <= 0.05;
            parts.push(format!("p_D {} -> {p:.4}", case.p_d));
        }
        let detail = parts.join(", ") + " (tolerance 0.05)";
        if ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    })();
    suite.report(3, "detection probability estimate", started, outcome);

    suite.check(4, "monotone degradation", || {
        let mut parts = Vec::new();
        let mut ok = true;
        for case in &cases {
            for param in [SweepParam::SigmaEps, SweepParam::LambdaC] {
                let ospa = sweep(case, param, sweep_runs)?;
                let rho = spearman(&GRID, &ospa);
                ok &= rho > 0.9;
                let cells: Vec<String> = ospa.iter().map(|o| format!("{o:.2}")).collect();
                parts.push(format!("p_D {} {}: rho {rho:.2} [{}]", case.p_d, param.name(), cells.join(" ")));
            }
        }
        let detail = format!("{sweep_runs} runs per cell; {}", parts.join("; "));
        if ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });

    if suite.failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 8 criteria failed", suite.failed);
        ExitCode::FAILURE
    }
}
