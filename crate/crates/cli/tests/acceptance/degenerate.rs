use rpmbm::distributions::BetaParams;
use rpmbm::pmbm::PmbmPosterior;
use rpmbm::sim::{generate_measurements, generate_truth, FilterMode, ScenarioConfig};

fn scenario(p_d: f64) -> Result<ScenarioConfig, String> {
    let beta = BetaParams::<f64>::from_moments(p_d, 1e-6).map_err(|e| e.to_string())?;
    let mut cfg = ScenarioConfig::default();
    cfg.duration = 10;
    cfg.lambda_c = 0.0;
    cfg.p_d_true = p_d;
    cfg.object_schedule = vec![(1, 11, 2)];
    cfg.birth_beta = [beta.s(), beta.t()];
    cfg.filter.k_beta = 1.0;
    Ok(cfg)
}

fn disagreement(cfg: &ScenarioConfig, seed: u64) -> Result<f64, String> {
    let truth = generate_truth(cfg, seed);
    let scans = generate_measurements(&truth, cfg, seed);
    let beta = cfg.build_filter::<f64>(FilterMode::RPmbm).map_err(|e| e.to_string())?;
    let fixed = cfg.build_filter::<f64>(FilterMode::FixedPd).map_err(|e| e.to_string())?;
    let (mut a, mut b) = (PmbmPosterior::initial(), PmbmPosterior::initial());
    let mut worst = 0.0f64;
    for (k, scan) in scans.iter().enumerate() {
        let z = scan.observations::<f64>();
        a = beta.step(&a, &z).map_err(|e| e.to_string())?;
        b = fixed.step(&b, &z).map_err(|e| e.to_string())?;
        let (ea, eb) = (beta.estimate(&a), fixed.estimate(&b));
        if ea.states.len() != eb.states.len() {
            return Err(format!("seed {seed} scan {}: {} vs {} states", k + 1, ea.states.len(), eb.states.len()));
        }
        for ((_, x), (_, y)) in ea.states.iter().zip(&eb.states) {
            worst = worst.max((x - y).amax());
        }
    }
    Ok(worst)
}

pub fn check() -> Result<String, String> {
    let mut worst = 0.0f64;
    for p_d in [0.95, 0.8, 0.65] {
        let cfg = scenario(p_d)?;
        for seed in 1..=10 {
            worst = worst.max(disagreement(&cfg, seed)?);
        }
    }
    if worst < 1e-3 {
        Ok(format!("30 runs, max state-mean gap {worst:.2e}"))
    } else {
        Err(format!("max state-mean gap {worst:.2e}"))
    }
}
