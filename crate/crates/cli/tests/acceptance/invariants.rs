use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rpmbm::distributions::{is_symmetric_psd, moment_match, BetaGaussianComponent, BetaParams, GaussianComponent};
use rpmbm::metrics::ospa;
use rpmbm::pmbm::{
    detect_track, first_detection, misdetect_track, predict_track, DetectionModel, MotionModel, PmbmPosterior,
    PoissonIntensity, SensorModel, TrackId,
};
use rpmbm::sim::{generate_measurements, generate_truth, FilterMode, ScenarioConfig};

fn arb_gaussian() -> impl Strategy<Value = GaussianComponent<f64>> {
    (prop::collection::vec(-100.0..100.0f64, 4), prop::collection::vec(-5.0..5.0f64, 16), 0.5..50.0f64).prop_map(
        |(m, a, d)| {
            let a = DMatrix::from_column_slice(4, 4, &a);
            let cov = &a * a.transpose() + DMatrix::identity(4, 4) * d;
            GaussianComponent::new(DVector::from_vec(m), cov).unwrap()
        },
    )
}

fn arb_beta() -> impl Strategy<Value = BetaParams<f64>> {
    (0.5..60.0f64, 0.5..60.0f64).prop_map(|(s, t)| BetaParams::new(s, t).unwrap())
}

fn arb_component() -> impl Strategy<Value = BetaGaussianComponent<f64>> {
    (0.01..2.0f64, arb_beta(), arb_gaussian()).prop_map(|(w, b, g)| BetaGaussianComponent::new(w, b, g).unwrap())
}

fn points() -> impl Strategy<Value = Vec<DVector<f64>>> {
    prop::collection::vec((-200.0..200.0f64, -200.0..200.0f64).prop_map(|(x, y)| DVector::from_vec(vec![x, y])), 0..6)
}

fn run<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: Debug,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn beta_round_trip(b: BetaParams<f64>) -> Result<(), TestCaseError> {
    let back = BetaParams::from_moments(b.mean(), b.variance()).unwrap();
    prop_assert!((back.s() - b.s()).abs() < 1e-8 * b.s().max(1.0));
    prop_assert!((back.t() - b.t()).abs() < 1e-8 * b.t().max(1.0));
    prop_assert_eq!(b.predict(1.0).unwrap(), b);
    Ok(())
}

fn beta_bookkeeping((events, r0): (Vec<bool>, f64)) -> Result<(), TestCaseError> {
    let detection = DetectionModel::Beta { k_beta: 1.0 };
    let motion = MotionModel::ncv(1.0, 5.0, 0.99);
    let sensor = SensorModel::position(10.0, 1e-7, f64::INFINITY);
    let (s0, t0) = (1.0, 1.0);
    let prior = GaussianComponent::new(DVector::zeros(4), DMatrix::identity(4, 4) * 100.0).unwrap();
    let birth = PoissonIntensity::new(vec![BetaGaussianComponent::new(r0, BetaParams::new(s0, t0).unwrap(), prior).unwrap()]);
    let z = DVector::from_vec(vec![1.0, -1.0]);
    let mut tr = first_detection(&birth, &z, &sensor, &detection, TrackId(1), 0).unwrap().track;
    let (mut d, mut m) = (1.0, 0.0);
    for detected in events {
        tr = predict_track(&tr, &motion, &detection).unwrap();
        let r_before = tr.existence;
        if detected {
            tr = detect_track(&tr, &z, 0, &sensor, &detection).unwrap().1;
            d += 1.0;
            prop_assert_eq!(tr.existence, 1.0);
        } else {
            tr = misdetect_track(&tr, &detection).1;
            m += 1.0;
            prop_assert!(tr.existence <= r_before);
        }
        prop_assert_eq!((tr.beta.s(), tr.beta.t()), (s0 + d, t0 + m));
    }
    Ok(())
}

fn moments_preserved(cs: Vec<BetaGaussianComponent<f64>>) -> Result<(), TestCaseError> {
    let out = moment_match(&cs).unwrap().component;
    let total: f64 = cs.iter().map(|c| c.weight).sum();
    prop_assert!((out.weight - total).abs() < 1e-12 * total.max(1.0));
    let mut mean = DVector::zeros(4);
    let mut a_mean = 0.0;
    for c in &cs {
        mean += &c.gaussian.mean * (c.weight / total);
        a_mean += c.beta.mean() * c.weight / total;
    }
    let mut cov = DMatrix::zeros(4, 4);
    let mut a_second = 0.0;
    for c in &cs {
        let dm = &c.gaussian.mean - &mean;
        cov += (&c.gaussian.covariance + &dm * dm.transpose()) * (c.weight / total);
        a_second += (c.beta.variance() + c.beta.mean().powi(2)) * c.weight / total;
    }
    prop_assert!((&out.gaussian.mean - &mean).amax() < 1e-9);
    prop_assert!((&out.gaussian.covariance - &cov).amax() < 1e-8 * cov.amax().max(1.0));
    prop_assert!((out.beta.mean() - a_mean).abs() < 1e-12);
    let variance = a_second - a_mean * a_mean;
    if variance < 0.999 * a_mean * (1.0 - a_mean) {
        prop_assert!((out.beta.variance() - variance).abs() < 1e-10);
    }
    Ok(())
}

fn ospa_axioms((x, y, w, c, p): (Vec<DVector<f64>>, Vec<DVector<f64>>, Vec<DVector<f64>>, f64, f64)) -> Result<(), TestCaseError> {
    let d = |a: &[DVector<f64>], b: &[DVector<f64>]| ospa(a, b, c, p).unwrap();
    let xy = d(&x, &y);
    prop_assert!(d(&x, &x) < 1e-9);
    prop_assert!((xy - d(&y, &x)).abs() < 1e-9);
    prop_assert!((0.0..=c + 1e-9).contains(&xy));
    prop_assert!(xy <= d(&x, &w) + d(&w, &y) + 1e-9);
    let empty = if x.is_empty() { 0.0 } else { c };
    prop_assert!((d(&x, &[]) - empty).abs() < 1e-9);
    Ok(())
}

fn filter_posterior((seed, lambda, p_d, fixed): (u64, f64, f64, bool)) -> Result<(), TestCaseError> {
    let mut cfg = ScenarioConfig::default();
    cfg.duration = 14;
    cfg.lambda_c = lambda;
    cfg.p_d_true = p_d;
    let truth = generate_truth(&cfg, seed);
    let scans = generate_measurements(&truth, &cfg, seed);
    let mode = if fixed { FilterMode::FixedPd } else { FilterMode::RPmbm };
    let filter = cfg.build_filter::<f64>(mode).unwrap();
    let mut post = PmbmPosterior::initial();
    for scan in &scans {
        post = filter.step(&post, &scan.observations::<f64>()).unwrap();
        let total: f64 = post.hypotheses.iter().map(|h| h.weight()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "weights sum to {}", total);
        for tr in post.hypotheses.iter().flat_map(|h| &h.tracks) {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&tr.existence), "r = {}", tr.existence);
            prop_assert!(is_symmetric_psd(&tr.gaussian.covariance));
        }
        for c in &post.poisson.components {
            prop_assert!(c.weight >= 0.0 && is_symmetric_psd(&c.gaussian.covariance));
        }
    }
    Ok(())
}

pub fn check() -> Result<String, String> {
    run("beta round trip", 1000, arb_beta(), beta_round_trip)?;
    run("beta bookkeeping", 500, (prop::collection::vec(any::<bool>(), 1..40), 0.1..1.0f64), beta_bookkeeping)?;
    run("moment matching", 500, prop::collection::vec(arb_component(), 1..6), moments_preserved)?;
    run("ospa axioms", 1000, (points(), points(), points(), 1.0..150.0f64, 1.0..3.0f64), ospa_axioms)?;
    run("filter posterior", 24, (0u64..1000, 0.0..20.0f64, 0.5..1.0f64, any::<bool>()), filter_posterior)?;
    Ok("beta round trip, bookkeeping, moment matching, ospa axioms, posterior validity".into())
}
