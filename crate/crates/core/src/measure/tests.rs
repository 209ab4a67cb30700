use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::field::{SobolevParams, SpectralField};
use crate::invariance::builtin_functionals;
use crate::rng::{sample_rng, with_workers};

fn cfg(n: usize, b: f64, seed: u64, m: usize) -> MeasureConfig {
    MeasureConfig::new(n, "2".parse().unwrap(), b, seed, m).unwrap()
}

#[test]
fn config_validation() {
    let a: CouplingParam = "2".parse().unwrap();
    assert!(MeasureConfig::new(0, a.clone(), 1.0, 0, 1).is_err());
    assert!(MeasureConfig::new(4, a.clone(), 0.0, 0, 1).is_err());
    assert!(MeasureConfig::new(4, a.clone(), 1.0, 0, 0).is_err());
    assert!("-1".parse::<CouplingParam>().is_err());
    let c: MeasureConfig = serde_json::from_str(r#"{"N": 8, "alpha": "2", "B": 2.0, "seed": 3, "M": 10}"#).unwrap();
    assert!(c.weighted);
    assert!(serde_json::from_str::<MeasureConfig>(r#"{"N": 8, "alpha": 2, "B": 2, "seed": 3, "M": 10, "b": 1}"#).is_err());
}

#[test]
fn log_weight_examples() {
    let zero_u = FieldPair { u: SpectralField::zeros(4), v: SpectralField::cosine(4, 1, 1.0) };
    assert_eq!(gibbs_log_weight(&zero_u), 0.0);
    // ∫ cos 2x cos² x dx = π/2
    let p = FieldPair { u: SpectralField::cosine(4, 2, 1.0), v: SpectralField::cosine(4, 1, 1.0) };
    assert!((gibbs_log_weight(&p) - (PI / 2.0) / (8.0 * PI)).abs() < 1e-15);
}

#[test]
fn draws_are_gaussian_shaped() {
    let c = cfg(8, 2.0, 5, 1);
    let mut rng = sample_rng(5, 0);
    for _ in 0..200 {
        let p = sample_gaussian(&c, &mut rng);
        assert_eq!(p.u.coeff(0), Complex64::new(0.0, 0.0));
        assert_eq!(p.v.coeff(0).im, 0.0);
        assert!(p.v.coeff(0).re.abs() <= c.mean_radius());
        assert_eq!(p.u.coeff(-3), p.u.coeff(3).conj());
    }
}

#[test]
fn second_moments_small_run() {
    // E|û(n)|² = 2/n², E|v̂(n)|² = 2/(α n²)
    let c = cfg(6, 1.0, 9, 1);
    let m = 20_000;
    let mut rng = sample_rng(9, 0);
    let draws: Vec<FieldPair> = (0..m).map(|_| sample_gaussian(&c, &mut rng)).collect();
    for n in [1i64, 3, 6] {
        let nn = (n * n) as f64;
        let (mu, su) = mean_se(&draws.iter().map(|p| p.u.coeff(n).norm_sqr()).collect::<Vec<_>>());
        let (mv, sv) = mean_se(&draws.iter().map(|p| p.v.coeff(n).norm_sqr()).collect::<Vec<_>>());
        assert!((mu - 2.0 / nn).abs() < 4.0 * su, "u {n}: {mu} ± {su}");
        assert!((mv - 1.0 / nn).abs() < 4.0 * sv, "v {n}: {mv} ± {sv}");
    }
}

#[test]
fn unweighted_ess_counts_accepted() {
    let c = cfg(8, 2.5, 1, 2000).unweighted();
    let e = sample_gibbs_ensemble(&c, &[]).unwrap();
    assert_eq!(e.report.ess.round() as usize, e.report.accepted);
    assert!((e.report.ess - e.report.accepted as f64).abs() < 1e-9);
    assert!(e.report.accepted > 0 && e.report.accepted < 2000);
    assert_eq!(e.report.z_n, e.report.acceptance_rate);
}

#[test]
fn ensemble_bookkeeping() {
    let c = cfg(8, 2.5, 2, 3000);
    let e = sample_gibbs_ensemble(&c, &builtin_functionals()).unwrap();
    let r = &e.report;
    assert!(r.ess <= r.accepted as f64 + 1e-9 && r.ess > 0.0);
    assert!((0.0..=1.0).contains(&r.acceptance_rate));
    assert_eq!(r.functionals.len(), 5);
    for s in &e.samples {
        assert!(s.log_weight.is_finite());
        assert_eq!(s.state.is_some(), s.accepted);
        if let Some(p) = &s.state {
            assert!(p.l2_norm() <= c.cutoff);
        }
    }
    let w = e.weights();
    assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
    assert_eq!(w.iter().cloned().fold(0.0, f64::max), 1.0);
    assert!(r.warning.is_none());
    let lines = e.to_jsonl().unwrap();
    assert_eq!(lines.lines().count(), 3000);
}

#[test]
fn degenerate_ensemble_is_flagged() {
    let e = sample_gibbs_ensemble(&cfg(8, 2.0, 3, 20), &[]).unwrap();
    assert!(e.report.ess < MIN_ESS);
    assert!(e.report.warning.as_deref().unwrap().contains("degenerate"));
}

#[test]
fn deterministic_across_workers() {
    let c = cfg(8, 2.5, 11, 500);
    let one = with_workers(1, || sample_gibbs_ensemble(&c, &[]).unwrap()).unwrap();
    let four = with_workers(4, || sample_gibbs_ensemble(&c, &[]).unwrap()).unwrap();
    assert_eq!(one.samples, four.samples);
    assert_eq!(one.report, four.report);
}

#[test]
fn acceptance_grows_with_cutoff() {
    let rates: Vec<f64> = [1.5, 2.0, 3.0, 5.0]
        .iter()
        .map(|&b| sample_gibbs_ensemble(&cfg(8, b, 4, 2000), &[]).unwrap().report.acceptance_rate)
        .collect();
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
}

#[test]
fn tail_report_shape() {
    let c = cfg(8, 4.0, 6, 5000);
    let sp = SobolevParams::new(0.3, 0.55).unwrap();
    let r = tail_probability(&c, &sp, &[2.0, 4.0, 6.0, 8.0, 100.0]).unwrap();
    assert!(r.points.windows(2).all(|w| w[1].tail <= w[0].tail));
    assert!(r.points.last().unwrap().censored);
    assert_eq!(r.fit.unwrap().points, 4);
    assert!(tail_probability(&c, &sp, &[1.0, 2.0, 3.0]).is_err());
    assert!(tail_probability(&c, &sp, &[1.0, 3.0, 2.0, 4.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn log_weight_translation_invariant(seed in 0u64..1000, shift in -3.0f64..3.0) {
        let c = cfg(10, 2.0, seed, 1);
        let p = sample_gaussian(&c, &mut sample_rng(seed, 0));
        let a = gibbs_log_weight(&p);
        let b = gibbs_log_weight(&p.translate(shift));
        prop_assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }
}
