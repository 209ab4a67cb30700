//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 6 and 8 cannot be met as stated (see the README); the run is
//! green only when exactly those two fail.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kdv_gibbs::cli::config::DatumSpec;
use kdv_gibbs::cli::result_files;
use kdv_gibbs::data::{cosine_datum, smooth_datum};
use kdv_gibbs::dynamics::{
    divergence_finite_difference, evolve, integrate, vector_field_divergence, Method, SimConfig,
};
use kdv_gibbs::field::{FieldPair, SobolevParams};
use kdv_gibbs::invariance::{builtin_functionals, invariance_test, truncation_convergence};
use kdv_gibbs::measure::{sample_gaussian, tail_probability, MeasureConfig};
use kdv_gibbs::resonance::{
    compute_c_roots, compute_d_roots, dispersion_gap_b, enumerate_near_resonant, estimate_type_index,
    multiplier_scan, root_estimates, verify_lower_bound, CouplingParam, DiophantineInput, Family, QuadSurd, Regime,
    Trend, TypeIndex,
};
use kdv_gibbs::rng::sample_rng;
use kdv_gibbs::stats::mean_se;

type Criterion = (u32, f64, fn() -> Outcome);

const EXPECTED_FAILURES: [u32; 2] = [6, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn alpha(s: &str) -> CouplingParam {
    s.parse().unwrap()
}

fn max_diff(a: &FieldPair, b: &FieldPair) -> f64 {
    a.u.coeffs()
        .iter()
        .zip(b.u.coeffs())
        .chain(a.v.coeffs().iter().zip(b.v.coeffs()))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn nu(e: &kdv_gibbs::resonance::DiophantineEstimate) -> f64 {
    match e.nu_hat {
        TypeIndex::Finite(v) => v,
        TypeIndex::Infinite => f64::INFINITY,
    }
}

fn c1_exact_resonance() -> Outcome {
    let a = alpha("12/7");
    let g = dispersion_gap_b(&a, 6, 5);
    let zero = g.is_exact_zero();
    let triples = enumerate_near_resonant(&a, 600, Family::B).unwrap();
    let missing: Vec<i64> = (1..=100)
        .map(|k| 6 * k)
        .filter(|&n| !triples.iter().any(|t| t.n == n && t.n1 == 5 * n / 6 && t.n2 == n / 6 && t.gap.is_exact_zero()))
        .collect();
    outcome(
        zero && missing.is_empty(),
        format!("gap_B(6,5) exact zero: {zero}; multiples of 6 up to 600 missing (5n/6, n/6): {missing:?}"),
    )
}

fn c2_root_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_sum, mut worst_cube, mut worst_d) = (0.0f64, 0.0f64, 0.0f64);
    let mut count = 0;
    while count < 10_000 {
        let x: f64 = 4.0 * (1.0 - rng.random::<f64>());
        if x == 1.0 {
            continue;
        }
        count += 1;
        let a = CouplingParam::from_f64(x).unwrap();
        let c = compute_c_roots(&a).unwrap();
        worst_sum = worst_sum.max((c.first + c.second - 1.0).abs());
        worst_cube = worst_cube.max((x * (c.first.powi(3) + c.second.powi(3)) - 1.0).abs());
        let d = compute_d_roots(&a).unwrap();
        let (s, p) = (d.first + d.second, d.first * d.second);
        // relative near the pole at α = 1, where both sides diverge
        worst_d = worst_d.max((s - p).abs() / s.abs().max(1.0));
    }
    outcome(
        worst_sum <= 1e-12 && worst_cube <= 1e-12 && worst_d <= 1e-12,
        format!("max |c1+c2-1| = {worst_sum:.1e}, max |α(c1³+c2³)-1| = {worst_cube:.1e}, max rel |d1+d2-d1d2| = {worst_d:.1e}"),
    )
}

fn c3_diophantine() -> Outcome {
    let rationals = ["3/7", "355/113", "0", "5"].map(|s| {
        let r: BigRational = kdv_gibbs::resonance::parse_rational(s).unwrap();
        estimate_type_index(&DiophantineInput::Rational(r), 50)
    });
    let flagged = rationals.iter().all(|e| e.is_rational && e.nu_hat == TypeIndex::Infinite);
    let golden = nu(&estimate_type_index(&DiophantineInput::Surd(QuadSurd::new(1, 5, 2)), 50));
    let sqrt2 = nu(&estimate_type_index(&DiophantineInput::Surd(QuadSurd::new(0, 2, 1)), 50));
    let c = compute_c_roots(&alpha("2")).unwrap();
    let e = &root_estimates(&c)[0];
    let periodic = e.period.is_some();
    let c1 = nu(e);
    outcome(
        flagged && golden <= 0.05 && sqrt2 <= 0.05 && periodic && c1 <= 0.05,
        format!("rationals flagged: {flagged}; ν̂ golden = {golden:.3}, √2 = {sqrt2:.3}; c1(α=2) periodic: {periodic}, ν̂ = {c1:.3}"),
    )
}

fn c4_lower_bound() -> Outcome {
    let a = alpha("2");
    let mut pass = true;
    let mut parts = Vec::new();
    for f in [Family::B, Family::D] {
        let r = verify_lower_bound(&a, 4096, 0.0, f).unwrap();
        let e = r.empirical_exponent;
        pass &= e.is_some_and(|e| (0.8..=1.2).contains(&e));
        parts.push(format!("{f:?}: exponent {:?}, predicted {:?}", e, r.predicted_exponent));
    }
    outcome(pass, parts.join("; "))
}

fn c5_multiplier_scans() -> Outcome {
    let sp = SobolevParams::new(0.3, 0.55).unwrap();
    let res = multiplier_scan(&alpha("4"), &sp, 1024, Regime::ResonantB).unwrap();
    let grows = res.trend == Trend::Growing;
    let non = multiplier_scan(&alpha("2"), &sp, 1024, Regime::NonresonantB).unwrap();
    let from = non.nonincreasing_from;
    outcome(
        grows && from.is_some_and(|n| n <= 16),
        format!("α=4 resonant-B trend {:?}; α=2 nonresonant-B non-increasing from |n| = {from:?}", res.trend),
    )
}

fn c6_conservation() -> Outcome {
    let a = alpha("2");
    let spec = DatumSpec { datum: "gibbs", seed: 6, cutoff: Some(2.0) };
    let p = spec.build(32, &a, Path::new(".")).unwrap();
    let cfg = SimConfig::new(32, a, 1e-3, 1.0).unwrap().with_record_every(10);
    match integrate(&p, &cfg, false) {
        Ok(t) => {
            let d = t.drift();
            outcome(
                d.e1_abs < 1e-12 && d.e2_abs < 1e-12 && d.nval_rel < 1e-8 && d.h_rel < 1e-8,
                format!("E1 {:.1e}, E2 {:.1e}, Nval rel {:.1e}, H_N rel {:.1e}", d.e1_abs, d.e2_abs, d.nval_rel, d.h_rel),
            )
        }
        Err(e) => outcome(false, format!("integration failed: {e}")),
    }
}

fn c7_integrator_order() -> Outcome {
    let p = cosine_datum(16);
    let cfg = |dt: f64| SimConfig::new(16, alpha("2"), dt, 1.0).unwrap();
    let reference = evolve(&p, &cfg(1e-2 / 64.0)).unwrap();
    let err = |dt: f64| max_diff(&evolve(&p, &cfg(dt)).unwrap(), &reference);
    let ratio = err(1e-2) / err(5e-3);
    outcome((12.0..=20.0).contains(&ratio), format!("error ratio {ratio:.2}"))
}

fn c8_liouville() -> Outcome {
    // B only sets the range of the conserved mean v̂(0)
    let m = MeasureConfig::new(16, alpha("2"), 4.0, 8, 1).unwrap();
    let states: Vec<FieldPair> = (0..100).map(|i| sample_gaussian(&m, &mut sample_rng(m.seed, i))).collect();
    let analytic = states.iter().map(|p| vector_field_divergence(p, 2.0).abs()).fold(0.0, f64::max);
    let fd = states.iter().map(|p| divergence_finite_difference(p, 2.0, 1e-3).abs()).fold(0.0, f64::max);
    let released = |a: f64| {
        let mut p = states[0].clone();
        p.u.set(0, Complex64::new(a, 0.0));
        divergence_finite_difference(&p, 2.0, 1e-3)
    };
    let (t1, t2) = (released(0.35), released(0.7));
    let proportional = t1.abs() > 1e-6 && (t2 / t1 - 2.0).abs() < 1e-3;
    outcome(
        analytic <= 1e-12 && fd < 1e-5 && proportional,
        format!(
            "analytic max {analytic:.1e}, finite-difference max {fd:.1e}; trace at û(0) = 0.35, 0.7: {t1:.1e}, {t2:.1e}"
        ),
    )
}

fn c9_gaussian_moments() -> Outcome {
    let m = MeasureConfig::new(20, alpha("2"), 4.0, 9, 100_000).unwrap();
    let modes = [1i64, 5, 20];
    let mut u: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(m.samples)).collect();
    let mut v = u.clone();
    for i in 0..m.samples {
        let p = sample_gaussian(&m, &mut sample_rng(m.seed, i as u64));
        for (j, &n) in modes.iter().enumerate() {
            u[j].push(p.u.coeff(n).norm_sqr());
            v[j].push(p.v.coeff(n).norm_sqr());
        }
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for (j, &n) in modes.iter().enumerate() {
        let nf = (n * n) as f64;
        for (name, xs, expect) in [("u", &u[j], 2.0 / nf), ("v", &v[j], 2.0 / (2.0 * nf))] {
            let (mean, se) = mean_se(xs);
            let z = (mean - expect) / se;
            pass &= z.abs() < 3.0;
            parts.push(format!("{name}({n}) z={z:.2}"));
        }
    }
    outcome(pass, parts.join(", "))
}

fn c10_tightness() -> Outcome {
    let sp = SobolevParams::new(0.3, 0.55).unwrap();
    let k: Vec<f64> = (6..=14).map(f64::from).collect();
    let fits: Vec<_> = [16, 32]
        .iter()
        .map(|&n| {
            let m = MeasureConfig::new(n, alpha("2"), 4.0, 10, 1_000_000).unwrap();
            tail_probability(&m, &sp, &k).unwrap().fit
        })
        .collect();
    match (&fits[0], &fits[1]) {
        (Some(a), Some(b)) => {
            let se = a.slope_se.hypot(b.slope_se);
            let consistent = (a.slope - b.slope).abs() <= se;
            outcome(
                a.slope < 0.0 && b.slope < 0.0 && consistent,
                format!(
                    "slope N=16 {:.4} ± {:.4}, N=32 {:.4} ± {:.4}, difference {:.4} vs combined error {se:.4}",
                    a.slope,
                    a.slope_se,
                    b.slope,
                    b.slope_se,
                    (a.slope - b.slope).abs()
                ),
            )
        }
        _ => outcome(false, "tail fit unavailable".into()),
    }
}

fn c11_invariance() -> Outcome {
    let fs = builtin_functionals();
    let m = MeasureConfig::new(16, alpha("2"), 2.0, 2024, 10_000).unwrap();
    let s = SimConfig::new(16, alpha("2"), 1e-3, 0.5).unwrap();
    let main = invariance_test(&m, &s, 0.5, &fs).unwrap().report;
    let linear = invariance_test(&m.clone().unweighted(), &s.clone().linear_only(), 0.7, &fs).unwrap().report;
    let zero = invariance_test(&m, &s, 0.0, &fs).unwrap().report;
    let bitwise = zero.functionals.iter().all(|f| f.mean_diff.to_bits() == 0 && f.z == 0.0);
    let zs: Vec<String> = main.functionals.iter().map(|f| format!("{:.2}", f.z)).collect();
    outcome(
        fs.len() >= 5 && main.passes() && linear.passes() && bitwise,
        format!(
            "z = [{}], max |z| {:.2}; linear control max |z| {:.2}; t = 0 bitwise zero: {bitwise}",
            zs.join(", "),
            main.max_abs_z,
            linear.max_abs_z
        ),
    )
}

fn c12_truncation() -> Outcome {
    let p = smooth_datum(64, 1);
    let sp = SobolevParams::new(0.3, 0.55).unwrap();
    let r = truncation_convergence(&p, &alpha("2"), &[8, 16, 32, 64], 1.0, 1e-4, Method::IfRk4, &sp).unwrap();
    let errs: Vec<String> = r.rows.iter().map(|row| format!("{:.2e}", row.error)).collect();
    outcome(r.strictly_decreasing, format!("errors [{}]", errs.join(", ")))
}

fn write_configs(dir: &Path) -> Vec<(&'static str, Vec<String>)> {
    let put = |name: &str, v: serde_json::Value| {
        std::fs::write(dir.join(name), serde_json::to_string_pretty(&v).unwrap()).unwrap();
        dir.join(name).to_string_lossy().into_owned()
    };
    let measure = |n: usize, b: f64, m: usize| serde_json::json!({"N": n, "alpha": "2", "B": b, "seed": 13, "M": m});
    let flow = serde_json::json!({"dt": 1e-3, "record_every": 10});
    let sp = serde_json::json!({"s1": 0.3, "s2": 0.55});
    let mut cmds = vec![(
        "resonance",
        ["--alpha", "2", "--nmax", "256"].map(String::from).to_vec(),
    )];
    let configs = [
        (
            "simulate",
            serde_json::json!({"version": 1, "sim": {"N": 16, "alpha": "2", "dt": 1e-3, "T": 0.2, "record_every": 20},
                "datum": "gibbs", "datum_seed": 3, "datum_B": 2.0}),
        ),
        ("sample", serde_json::json!({"version": 1, "measure": measure(16, 3.0, 2000), "keep_states": true})),
        ("tail", serde_json::json!({"version": 1, "measure": measure(16, 4.0, 20_000), "sobolev": sp, "K": [6, 7, 8, 9, 10]})),
        (
            "invariance",
            serde_json::json!({"version": 1, "measure": measure(16, 3.0, 400), "flow": flow, "t": 0.2, "control": true}),
        ),
        (
            "growth",
            serde_json::json!({"version": 1, "measure": measure(16, 3.0, 200), "flow": flow, "sobolev": sp,
                "T": [0.1, 0.2, 0.4], "eps": 0.1}),
        ),
        (
            "converge",
            serde_json::json!({"version": 1, "alpha": "2", "datum": "smooth", "datum_seed": 1, "N": [8, 16, 32],
                "T": 0.5, "dt": 1e-3, "sobolev": sp}),
        ),
    ];
    for (cmd, v) in configs {
        let path = put(&format!("{cmd}.json"), v);
        cmds.push((cmd, vec!["--config".into(), path, "--seed".into(), "21".into()]));
    }
    cmds
}

fn c13_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_kdv-gibbs");
    let mut bad = Vec::new();
    for (cmd, args) in write_configs(tmp.path()) {
        let mut outputs = Vec::new();
        for w in [1, 8] {
            let out = tmp.path().join(format!("{cmd}-{w}"));
            let status = Command::new(bin)
                .arg(cmd)
                .args(&args)
                .args(["--workers", &w.to_string(), "--emit-plot-data", "--out"])
                .arg(&out)
                .status()
                .unwrap();
            if !status.success() {
                bad.push(format!("{cmd} exited {status}"));
            }
            let files = result_files(&out).unwrap();
            let contents: Vec<(String, Vec<u8>)> = files
                .iter()
                .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(f).unwrap()))
                .collect();
            outputs.push(contents);
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            bad.push(format!("{cmd} outputs differ"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "7 commands byte-identical".into() } else { bad.join("; ") })
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, 1.0, c1_exact_resonance),
        (2, 1.0, c2_root_identities),
        (3, 1.0, c3_diophantine),
        (4, 30.0, c4_lower_bound),
        (5, 60.0, c5_multiplier_scans),
        (6, 60.0, c6_conservation),
        (7, f64::INFINITY, c7_integrator_order),
        (8, f64::INFINITY, c8_liouville),
        (9, f64::INFINITY, c9_gaussian_moments),
        (10, 300.0, c10_tightness),
        (11, 600.0, c11_invariance),
        (12, 120.0, c12_truncation),
        (13, f64::INFINITY, c13_determinism),
    ];
    let mut failed = BTreeSet::new();
    for (k, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = o.pass && secs < budget;
        if !pass {
            failed.insert(k);
        }
        let limit = if budget.is_finite() { format!(" (limit {budget} s)") } else { String::new() };
        println!("criterion {k:>2}: {} [{secs:.2} s{limit}] {}", if pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let expected: BTreeSet<u32> = EXPECTED_FAILURES.into_iter().collect();
    if failed != expected {
        eprintln!("failing criteria {failed:?} differ from the documented infeasible set {expected:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} of 13 pass; failures match the documented set {expected:?}", 13 - failed.len());
}
