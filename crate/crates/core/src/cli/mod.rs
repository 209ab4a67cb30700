//! The `kdv-gibbs` command line: one subcommand per experiment, explicit
//! JSON configuration, machine-readable output plus a manifest per run.
//!
//! Exit codes: 0 success, 2 configuration or domain error, 3 numerical
//! failure, 4 statistically invalid run.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dynamics::integrate;
use crate::error::{Error, Result};
use crate::field::SobolevParams;
use crate::invariance::{
    functionals_by_name, growth_profile, invariance_test, non_invariance_control, truncation_convergence,
};
use crate::measure::{sample_gibbs_ensemble, tail_probability};
use crate::resonance::{
    enumerate_near_resonant, multiplier_scan, root_estimates, verify_lower_bound, CouplingParam, DiophantineEstimate,
    Family, LowerBoundReport, NearResonantTriple, Regime, ResonanceRoots, ScanReport,
};
use crate::rng::with_workers;

use config::{load, ConvergeConfig, GrowthConfig, InvarianceConfig, SampleConfig, SimulateConfig, TailConfig};
use output::RunDir;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "kdv-gibbs", version, about = "Truncated Majda-Biello system: resonances, flow, Gibbs ensemble")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; changes wall time only.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write tidy CSV files for plotting.
    #[arg(long)]
    pub emit_plot_data: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "B")]
    B,
    #[value(name = "D")]
    D,
    Both,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    /// Coupling, as a decimal or an exact ratio `p/q`.
    #[arg(long)]
    pub alpha: String,
    /// Largest |n| scanned.
    #[arg(long, default_value_t = 256)]
    pub nmax: i64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    pub family: FamilyArg,
    /// Slack in the predicted gap exponent `1 - ν - ε`.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.3)]
    pub s1: f64,
    #[arg(long, default_value_t = 0.55)]
    pub s2: f64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub emit_plot_data: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots, continued fractions, near-resonant triples, gap fits and multiplier scans.
    Resonance(ResonanceArgs),
    /// Integrate one datum and record the conserved quantities.
    Simulate(RunArgs),
    /// Draw a Gibbs ensemble and summarize it.
    Sample(RunArgs),
    /// Tail of the mixed norm under the Gibbs measure.
    Tail(RunArgs),
    /// Paired invariance test, optionally with the unweighted control.
    Invariance(RunArgs),
    /// Quantiles of the running mixed-norm supremum along Gibbs trajectories.
    Growth(RunArgs),
    /// Distance of truncated solutions to the largest truncation.
    Converge(RunArgs),
    /// Print an example configuration for a command.
    ExampleConfig {
        #[arg(value_parser = ["simulate", "sample", "tail", "invariance", "growth", "converge"])]
        command: String,
    },
}

/// Maps library errors onto exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IntegrationFailure { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(command: Command) -> Result<i32> {
    match command {
        Command::Resonance(a) => resonance(a),
        Command::Simulate(a) => simulate(a),
        Command::Sample(a) => sample(a),
        Command::Tail(a) => tail(a),
        Command::Invariance(a) => invariance(a),
        Command::Growth(a) => growth(a),
        Command::Converge(a) => converge(a),
        Command::ExampleConfig { command } => {
            let v = config::example(&command).ok_or_else(|| Error::Config(format!("no example for {command}")))?;
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(EXIT_OK)
        }
    }
}

/// Runs `body` against a fresh output directory and closes the manifest
/// with the outcome.
fn with_run<C: Serialize>(
    a: &RunArgs,
    command: &str,
    cfg: &C,
    seed: Option<u64>,
    body: impl FnOnce(&mut RunDir) -> Result<i32> + Send,
) -> Result<i32> {
    let mut run = RunDir::create(&a.out, command, serde_json::to_value(cfg)?, seed, a.workers, a.emit_plot_data)?;
    let outcome = with_workers(a.workers, || body(&mut run)).and_then(|r| r);
    let status = match &outcome {
        Ok(EXIT_OK) => "ok".to_string(),
        Ok(_) => "invalid".to_string(),
        Err(e) => format!("error: {e}"),
    };
    run.finish(&status)?;
    outcome
}

#[derive(Serialize)]
struct ResonanceOutput {
    alpha: CouplingParam,
    n_max: i64,
    roots: ResonanceRoots,
    diophantine: Vec<NamedEstimate>,
    near_resonant: Vec<NearResonantTriple>,
    lower_bound: Vec<LowerBoundReport>,
    multiplier_scan: Vec<ScanReport>,
}

#[derive(Serialize)]
struct NamedEstimate {
    root: &'static str,
    #[serde(flatten)]
    estimate: DiophantineEstimate,
}

fn resonance(a: ResonanceArgs) -> Result<i32> {
    let alpha: CouplingParam = a.alpha.parse()?;
    let sp = SobolevParams::new(a.s1, a.s2)?;
    if a.nmax < 16 {
        return Err(Error::Config(format!("--nmax must be at least 16, got {}", a.nmax)));
    }
    let families: Vec<Family> = match a.family {
        FamilyArg::B => vec![Family::B],
        FamilyArg::D => vec![Family::D],
        FamilyArg::Both => vec![Family::B, Family::D],
    };
    let roots = ResonanceRoots::for_alpha(&alpha)?;
    let config = serde_json::json!({
        "alpha": alpha, "nmax": a.nmax, "family": format!("{:?}", a.family), "eps": a.eps, "sobolev": sp,
    });
    let args = RunArgs { config: PathBuf::new(), seed: None, workers: a.workers, out: a.out, emit_plot_data: a.emit_plot_data };
    with_run(&args, "resonance", &config, None, |run| {
        let mut diophantine = Vec::new();
        let c = root_estimates(&roots.c);
        diophantine.push(NamedEstimate { root: "c1", estimate: c[0].clone() });
        if let Some(d) = &roots.d {
            let mut e = root_estimates(d).into_iter();
            diophantine.push(NamedEstimate { root: "d1", estimate: e.next().unwrap() });
            diophantine.push(NamedEstimate { root: "d2", estimate: e.next().unwrap() });
        }
        let mut near_resonant = Vec::new();
        let mut lower_bound = Vec::new();
        let mut scans = Vec::new();
        for &f in &families {
            if f == Family::D && roots.d.is_none() {
                continue;
            }
            near_resonant.extend(enumerate_near_resonant(&alpha, a.nmax, f)?);
            lower_bound.push(verify_lower_bound(&alpha, a.nmax, a.eps, f)?);
            for r in Regime::ALL.into_iter().filter(|r| r.family() == f) {
                scans.push(multiplier_scan(&alpha, &sp, a.nmax, r)?);
            }
        }
        let out = ResonanceOutput {
            alpha: alpha.clone(),
            n_max: a.nmax,
            roots: roots.clone(),
            diophantine,
            near_resonant,
            lower_bound,
            multiplier_scan: scans,
        };
        run.write_json("resonance.json", &out)?;
        if run.emit_plot_data() {
            let mut gaps = String::from("family,n,n1,n2,gap\n");
            for t in &out.near_resonant {
                let _ = writeln!(gaps, "{:?},{},{},{},{:e}", t.family, t.n, t.n1, t.n2, t.gap.value);
            }
            run.write("plot_gaps.csv", &gaps)?;
            let mut blocks = String::from("regime,lo,hi,block_max,running_sup\n");
            for s in &out.multiplier_scan {
                for b in &s.blocks {
                    let _ = writeln!(blocks, "{},{},{},{:e},{:e}", s.regime.name(), b.lo, b.hi, b.block_max, b.running_sup);
                }
            }
            run.write("plot_scan.csv", &blocks)?;
        }
        Ok(EXIT_OK)
    })
}

fn simulate(a: RunArgs) -> Result<i32> {
    let (mut cfg, base) = load::<SimulateConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.datum_seed = s;
    }
    cfg.sim.validate()?;
    let p0 = cfg.datum_spec().build(cfg.sim.trunc_n, &cfg.sim.alpha, &base)?;
    let seed = Some(cfg.datum_seed);
    with_run(&a, "simulate", &cfg, seed, |run| {
        let traj = match integrate(&p0, &cfg.sim, cfg.keep_states) {
            Ok(t) => t,
            Err(e @ Error::IntegrationFailure { .. }) => {
                run.write_json("simulate.json", &serde_json::json!({ "error": e.to_string() }))?;
                return Err(e);
            }
            Err(e) => return Err(e),
        };
        run.write("trajectory.jsonl", &traj.to_jsonl()?)?;
        run.write("conserved.csv", &traj.snapshots_csv())?;
        let summary = serde_json::json!({
            "records": traj.records.len(),
            "drift": traj.drift(),
            "stability_warning": cfg.sim.stability_warning(),
            "final_state": traj.final_state,
        });
        run.write_json("simulate.json", &summary)?;
        Ok(EXIT_OK)
    })
}

fn sample(a: RunArgs) -> Result<i32> {
    let (mut cfg, _) = load::<SampleConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.measure.seed = s;
    }
    let fs = functionals_by_name(&cfg.functionals)?;
    let seed = Some(cfg.measure.seed);
    with_run(&a, "sample", &cfg, seed, |run| {
        let mut ens = sample_gibbs_ensemble(&cfg.measure, &fs)?;
        if !cfg.keep_states {
            ens.samples.iter_mut().for_each(|s| s.state = None);
        }
        run.write("samples.jsonl", &ens.to_jsonl()?)?;
        run.write_json("ensemble.json", &ens.report)?;
        if run.emit_plot_data() {
            let mut csv = String::from("index,log_weight,accepted\n");
            for s in &ens.samples {
                let _ = writeln!(csv, "{},{:e},{}", s.index, s.log_weight, s.accepted);
            }
            run.write("plot_weights.csv", &csv)?;
        }
        Ok(EXIT_OK)
    })
}

fn tail(a: RunArgs) -> Result<i32> {
    let (mut cfg, _) = load::<TailConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.measure.seed = s;
    }
    let seed = Some(cfg.measure.seed);
    with_run(&a, "tail", &cfg, seed, |run| {
        let r = tail_probability(&cfg.measure, &cfg.sobolev, &cfg.k_grid)?;
        run.write_json("tail.json", &r)?;
        if run.emit_plot_data() {
            let mut csv = String::from("K,tail,se,censored\n");
            for p in &r.points {
                let _ = writeln!(csv, "{},{:e},{:e},{}", p.k, p.tail, p.se, p.censored);
            }
            run.write("plot_tail.csv", &csv)?;
        }
        Ok(if r.fit.is_some() { EXIT_OK } else { EXIT_INVALID })
    })
}

fn invariance(a: RunArgs) -> Result<i32> {
    let (mut cfg, _) = load::<InvarianceConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.measure.seed = s;
    }
    let fs = functionals_by_name(&cfg.functionals)?;
    let sim = cfg.flow.sim(&cfg.measure, cfg.t)?;
    let seed = Some(cfg.measure.seed);
    with_run(&a, "invariance", &cfg, seed, |run| {
        let main = invariance_test(&cfg.measure, &sim, cfg.t, &fs)?;
        run.write_json("invariance.json", &main.report)?;
        run.write("invariance_pairs.csv", &main.records_csv())?;
        let mut valid = main.report.valid;
        let mut reports = vec![main.report];
        if cfg.control {
            let ctl = non_invariance_control(&cfg.measure, &sim, cfg.t, &fs)?;
            run.write_json("control.json", &ctl.report)?;
            run.write("control_pairs.csv", &ctl.records_csv())?;
            valid &= ctl.report.valid;
            reports.push(ctl.report);
        }
        if run.emit_plot_data() {
            let mut csv = String::from("kind,functional,mean_diff,se,z\n");
            for r in &reports {
                for f in &r.functionals {
                    let _ = writeln!(csv, "{},{},{:e},{:e},{:e}", r.kind, f.name, f.mean_diff, f.se, f.z);
                }
            }
            run.write("plot_z.csv", &csv)?;
        }
        Ok(if valid { EXIT_OK } else { EXIT_INVALID })
    })
}

fn growth(a: RunArgs) -> Result<i32> {
    let (mut cfg, _) = load::<GrowthConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.measure.seed = s;
    }
    let t_max = cfg.t_grid.last().copied().unwrap_or(0.0);
    let sim = cfg.flow.sim(&cfg.measure, t_max)?;
    let seed = Some(cfg.measure.seed);
    with_run(&a, "growth", &cfg, seed, |run| {
        let r = growth_profile(&cfg.measure, &sim, &cfg.sobolev, &cfg.t_grid, cfg.eps)?;
        run.write_json("growth.json", &r)?;
        if run.emit_plot_data() {
            let mut csv = String::from("T,quantile\n");
            for p in &r.points {
                let _ = writeln!(csv, "{},{:e}", p.t, p.quantile);
            }
            run.write("plot_growth.csv", &csv)?;
        }
        Ok(if r.valid { EXIT_OK } else { EXIT_INVALID })
    })
}

fn converge(a: RunArgs) -> Result<i32> {
    let (mut cfg, base) = load::<ConvergeConfig>(&a.config)?;
    if let Some(s) = a.seed {
        cfg.datum_seed = s;
    }
    let top = cfg.n_list.iter().copied().max().ok_or_else(|| Error::Config("empty N list".into()))?;
    let p0 = cfg.datum_spec().build(top, &cfg.alpha, &base)?;
    let seed = Some(cfg.datum_seed);
    with_run(&a, "converge", &cfg, seed, |run| {
        let r = truncation_convergence(&p0, &cfg.alpha, &cfg.n_list, cfg.t_final, cfg.dt, cfg.method, &cfg.sobolev)?;
        run.write_json("converge.json", &r)?;
        if run.emit_plot_data() {
            let mut csv = String::from("N,error\n");
            for row in &r.rows {
                let _ = writeln!(csv, "{},{:e}", row.trunc_n, row.error);
            }
            run.write("plot_converge.csv", &csv)?;
        }
        Ok(EXIT_OK)
    })
}

/// Paths of the result files of a finished run, manifest excluded.
pub fn result_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != output::MANIFEST_FILE))
        .collect();
    out.sort();
    Ok(out)
}
