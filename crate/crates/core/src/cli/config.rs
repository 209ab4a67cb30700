//! Versioned JSON configuration files, one shape per command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{cosine_datum, smooth_datum};
use crate::dynamics::{Method, SimConfig};
use crate::error::{Error, Result};
use crate::field::{FieldPair, SobolevParams};
use crate::invariance::builtin_functionals;
use crate::measure::{draw, MeasureConfig};
use crate::resonance::CouplingParam;

pub const CONFIG_VERSION: u32 = 1;

/// Draws tried before a `gibbs` datum gives up on finding one inside the cutoff.
const GIBBS_DATUM_TRIES: usize = 1_000_000;

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn all_functionals() -> Vec<String> {
    builtin_functionals().iter().map(|f| f.name.to_string()).collect()
}

/// Flow settings whose `N` and `α` come from the accompanying measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub dt: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

impl FlowConfig {
    pub fn sim(&self, m: &MeasureConfig, t_final: f64) -> Result<SimConfig> {
        let mut s = SimConfig::new(m.trunc_n, m.alpha.clone(), self.dt, t_final)?
            .with_method(self.method)
            .with_record_every(self.record_every);
        s.nonlinear = self.nonlinear;
        Ok(s)
    }
}

/// `"cosine"`, `"smooth"`, `"gibbs"`, or a path to a field pair in JSON or CSV,
/// with the seed and cutoff the builtins take.
pub struct DatumSpec<'a> {
    pub datum: &'a str,
    pub seed: u64,
    pub cutoff: Option<f64>,
}

impl DatumSpec<'_> {
    /// Builds the datum at truncation `n`; relative paths resolve against `base`.
    pub fn build(&self, n: usize, alpha: &CouplingParam, base: &Path) -> Result<FieldPair> {
        match self.datum {
            "cosine" => Ok(cosine_datum(n)),
            "smooth" => Ok(smooth_datum(n, self.seed)),
            "gibbs" => {
                let b = self.cutoff.ok_or_else(|| Error::Config("datum \"gibbs\" needs datum_B".into()))?;
                let m = MeasureConfig::new(n, alpha.clone(), b, self.seed, 1)?;
                (0..GIBBS_DATUM_TRIES)
                    .map(|i| draw(&m, i))
                    .find(|d| d.2)
                    .map(|d| d.0)
                    .ok_or_else(|| Error::Config(format!("no draw inside the cutoff B = {b}")))
            }
            path => {
                let path = base.join(path);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("cannot read datum {}: {e}", path.display())))?;
                let p = if path.extension().is_some_and(|e| e == "csv") {
                    FieldPair::from_csv(&text)?
                } else {
                    serde_json::from_str(&text)?
                };
                Ok(p.resized(n))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub version: u32,
    pub sim: SimConfig,
    /// `"cosine"`, `"smooth"`, `"gibbs"` or a file path.
    pub datum: String,
    #[serde(default)]
    pub datum_seed: u64,
    /// Cutoff for the `gibbs` datum.
    #[serde(rename = "datum_B", default, skip_serializing_if = "Option::is_none")]
    pub datum_cutoff: Option<f64>,
    /// Write the full state into each trajectory record.
    #[serde(default)]
    pub keep_states: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub version: u32,
    pub measure: MeasureConfig,
    #[serde(default)]
    pub keep_states: bool,
    #[serde(default = "all_functionals")]
    pub functionals: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfig {
    pub version: u32,
    pub measure: MeasureConfig,
    pub sobolev: SobolevParams,
    #[serde(rename = "K")]
    pub k_grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceConfig {
    pub version: u32,
    pub measure: MeasureConfig,
    pub flow: FlowConfig,
    /// Flow time.
    pub t: f64,
    #[serde(default = "all_functionals")]
    pub functionals: Vec<String>,
    /// Also run the unweighted control on the same draws.
    #[serde(default)]
    pub control: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub version: u32,
    pub measure: MeasureConfig,
    pub flow: FlowConfig,
    pub sobolev: SobolevParams,
    #[serde(rename = "T")]
    pub t_grid: Vec<f64>,
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub version: u32,
    pub alpha: CouplingParam,
    /// `"cosine"`, `"smooth"`, `"gibbs"` or a file path.
    pub datum: String,
    #[serde(default)]
    pub datum_seed: u64,
    /// Cutoff for the `gibbs` datum.
    #[serde(rename = "datum_B", default, skip_serializing_if = "Option::is_none")]
    pub datum_cutoff: Option<f64>,
    #[serde(rename = "N")]
    pub n_list: Vec<usize>,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dt: f64,
    #[serde(default)]
    pub method: Method,
    pub sobolev: SobolevParams,
}

impl SimulateConfig {
    pub fn datum_spec(&self) -> DatumSpec<'_> {
        DatumSpec { datum: &self.datum, seed: self.datum_seed, cutoff: self.datum_cutoff }
    }
}

impl ConvergeConfig {
    pub fn datum_spec(&self) -> DatumSpec<'_> {
        DatumSpec { datum: &self.datum, seed: self.datum_seed, cutoff: self.datum_cutoff }
    }
}

pub trait Versioned {
    fn version(&self) -> u32;
}

macro_rules! versioned {
    ($($t:ty),*) => {$(
        impl Versioned for $t {
            fn version(&self) -> u32 {
                self.version
            }
        }
    )*};
}
versioned!(SimulateConfig, SampleConfig, TailConfig, InvarianceConfig, GrowthConfig, ConvergeConfig);

/// Reads and checks a config file. Schema errors carry serde's location.
pub fn load<T: for<'de> Deserialize<'de> + Versioned>(path: &Path) -> Result<(T, PathBuf)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: T = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if cfg.version() != CONFIG_VERSION {
        return Err(Error::Config(format!(
            "{}: config version {} not supported (expected {CONFIG_VERSION})",
            path.display(),
            cfg.version()
        )));
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

/// A ready-to-edit config for each command.
pub fn example(command: &str) -> Option<serde_json::Value> {
    let alpha: CouplingParam = "2".parse().ok()?;
    let measure = MeasureConfig::new(16, alpha.clone(), 2.0, 1, 10_000).ok()?;
    let flow = FlowConfig { dt: 1e-3, method: Method::IfRk4, record_every: 10, nonlinear: true };
    let sp = SobolevParams::new(0.3, 0.55).ok()?;
    let v = match command {
        "simulate" => serde_json::to_value(SimulateConfig {
            version: CONFIG_VERSION,
            sim: SimConfig::new(32, alpha, 1e-3, 1.0).ok()?.with_record_every(100),
            datum: "cosine".into(),
            datum_seed: 0,
            datum_cutoff: None,
            keep_states: false,
        }),
        "sample" => serde_json::to_value(SampleConfig {
            version: CONFIG_VERSION,
            measure,
            keep_states: false,
            functionals: all_functionals(),
        }),
        "tail" => serde_json::to_value(TailConfig {
            version: CONFIG_VERSION,
            measure: MeasureConfig { trunc_n: 32, cutoff: 4.0, samples: 100_000, ..measure },
            sobolev: sp,
            k_grid: (6..=14).map(f64::from).collect(),
        }),
        "invariance" => serde_json::to_value(InvarianceConfig {
            version: CONFIG_VERSION,
            measure,
            flow,
            t: 0.5,
            functionals: all_functionals(),
            control: true,
        }),
        "growth" => serde_json::to_value(GrowthConfig {
            version: CONFIG_VERSION,
            measure: MeasureConfig { samples: 2000, ..measure },
            flow,
            sobolev: sp,
            t_grid: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            eps: 0.1,
        }),
        "converge" => serde_json::to_value(ConvergeConfig {
            version: CONFIG_VERSION,
            alpha,
            datum: "smooth".into(),
            datum_seed: 1,
            datum_cutoff: None,
            n_list: vec![8, 16, 32, 64],
            t_final: 1.0,
            dt: 1e-4,
            method: Method::IfRk4,
            sobolev: sp,
        }),
        _ => return None,
    };
    v.ok()
}
