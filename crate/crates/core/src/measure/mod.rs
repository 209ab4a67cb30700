//! The Gaussian measure `ρ_N`, the weighted Gibbs measure `μ_N` with an
//! `L²` cutoff, and importance-sampling estimates under it.
//!
//! Conventions. For `1 <= n <= N`
//!
//! ```text
//! û(n) = (x + i y) / n,     v̂(n) = (x' + i y') / (√α n),     x, y, x', y' ~ N(0, 1)
//! ```
//!
//! which is the density `exp(-½ Σ n² (|û(n)|² + α |v̂(n)|²))` on the real and
//! imaginary parts, so `E|û(n)|² = 2/n²`. In physical normalization that
//! exponent is `H₂ / 4π`, where `H₂ = ½∫ u_x² + α v_x²` is the quadratic part
//! of the Hamiltonian. The Gibbs density that the flow preserves is therefore
//! `exp(-H/4π)`, and the weight relative to `ρ_N` is
//!
//! ```text
//! log w = ∫ u v² dx / 8π.
//! ```
//!
//! `û(0) = 0`. The mean `v̂(0)` is real and frozen by the flow; it is drawn
//! uniformly from `[-B/(2√π), B/(2√π)]`. The cutoff keeps samples with
//! `(Σ_{|n|<=N} |û(n)|² + |v̂(n)|²)^{1/2} <= B`.

mod tail;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldPair;
use crate::invariance::TestFunctional;
use crate::resonance::CouplingParam;
use crate::rng::sample_rng;
use crate::stats::{effective_sample_size, mean_se, weighted_mean_se};

pub use tail::{tail_probability, TailPoint, TailReport};

/// Below this effective sample size the ensemble is flagged degenerate.
pub const MIN_ESS: f64 = 10.0;

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    #[serde(rename = "N")]
    pub trunc_n: usize,
    pub alpha: CouplingParam,
    /// `L²` cutoff radius on the coefficient norm.
    #[serde(rename = "B")]
    pub cutoff: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub samples: usize,
    /// Off: plain Gaussian with cutoff, every accepted sample has weight 1.
    #[serde(default = "yes")]
    pub weighted: bool,
}

impl MeasureConfig {
    pub fn new(trunc_n: usize, alpha: CouplingParam, cutoff: f64, seed: u64, samples: usize) -> Result<Self> {
        let c = Self { trunc_n, alpha, cutoff, seed, samples, weighted: true };
        c.validate()?;
        Ok(c)
    }

    pub fn unweighted(mut self) -> Self {
        self.weighted = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trunc_n == 0 {
            return Err(Error::Config("N must be positive".into()));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Config(format!("B must be positive and finite, got {}", self.cutoff)));
        }
        if self.samples == 0 {
            return Err(Error::Config("M must be at least 1".into()));
        }
        Ok(())
    }

    /// Half-width of the interval `v̂(0)` is drawn from.
    pub fn mean_radius(&self) -> f64 {
        self.cutoff / (2.0 * PI.sqrt())
    }
}

/// One draw from `ρ_N` with the `v̂(0)` proposal.
pub fn sample_gaussian<R: Rng + ?Sized>(cfg: &MeasureConfig, rng: &mut R) -> FieldPair {
    let n = cfg.trunc_n;
    let root_alpha = cfg.alpha.value().sqrt();
    let mut g = || -> f64 { StandardNormal.sample(rng) };
    let mut p = FieldPair::zeros(n);
    for k in 1..=n {
        let kf = k as f64;
        let (x, y) = (g(), g());
        p.u.set(k, Complex64::new(x, y) / kf);
        let (x, y) = (g(), g());
        p.v.set(k, Complex64::new(x, y) / (root_alpha * kf));
    }
    let r = cfg.mean_radius();
    p.v.set(0, Complex64::new(rng.random_range(-r..=r), 0.0));
    p
}

/// `log w = ∫ u v² dx / 8π`; see the module notes for the scale.
pub fn gibbs_log_weight(p: &FieldPair) -> f64 {
    p.integral_uvv() / (8.0 * PI)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GibbsSample {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<FieldPair>,
    pub log_weight: f64,
    pub accepted: bool,
}

/// Sample `index` of the ensemble described by `cfg`.
pub fn draw(cfg: &MeasureConfig, index: usize) -> (FieldPair, f64, bool) {
    let mut rng = sample_rng(cfg.seed, index as u64);
    let p = sample_gaussian(cfg, &mut rng);
    let lw = gibbs_log_weight(&p);
    let accepted = p.l2_norm() <= cfg.cutoff;
    (p, lw, accepted)
}

/// Self-normalized weights over the accepted samples, scaled so the
/// largest is 1. Rejected samples get 0.
pub fn normalized_weights(log_weights: &[f64], accepted: &[bool], weighted: bool) -> Vec<f64> {
    if !weighted {
        return accepted.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
    }
    let top = log_weights.iter().zip(accepted).filter(|(_, a)| **a).map(|(l, _)| *l).fold(f64::NEG_INFINITY, f64::max);
    log_weights.iter().zip(accepted).map(|(l, &a)| if a { (l - top).exp() } else { 0.0 }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalMean {
    pub name: String,
    pub mean: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub samples: usize,
    pub accepted: usize,
    pub acceptance_rate: f64,
    pub weighted: bool,
    pub ess: f64,
    /// `E_ρ[w χ]` under the proposal, with its standard error.
    pub z_n: f64,
    pub z_n_se: f64,
    pub max_log_weight: f64,
    pub functionals: Vec<FunctionalMean>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Ensemble {
    pub samples: Vec<GibbsSample>,
    pub report: EnsembleReport,
}

impl Ensemble {
    /// Normalized weights aligned with `samples`.
    pub fn weights(&self) -> Vec<f64> {
        let lw: Vec<f64> = self.samples.iter().map(|s| s.log_weight).collect();
        let acc: Vec<bool> = self.samples.iter().map(|s| s.accepted).collect();
        normalized_weights(&lw, &acc, self.report.weighted)
    }

    /// One JSON object per sample.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for s in &self.samples {
            out.push_str(&serde_json::to_string(s)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Draws `M` samples in parallel (each from its own stream) and summarizes
/// them. States are kept for accepted samples only.
pub fn sample_gibbs_ensemble(cfg: &MeasureConfig, fs: &[TestFunctional]) -> Result<Ensemble> {
    cfg.validate()?;
    let samples: Vec<GibbsSample> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let (p, log_weight, accepted) = draw(cfg, i);
            GibbsSample { index: i, state: accepted.then_some(p), log_weight, accepted }
        })
        .collect();
    let lw: Vec<f64> = samples.iter().map(|s| s.log_weight).collect();
    let acc: Vec<bool> = samples.iter().map(|s| s.accepted).collect();
    let w = normalized_weights(&lw, &acc, cfg.weighted);
    let kept: Vec<(&FieldPair, f64)> =
        samples.iter().zip(&w).filter_map(|(s, &wi)| s.state.as_ref().map(|p| (p, wi))).collect();
    let functionals = fs
        .iter()
        .map(|f| {
            let vals: Vec<f64> = kept.iter().map(|(p, _)| f.eval(p)).collect();
            let ws: Vec<f64> = kept.iter().map(|(_, wi)| *wi).collect();
            let (mean, se) = weighted_mean_se(&vals, &ws);
            FunctionalMean { name: f.name.to_string(), mean, se }
        })
        .collect();
    let report = summarize(cfg, &lw, &acc, &w, functionals);
    Ok(Ensemble { samples, report })
}

pub(crate) fn summarize(
    cfg: &MeasureConfig,
    lw: &[f64],
    acc: &[bool],
    w: &[f64],
    functionals: Vec<FunctionalMean>,
) -> EnsembleReport {
    let accepted = acc.iter().filter(|a| **a).count();
    let kept: Vec<f64> = w.iter().zip(acc).filter(|(_, a)| **a).map(|(x, _)| *x).collect();
    let ess = effective_sample_size(&kept);
    let z: Vec<f64> = lw
        .iter()
        .zip(acc)
        .map(|(l, &a)| match (a, cfg.weighted) {
            (false, _) => 0.0,
            (true, true) => l.exp(),
            (true, false) => 1.0,
        })
        .collect();
    let (z_n, z_n_se) = mean_se(&z);
    let max_log_weight = lw.iter().zip(acc).filter(|(_, a)| **a).map(|(l, _)| *l).fold(f64::NEG_INFINITY, f64::max);
    let warning = (ess < MIN_ESS)
        .then(|| format!("degenerate ensemble: effective sample size {ess:.2} below {MIN_ESS}"));
    EnsembleReport {
        samples: cfg.samples,
        accepted,
        acceptance_rate: accepted as f64 / cfg.samples as f64,
        weighted: cfg.weighted,
        ess,
        z_n,
        z_n_se,
        max_log_weight,
        functionals,
        warning,
    }
}

#[cfg(test)]
mod tests;
