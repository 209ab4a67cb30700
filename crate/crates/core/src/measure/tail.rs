use rayon::prelude::*;
use serde::Serialize;

use super::{draw, normalized_weights, summarize, EnsembleReport, MeasureConfig};
use crate::error::{Error, Result};
use crate::field::SobolevParams;
use crate::stats::{linear_fit, weighted_mean_se, LinearFit};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailPoint {
    #[serde(rename = "K")]
    pub k: f64,
    /// `μ_N(mixed norm > K)`.
    pub tail: f64,
    pub se: f64,
    /// No weighted mass beyond `K`; left out of the fit.
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub sobolev: SobolevParams,
    pub points: Vec<TailPoint>,
    /// `log tail ≈ intercept + slope K²` over the uncensored points.
    pub fit: Option<LinearFit>,
    pub slope_negative: bool,
    pub ensemble: EnsembleReport,
}

/// Weighted Monte Carlo estimate of the mixed-norm tail on a grid of `K`.
/// Only per-sample scalars are kept, so `M` can be large.
pub fn tail_probability(cfg: &MeasureConfig, sp: &SobolevParams, k_grid: &[f64]) -> Result<TailReport> {
    cfg.validate()?;
    if k_grid.len() < 4 {
        return Err(Error::Config("K grid needs at least 4 points".into()));
    }
    if k_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("K grid must be strictly increasing".into()));
    }
    let draws: Vec<(f64, bool, f64)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let (p, lw, accepted) = draw(cfg, i);
            (lw, accepted, if accepted { p.mixed_norm(sp) } else { 0.0 })
        })
        .collect();
    let lw: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let acc: Vec<bool> = draws.iter().map(|d| d.1).collect();
    let w = normalized_weights(&lw, &acc, cfg.weighted);
    let (norms, ws): (Vec<f64>, Vec<f64>) =
        draws.iter().zip(&w).filter(|(d, _)| d.1).map(|(d, wi)| (d.2, *wi)).unzip();

    let points: Vec<TailPoint> = k_grid
        .iter()
        .map(|&k| {
            let ind: Vec<f64> = norms.iter().map(|&m| if m > k { 1.0 } else { 0.0 }).collect();
            let (tail, se) = weighted_mean_se(&ind, &ws);
            TailPoint { k, tail, se, censored: !(tail > 0.0) }
        })
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) =
        points.iter().filter(|p| !p.censored).map(|p| (p.k * p.k, p.tail.ln())).unzip();
    let fit = linear_fit(&x, &y);
    let ensemble = summarize(cfg, &lw, &acc, &w, Vec::new());
    Ok(TailReport {
        sobolev: *sp,
        slope_negative: fit.is_some_and(|f| f.slope < 0.0),
        points,
        fit,
        ensemble,
    })
}
