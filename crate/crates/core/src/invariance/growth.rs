use rayon::prelude::*;
use serde::Serialize;

use super::MAX_FAILURE_FRACTION;
use crate::dynamics::{Integrator, SimConfig};
use crate::error::{Error, Result};
use crate::field::{FieldPair, SobolevParams};
use crate::measure::{sample_gibbs_ensemble, MeasureConfig};
use crate::stats::{effective_sample_size, linear_fit, weighted_quantile, LinearFit};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    #[serde(rename = "T")]
    pub t: f64,
    /// Weighted `(1-ε)`-quantile of `sup_{t<=T} ‖(u, v)(t)‖_{H^{s1,s2}}`.
    pub quantile: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub eps: f64,
    pub sobolev: SobolevParams,
    pub measure: MeasureConfig,
    pub sim: SimConfig,
    pub evolved: usize,
    pub failures: usize,
    /// False when nothing survived or too many integrations failed.
    pub valid: bool,
    pub ess: f64,
    pub points: Vec<GrowthPoint>,
    pub nondecreasing: bool,
    /// `quantile² ≈ intercept + slope log T` over `T > 0`.
    pub fit: Option<LinearFit>,
}

/// Running supremum of the mixed norm, read off at each grid time. The
/// norm is sampled every `record_every` steps and at every grid time.
pub(crate) fn sup_profile(p: &FieldPair, flow: &SimConfig, sp: &SobolevParams, marks: &[usize]) -> Result<Vec<f64>> {
    let mut integ = Integrator::new(flow);
    let h = integ.step_size();
    let mut q = p.clone();
    let mut sup = q.mixed_norm(sp);
    let mut out = Vec::with_capacity(marks.len());
    let mut next = 0;
    while next < marks.len() && marks[next] == 0 {
        out.push(sup);
        next += 1;
    }
    let last = marks.last().copied().unwrap_or(0);
    for k in 0..last {
        integ.step(&mut q, k as f64 * h)?;
        let at_mark = marks.get(next) == Some(&(k + 1));
        if at_mark || (k + 1) % flow.record_every == 0 {
            sup = sup.max(q.mixed_norm(sp));
        }
        while next < marks.len() && marks[next] == k + 1 {
            out.push(sup);
            next += 1;
        }
    }
    Ok(out)
}

/// Quantiles of the running mixed-norm supremum over a Gibbs ensemble.
/// Samples whose integration fails are left out and counted.
pub fn growth_profile(
    mcfg: &MeasureConfig,
    scfg: &SimConfig,
    sp: &SobolevParams,
    t_grid: &[f64],
    eps: f64,
) -> Result<GrowthReport> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[0] < w[1])) || t_grid[0] < 0.0 {
        return Err(Error::Config("T grid must be non-empty, non-negative and strictly increasing".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Config(format!("eps must lie in (0, 1), got {eps}")));
    }
    if mcfg.trunc_n != scfg.trunc_n {
        return Err(Error::TruncationMismatch { left: mcfg.trunc_n, right: scfg.trunc_n });
    }
    let t_max = *t_grid.last().unwrap();
    let flow = SimConfig { t_final: t_max, ..scfg.clone() };
    flow.validate()?;
    let h = flow.step_size();
    let marks: Vec<usize> =
        t_grid.iter().map(|&t| if h == 0.0 { 0 } else { ((t / h).round() as usize).min(flow.steps()) }).collect();

    let ens = sample_gibbs_ensemble(mcfg, &[])?;
    let weights = ens.weights();
    let runs: Vec<(f64, Option<Vec<f64>>)> = ens
        .samples
        .par_iter()
        .zip(weights.par_iter())
        .filter_map(|(s, &w)| s.state.as_ref().map(|p| (w, p)))
        .map(|(w, p)| match sup_profile(p, &flow, sp, &marks) {
            Ok(v) => Ok((w, Some(v))),
            Err(Error::IntegrationFailure { .. }) => Ok((w, None)),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let failures = runs.iter().filter(|r| r.1.is_none()).count();
    let ok: Vec<(f64, &Vec<f64>)> = runs.iter().filter_map(|(w, v)| v.as_ref().map(|v| (*w, v))).collect();
    let ws: Vec<f64> = ok.iter().map(|r| r.0).collect();
    let points: Vec<GrowthPoint> = t_grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let vals: Vec<f64> = ok.iter().map(|r| r.1[j]).collect();
            GrowthPoint { t, quantile: weighted_quantile(&vals, &ws, 1.0 - eps) }
        })
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) =
        points.iter().filter(|p| p.t > 0.0).map(|p| (p.t.ln(), p.quantile * p.quantile)).unzip();
    Ok(GrowthReport {
        eps,
        sobolev: *sp,
        measure: mcfg.clone(),
        sim: flow,
        evolved: ok.len(),
        failures,
        valid: !ok.is_empty() && failures as f64 <= MAX_FAILURE_FRACTION * runs.len() as f64,
        ess: effective_sample_size(&ws),
        nondecreasing: points.windows(2).all(|w| w[1].quantile >= w[0].quantile),
        points,
        fit: linear_fit(&x, &y),
    })
}
