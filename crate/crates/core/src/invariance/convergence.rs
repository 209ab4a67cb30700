use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{evolve, Method, SimConfig};
use crate::error::{Error, Result};
use crate::field::{FieldPair, SobolevParams};
use crate::resonance::CouplingParam;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub trunc_n: usize,
    /// `‖S_N^T P_N p0 - S_ref^T P_ref p0‖_{H^{s1,s2}}`, the reference being the largest `N`.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub alpha: CouplingParam,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dt: f64,
    pub method: Method,
    pub sobolev: SobolevParams,
    pub rows: Vec<ConvergenceRow>,
    /// Errors below the reference row strictly decrease.
    pub strictly_decreasing: bool,
    /// First `N` from which the errors never increase again.
    pub nonincreasing_from: Option<usize>,
}

/// Evolves `project(p0, N)` for every `N` in `n_list` and measures the
/// distance to the largest-`N` solution at `T`.
pub fn truncation_convergence(
    p0: &FieldPair,
    alpha: &CouplingParam,
    n_list: &[usize],
    t_final: f64,
    dt: f64,
    method: Method,
    sp: &SobolevParams,
) -> Result<ConvergenceReport> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("N list must be non-empty, positive and strictly increasing".into()));
    }
    let top = *n_list.last().unwrap();
    let finals: Vec<FieldPair> = n_list
        .par_iter()
        .map(|&n| {
            let cfg = SimConfig::new(n, alpha.clone(), dt, t_final)?.with_method(method);
            let start = p0.project(n).resized(n);
            Ok(evolve(&start, &cfg)?.resized(top))
        })
        .collect::<Result<_>>()?;
    let reference = finals.last().unwrap();
    let rows: Vec<ConvergenceRow> = n_list
        .iter()
        .zip(&finals)
        .map(|(&n, q)| ConvergenceRow { trunc_n: n, error: (q - reference).mixed_norm(sp) })
        .collect();
    let below = &rows[..rows.len() - 1];
    let strictly_decreasing = below.windows(2).all(|w| w[1].error < w[0].error);
    let mut nonincreasing_from = None;
    for i in (0..rows.len()).rev() {
        if i + 1 == rows.len() || rows[i].error >= rows[i + 1].error {
            nonincreasing_from = Some(rows[i].trunc_n);
        } else {
            break;
        }
    }
    Ok(ConvergenceReport {
        alpha: alpha.clone(),
        t_final,
        dt,
        method,
        sobolev: *sp,
        rows,
        strictly_decreasing,
        nonincreasing_from,
    })
}
