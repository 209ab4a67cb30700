use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::TestFunctional;
use crate::dynamics::{evolve, SimConfig};
use crate::error::{Error, Result};
use crate::field::FieldPair;
use crate::measure::{sample_gibbs_ensemble, MeasureConfig};
use crate::stats::{effective_sample_size, weighted_mean_se};

/// Per-functional significance threshold on `|z|`.
pub const Z_THRESHOLD: f64 = 3.0;

/// A run with more integration failures than this fraction is invalid.
pub const MAX_FAILURE_FRACTION: f64 = 1e-3;

/// Paired differences are only computed to about this fraction of a
/// functional's bound, so the standard error used for `z` is floored there.
pub const DIFF_RESOLUTION: f64 = 1e-12;

/// `P(|Z| > 3)` for a standard normal.
const TWO_SIDED_TAIL_AT_3: f64 = 2.699_796_063_260_2e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalResult {
    pub name: String,
    pub max_mode: usize,
    pub bound: f64,
    pub mean_before: f64,
    pub mean_after: f64,
    /// Weighted mean of the paired difference `f(S_t p) - f(p)`.
    pub mean_diff: f64,
    pub se: f64,
    /// `mean_diff / max(se, resolution · bound)`.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    /// `"invariance"` (Gibbs weights) or `"control"` (weights dropped).
    pub kind: &'static str,
    pub t: f64,
    pub measure: MeasureConfig,
    pub sim: SimConfig,
    pub samples: usize,
    pub accepted: usize,
    pub evolved: usize,
    pub failures: usize,
    pub ess: f64,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub z_threshold: f64,
    pub max_abs_z: f64,
    /// Bonferroni bound on the chance that some `|z|` exceeds the threshold
    /// when every functional is invariant.
    pub family_wise_level: f64,
    pub functionals: Vec<FunctionalResult>,
}

impl InvarianceReport {
    pub fn passes(&self) -> bool {
        self.valid && self.max_abs_z < self.z_threshold
    }
}

/// Per-sample weight and functional values, for re-analysis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairedRecord {
    pub index: usize,
    pub weight: f64,
    pub before: Vec<f64>,
    pub after: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct InvarianceRun {
    pub report: InvarianceReport,
    pub records: Vec<PairedRecord>,
}

impl InvarianceRun {
    /// `index,weight,<f>_before,<f>_after,...`
    pub fn records_csv(&self) -> String {
        let mut out = String::from("index,weight");
        for f in &self.report.functionals {
            let _ = write!(out, ",{0}_before,{0}_after", f.name);
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{},{:e}", r.index, r.weight);
            for (b, a) in r.before.iter().zip(&r.after) {
                let _ = write!(out, ",{b:e},{a:e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Paired test of `E_μ f(S_t p) = E_μ f(p)` on the accepted samples of the
/// Gibbs ensemble.
pub fn invariance_test(mcfg: &MeasureConfig, scfg: &SimConfig, t: f64, fs: &[TestFunctional]) -> Result<InvarianceRun> {
    run(mcfg, scfg, t, fs, "invariance")
}

/// The same test on the Gaussian ensemble with cutoff but without the Gibbs
/// weight, evolved under the configured flow.
pub fn non_invariance_control(
    mcfg: &MeasureConfig,
    scfg: &SimConfig,
    t: f64,
    fs: &[TestFunctional],
) -> Result<InvarianceRun> {
    run(&mcfg.clone().unweighted(), scfg, t, fs, "control")
}

fn run(mcfg: &MeasureConfig, scfg: &SimConfig, t: f64, fs: &[TestFunctional], kind: &'static str) -> Result<InvarianceRun> {
    if mcfg.trunc_n != scfg.trunc_n {
        return Err(Error::TruncationMismatch { left: mcfg.trunc_n, right: scfg.trunc_n });
    }
    if mcfg.alpha != scfg.alpha {
        return Err(Error::Config(format!("alpha differs: measure {} vs flow {}", mcfg.alpha, scfg.alpha)));
    }
    if fs.is_empty() {
        return Err(Error::Config("no test functionals".into()));
    }
    let flow = SimConfig { t_final: t, ..scfg.clone() };
    flow.validate()?;
    let ens = sample_gibbs_ensemble(mcfg, fs)?;
    let weights = ens.weights();

    let evolved: Vec<(usize, f64, Option<FieldPair>, &FieldPair)> = ens
        .samples
        .par_iter()
        .zip(weights.par_iter())
        .filter_map(|(s, &w)| s.state.as_ref().map(|p| (s.index, w, p)))
        .map(|(i, w, p)| match evolve(p, &flow) {
            Ok(q) => Ok((i, w, Some(q), p)),
            Err(Error::IntegrationFailure { .. }) => Ok((i, w, None, p)),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let failures = evolved.iter().filter(|e| e.2.is_none()).count();
    let records: Vec<PairedRecord> = evolved
        .iter()
        .filter_map(|(i, w, q, p)| {
            q.as_ref().map(|q| PairedRecord {
                index: *i,
                weight: *w,
                before: fs.iter().map(|f| f.eval(p)).collect(),
                after: fs.iter().map(|f| f.eval(q)).collect(),
            })
        })
        .collect();

    let ws: Vec<f64> = records.iter().map(|r| r.weight).collect();
    let functionals: Vec<FunctionalResult> = fs
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let before: Vec<f64> = records.iter().map(|r| r.before[j]).collect();
            let after: Vec<f64> = records.iter().map(|r| r.after[j]).collect();
            let diff: Vec<f64> = records.iter().map(|r| r.after[j] - r.before[j]).collect();
            let (mean_diff, se) = weighted_mean_se(&diff, &ws);
            let z = if mean_diff == 0.0 { 0.0 } else { mean_diff / se.max(DIFF_RESOLUTION * f.bound) };
            FunctionalResult {
                name: f.name.to_string(),
                max_mode: f.max_mode,
                bound: f.bound,
                mean_before: weighted_mean_se(&before, &ws).0,
                mean_after: weighted_mean_se(&after, &ws).0,
                mean_diff,
                se,
                z,
            }
        })
        .collect();

    let accepted = ens.report.accepted;
    let invalid_reason = if records.is_empty() {
        Some("no accepted sample survived".to_string())
    } else if failures as f64 > MAX_FAILURE_FRACTION * accepted as f64 {
        Some(format!("{failures} of {accepted} integrations failed"))
    } else {
        None
    };
    let max_abs_z = functionals.iter().map(|f| f.z.abs()).fold(0.0, f64::max);
    let report = InvarianceReport {
        kind,
        t,
        measure: mcfg.clone(),
        sim: flow,
        samples: mcfg.samples,
        accepted,
        evolved: records.len(),
        failures,
        ess: effective_sample_size(&ws),
        valid: invalid_reason.is_none(),
        invalid_reason,
        warning: ens.report.warning.clone(),
        z_threshold: Z_THRESHOLD,
        max_abs_z,
        family_wise_level: (fs.len() as f64 * TWO_SIDED_TAIL_AT_3).min(1.0),
        functionals,
    };
    Ok(InvarianceRun { report, records })
}
