//! Dyadic-block scans: empirical lower bounds on the near-resonant gaps and
//! maxima of the bilinear multiplier weights.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupling::{rational_string, CouplingParam};
use super::diophantine::{estimate_type_index, DiophantineEstimate, DiophantineInput};
use super::gaps::{candidates, enumerate_near_resonant, family_roots, gap_f64, Family};
use super::roots::{compute_c_roots, RootPair};
use crate::error::{Error, Result};
use crate::field::SobolevParams;
use crate::stats::{linear_fit, LinearFit};

/// Continued-fraction depth used for the roots' type indices.
pub const TYPE_INDEX_DEPTH: usize = 50;

/// Complete dyadic blocks `[2^k, 2^{k+1})` inside `[1, n_max]`.
pub fn dyadic_blocks(n_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut lo = 1i64;
    while 2 * lo - 1 <= n_max {
        out.push((lo, 2 * lo - 1));
        lo *= 2;
    }
    out
}

/// Type-index estimates for both roots at depth [`TYPE_INDEX_DEPTH`], exact when the roots are surds.
pub fn root_estimates(roots: &RootPair) -> Vec<DiophantineEstimate> {
    match roots.surds() {
        Some(surds) => {
            surds.iter().map(|s| estimate_type_index(&DiophantineInput::Surd((*s).clone()), TYPE_INDEX_DEPTH)).collect()
        }
        None => roots
            .values()
            .iter()
            .map(|&c| estimate_type_index(&DiophantineInput::Float(c), TYPE_INDEX_DEPTH))
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapBlock {
    pub lo: i64,
    pub hi: i64,
    pub min_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_gap_exact: Option<String>,
    pub argmin_n: i64,
    pub argmin_n1: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub alpha: CouplingParam,
    pub family: Family,
    pub n_max: i64,
    pub eps: f64,
    pub roots: Vec<DiophantineEstimate>,
    /// Largest estimated type index among the family's roots.
    pub nu_hat: Option<f64>,
    /// `1 - ν - ε`.
    pub predicted_exponent: Option<f64>,
    pub blocks: Vec<GapBlock>,
    pub fit: Option<LinearFit>,
    pub empirical_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    /// Positive `n` carrying an exactly resonant triple.
    pub exact_resonances: Vec<i64>,
}

/// Minimum near-resonant gap per dyadic block of `|n|` and a log-log fit of
/// the block minima against `|n|` at the minimizer.
pub fn verify_lower_bound(alpha: &CouplingParam, n_max: i64, eps: f64, family: Family) -> Result<LowerBoundReport> {
    if n_max < 16 {
        return Err(Error::Config(format!("lower-bound fit needs N_max >= 16, got {n_max}")));
    }
    let roots = family_roots(alpha, family)?;
    let estimates = root_estimates(&roots);
    let rational = estimates.iter().any(|e| e.is_rational);
    let nu_hat = if rational {
        None
    } else {
        estimates.iter().filter_map(|e| e.nu_hat.finite()).reduce(f64::max)
    };
    let triples = enumerate_near_resonant(alpha, n_max, family)?;

    let mut exact_resonances: Vec<i64> =
        triples.iter().filter(|t| t.gap.is_exact_zero()).map(|t| t.n.abs()).collect();
    exact_resonances.sort_unstable();
    exact_resonances.dedup();

    let mut blocks = Vec::new();
    for (lo, hi) in dyadic_blocks(n_max) {
        let best = triples
            .iter()
            .filter(|t| (lo..=hi).contains(&t.n.abs()))
            .min_by(|a, b| a.gap.value.total_cmp(&b.gap.value).then(a.n.abs().cmp(&b.n.abs())));
        if let Some(t) = best {
            blocks.push(GapBlock {
                lo,
                hi,
                min_gap: t.gap.value,
                min_gap_exact: t.gap.exact.as_ref().map(rational_string),
                argmin_n: t.n.abs(),
                argmin_n1: if t.n < 0 { -t.n1 } else { t.n1 },
            });
        }
    }

    let (fit, flag) = if rational {
        (None, Some("infinitely many exact resonances".to_string()))
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = blocks
            .iter()
            .filter(|b| b.min_gap > 0.0)
            .map(|b| ((b.argmin_n as f64).ln(), b.min_gap.ln()))
            .unzip();
        (linear_fit(&xs, &ys), None)
    };
    Ok(LowerBoundReport {
        alpha: alpha.clone(),
        family,
        n_max,
        eps,
        roots: estimates,
        nu_hat,
        predicted_exponent: nu_hat.map(|nu| 1.0 - nu - eps),
        empirical_exponent: fit.map(|f| f.slope),
        blocks,
        fit,
        flag,
        exact_resonances,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "resonant-B")]
    ResonantB,
    #[serde(rename = "resonant-D")]
    ResonantD,
    #[serde(rename = "nonresonant-B")]
    NonresonantB,
    #[serde(rename = "nonresonant-D")]
    NonresonantD,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Self::ResonantB, Self::ResonantD, Self::NonresonantB, Self::NonresonantD];

    pub fn family(self) -> Family {
        match self {
            Self::ResonantB | Self::NonresonantB => Family::B,
            Self::ResonantD | Self::NonresonantD => Family::D,
        }
    }

    pub fn is_resonant(self) -> bool {
        matches!(self, Self::ResonantB | Self::ResonantD)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ResonantB => "resonant-B",
            Self::ResonantD => "resonant-D",
            Self::NonresonantB => "nonresonant-B",
            Self::NonresonantD => "nonresonant-D",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| Error::Parse(format!("unknown regime {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Growing,
    NonIncreasing,
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanBlock {
    pub lo: i64,
    pub hi: i64,
    pub block_max: f64,
    pub argmax_n: i64,
    pub argmax_n1: i64,
    pub running_sup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub alpha: CouplingParam,
    pub regime: Regime,
    pub s1: f64,
    pub s2: f64,
    pub n_max: i64,
    pub blocks: Vec<ScanBlock>,
    pub trend: Trend,
    /// First block from which the block maxima never increase.
    pub nonincreasing_from: Option<i64>,
    /// First block from which the running supremum strictly increases at every block.
    pub growing_from: Option<i64>,
    pub all_positive_finite: bool,
    /// `n0` past which `|n| ∼ |n1| ∼ |n2|` holds on family B (B regimes only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparability_onset: Option<i64>,
}

/// Block maxima of the regime's multiplier weight over positive `n`
/// (the weights are even under `(n, n1) -> (-n, -n1)`).
///
/// Resonant regimes range over the near-resonant candidates; non-resonant
/// regimes over all `n1` with `|n1|, |n2| <= n_max` outside them. Family D
/// skips `n1 = 0`, which would pair with the zero mode of the mean-zero `u`.
pub fn multiplier_scan(alpha: &CouplingParam, sp: &SobolevParams, n_max: i64, regime: Regime) -> Result<ScanReport> {
    let family = regime.family();
    let roots = family_roots(alpha, family)?;
    let a = alpha.value();
    let (s1, s2) = (sp.s1(), sp.s2());
    let low_exp = if regime.is_resonant() { s2 } else { s1 };
    // ⟨k⟩^{-low_exp} for |k| <= 2 n_max
    let table: Vec<f64> = (0..=2 * n_max as usize + 1).map(|k| (1.0 + k as f64).powf(-low_exp)).collect();
    // resonant-D candidates can sit far outside the table (|d2| is large near α = 1)
    let inv = |k: i64| table.get(k.unsigned_abs() as usize).copied().unwrap_or_else(|| (1.0 + k.abs() as f64).powf(-low_exp));

    let weight = |n: i64, n1: i64| -> f64 {
        let g = gap_f64(a, n, n1, family);
        (1.0 + n as f64).powf(s2 + 1.0) * inv(n1) * inv(n - n1) / (1.0 + g).sqrt()
    };

    let blocks: Vec<(i64, i64, f64, i64, i64)> = dyadic_blocks(n_max)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut best = (f64::NEG_INFINITY, 0, 0);
            for n in lo..=hi {
                let near = candidates(&roots, n);
                let mut consider = |n1: i64| {
                    if family == Family::D && n1 == 0 {
                        return;
                    }
                    let w = weight(n, n1);
                    if w > best.0 {
                        best = (w, n, n1);
                    }
                };
                if regime.is_resonant() {
                    near.iter().for_each(|&n1| consider(n1));
                } else {
                    for n1 in (n - n_max).max(-n_max)..=n_max {
                        if near.binary_search(&n1).is_err() {
                            consider(n1);
                        }
                    }
                }
            }
            (lo, hi, best.0, best.1, best.2)
        })
        .collect();

    let mut running = f64::NEG_INFINITY;
    let blocks: Vec<ScanBlock> = blocks
        .into_iter()
        .map(|(lo, hi, block_max, argmax_n, argmax_n1)| {
            running = running.max(block_max);
            ScanBlock { lo, hi, block_max, argmax_n, argmax_n1, running_sup: running }
        })
        .collect();

    let maxima: Vec<f64> = blocks.iter().map(|b| b.block_max).collect();
    let nonincreasing_from = (0..maxima.len())
        .find(|&i| maxima[i..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)))
        .map(|i| blocks[i].lo);
    let sups: Vec<f64> = blocks.iter().map(|b| b.running_sup).collect();
    let growing_from = (0..sups.len())
        .find(|&i| sups.len() - i >= 2 && sups[i..].windows(2).all(|w| w[1] > w[0]))
        .map(|i| blocks[i].lo);
    let midpoint = blocks.get(blocks.len() / 2).map_or(i64::MAX, |b| b.lo);
    let trend = if growing_from.is_some_and(|lo| lo <= midpoint) {
        Trend::Growing
    } else if nonincreasing_from.is_some_and(|lo| lo <= midpoint) {
        Trend::NonIncreasing
    } else {
        Trend::Mixed
    };
    let all_positive_finite = maxima.iter().all(|w| w.is_finite() && *w > 0.0);
    let comparability_onset = if family == Family::B { comparability_onset(alpha, n_max)? } else { None };
    Ok(ScanReport {
        alpha: alpha.clone(),
        regime,
        s1,
        s2,
        n_max,
        blocks,
        trend,
        nonincreasing_from,
        growing_from,
        all_positive_finite,
        comparability_onset,
    })
}

/// Smallest `n0` such that every family-B triple with `n0 <= |n| <= n_max`
/// has `|n1|/|n|` and `|n2|/|n|` in `[min|c|/2, 2 max|c|]`.
pub fn comparability_onset(alpha: &CouplingParam, n_max: i64) -> Result<Option<i64>> {
    let roots = compute_c_roots(alpha)?;
    let [c1, c2] = roots.values();
    let lo = c1.abs().min(c2.abs()) / 2.0;
    let hi = 2.0 * c1.abs().max(c2.abs());
    let mut last_bad = 0;
    for n in 1..=n_max {
        let ok = candidates(&roots, n).iter().all(|&n1| {
            let (r1, r2) = (n1.abs() as f64 / n as f64, (n - n1).abs() as f64 / n as f64);
            (lo..=hi).contains(&r1) && (lo..=hi).contains(&r2)
        });
        if !ok {
            last_bad = n;
        }
    }
    Ok((last_bad < n_max).then_some(last_bad + 1))
}
