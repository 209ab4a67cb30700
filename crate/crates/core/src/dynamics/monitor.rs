use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use super::config::SimConfig;
use super::flow::{rhs, Integrator};
use crate::error::Result;
use crate::field::FieldPair;

/// Conserved quantities of the truncated flow, in physical-integral normalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConservedSnapshot {
    pub t: f64,
    /// `∫ u dx`.
    #[serde(rename = "E1")]
    pub e1: f64,
    /// `∫ v dx`.
    #[serde(rename = "E2")]
    pub e2: f64,
    /// `½ ∫ u² + v² dx`.
    #[serde(rename = "Nval")]
    pub nval: f64,
    /// `½ ∫ u_x² + α v_x² - u v² dx`.
    #[serde(rename = "H_N")]
    pub h_n: f64,
}

pub fn conserved(p: &FieldPair, alpha: f64) -> ConservedSnapshot {
    conserved_at(p, alpha, 0.0)
}

pub fn conserved_at(p: &FieldPair, alpha: f64, t: f64) -> ConservedSnapshot {
    let mut gradient = 0.0;
    for (k, (a, b)) in p.u.coeffs().iter().zip(p.v.coeffs()).enumerate().skip(1) {
        let k2 = (k * k) as f64;
        gradient += 2.0 * k2 * (a.norm_sqr() + alpha * b.norm_sqr());
    }
    ConservedSnapshot {
        t,
        e1: 2.0 * PI * p.u.coeffs()[0].re,
        e2: 2.0 * PI * p.v.coeffs()[0].re,
        nval: PI * (p.u.l2_sq() + p.v.l2_sq()),
        h_n: PI * gradient - 0.5 * p.integral_uvv(),
    }
}

/// Largest deviation from the initial snapshot along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Drift {
    pub e1_abs: f64,
    pub e2_abs: f64,
    pub nval_rel: f64,
    pub h_rel: f64,
}

fn rel(x: f64, x0: f64) -> f64 {
    if x0 == 0.0 {
        x.abs()
    } else {
        ((x - x0) / x0).abs()
    }
}

pub fn drift(snapshots: &[ConservedSnapshot]) -> Drift {
    let Some(first) = snapshots.first() else {
        return Drift { e1_abs: 0.0, e2_abs: 0.0, nval_rel: 0.0, h_rel: 0.0 };
    };
    snapshots.iter().fold(Drift { e1_abs: 0.0, e2_abs: 0.0, nval_rel: 0.0, h_rel: 0.0 }, |d, s| Drift {
        e1_abs: d.e1_abs.max((s.e1 - first.e1).abs()),
        e2_abs: d.e2_abs.max((s.e2 - first.e2).abs()),
        nval_rel: d.nval_rel.max(rel(s.nval, first.nval)),
        h_rel: d.h_rel.max(rel(s.h_n, first.h_n)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    #[serde(flatten)]
    pub snapshot: ConservedSnapshot,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<FieldPair>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub final_state: FieldPair,
}

impl Trajectory {
    pub fn snapshots(&self) -> Vec<ConservedSnapshot> {
        self.records.iter().map(|r| r.snapshot).collect()
    }

    pub fn drift(&self) -> Drift {
        drift(&self.snapshots())
    }

    /// One JSON object per record.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn snapshots_csv(&self) -> String {
        let mut out = String::from("t,E1,E2,Nval,H_N\n");
        for s in self.snapshots() {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e},{:e}", s.t, s.e1, s.e2, s.nval, s.h_n);
        }
        out
    }
}

/// Runs the flow to `T`, recording every `record_every` steps and at the end.
/// With `keep_states` each record also carries the full state.
pub fn integrate(p0: &FieldPair, cfg: &SimConfig, keep_states: bool) -> Result<Trajectory> {
    cfg.validate()?;
    let alpha = cfg.alpha.value();
    let mut integ = Integrator::new(cfg);
    let h = integ.step_size();
    let steps = cfg.steps();
    let mut p = p0.clone();
    let record = |p: &FieldPair, t: f64| Record { snapshot: conserved_at(p, alpha, t), state: keep_states.then(|| p.clone()) };
    let mut records = vec![record(&p, 0.0)];
    for k in 0..steps {
        integ.step(&mut p, k as f64 * h)?;
        if (k + 1) % cfg.record_every == 0 || k + 1 == steps {
            // t from the step count keeps record times free of accumulated rounding
            let t = if k + 1 == steps { cfg.t_final } else { (k + 1) as f64 * h };
            records.push(record(&p, t));
        }
    }
    Ok(Trajectory { records, final_state: p })
}

/// Trace of the Jacobian of the right-hand side in the real coordinates
/// `Re/Im û(n), Re/Im v̂(n)` for `1 <= n <= N`, plus the real zero modes.
///
/// The dispersive rotation has zero diagonal. In the nonlinearity the only
/// entry of `d v̂(n)/dt` that is complex-linear in `v̂(n)` itself is
/// `-i n û(0) v̂(n)`, contributing `2 Re(-i n û(0)) = 2 n Im û(0)` per mode;
/// the `m = -n` term depends on `conj v̂(n)` and is traceless. `d û(n)/dt`
/// does not involve `û`, and both zero modes have zero derivative.
pub fn vector_field_divergence(p: &FieldPair, _alpha: f64) -> f64 {
    let u0 = p.u.coeffs()[0];
    (1..=p.trunc()).map(|n| 2.0 * n as f64 * u0.im).sum()
}

/// The same trace by central differences of [`rhs`] with step `h`.
///
/// The right-hand side is quadratic, so central differences are exact up
/// to rounding and `h` can be large.
pub fn divergence_finite_difference(p: &FieldPair, alpha: f64, h: f64) -> f64 {
    let n = p.trunc();
    let mut trace = 0.0;
    // (component, mode, imaginary?)
    let mut coords: Vec<(usize, usize, bool)> = Vec::with_capacity(4 * n + 2);
    coords.push((0, 0, false));
    coords.push((1, 0, false));
    for k in 1..=n {
        for c in 0..2 {
            coords.push((c, k, false));
            coords.push((c, k, true));
        }
    }
    let bump = |q: &FieldPair, c: usize, k: usize, im: bool, d: f64| -> FieldPair {
        let mut q = q.clone();
        let delta = if im { Complex64::new(0.0, d) } else { Complex64::new(d, 0.0) };
        let f = if c == 0 { &mut q.u } else { &mut q.v };
        f.coeffs_mut()[k] += delta;
        q
    };
    let read = |q: &FieldPair, c: usize, k: usize, im: bool| -> f64 {
        let z = if c == 0 { q.u.coeffs()[k] } else { q.v.coeffs()[k] };
        if im {
            z.im
        } else {
            z.re
        }
    };
    for (c, k, im) in coords {
        let plus = rhs(&bump(p, c, k, im, h), alpha);
        let minus = rhs(&bump(p, c, k, im, -h), alpha);
        trace += (read(&plus, c, k, im) - read(&minus, c, k, im)) / (2.0 * h);
    }
    trace
}
