//! Right-hand side of the truncated system and its time steppers.
//!
//! ```text
//! d/dt û(n) = i n³ û(n)   - (i n / 2) (v̂⋆v̂)(n)
//! d/dt v̂(n) = i α n³ v̂(n) - i n (û⋆v̂)(n),        |n| <= N
//! ```
//!
//! The convolutions are cut back to `|n| <= N`, which is the projection
//! `P_N`. Only `n >= 0` is stored; the `n`-prefactor freezes both means.

use num_complex::Complex64;

use super::config::{Method, SimConfig};
use crate::error::{Error, Result};
use crate::field::{convolve_into, FieldPair};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Fixed-point iteration controls for the implicit midpoint rule.
const MIDPOINT_TOL: f64 = 1e-15;
const MIDPOINT_MAX_ITER: usize = 100;

/// Scratch space for nonlinear evaluations at one truncation.
#[derive(Clone, Debug)]
struct Workspace {
    n: usize,
    uf: Vec<C>,
    vf: Vec<C>,
    conv: Vec<C>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self { n, uf: vec![ZERO; 2 * n + 1], vf: vec![ZERO; 2 * n + 1], conv: vec![ZERO; n + 1] }
    }

    fn fill_full(dst: &mut [C], src: &[C], n: usize) {
        for k in 0..=n {
            dst[n + k] = src[k];
            dst[n - k] = src[k].conj();
        }
    }

    /// Nonlinear part only: `(-(i n/2)(v⋆v)(n), -i n (u⋆v)(n))`.
    fn nonlinear(&mut self, u: &[C], v: &[C], du: &mut [C], dv: &mut [C]) {
        let n = self.n;
        Self::fill_full(&mut self.uf, u, n);
        Self::fill_full(&mut self.vf, v, n);
        convolve_into(&self.vf, &self.vf, n, &mut self.conv);
        for k in 0..=n {
            du[k] = C::new(0.0, -(k as f64) / 2.0) * self.conv[k];
        }
        convolve_into(&self.uf, &self.vf, n, &mut self.conv);
        for k in 0..=n {
            dv[k] = C::new(0.0, -(k as f64)) * self.conv[k];
        }
    }
}

fn pair(n: usize) -> [Vec<C>; 2] {
    [vec![ZERO; n + 1], vec![ZERO; n + 1]]
}

/// Linear frequencies `n³` and `α n³`.
fn frequencies(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let lu: Vec<f64> = (0..=n).map(|k| (k as f64).powi(3)).collect();
    let lv = lu.iter().map(|l| alpha * l).collect();
    (lu, lv)
}

/// Time derivative of the truncated system.
pub fn rhs(p: &FieldPair, alpha: f64) -> FieldPair {
    rhs_with(p, alpha, true)
}

pub fn rhs_with(p: &FieldPair, alpha: f64, nonlinear: bool) -> FieldPair {
    let n = p.trunc();
    let mut out = FieldPair::zeros(n);
    if nonlinear {
        let mut ws = Workspace::new(n);
        let (du, dv) = (&mut vec![ZERO; n + 1], &mut vec![ZERO; n + 1]);
        ws.nonlinear(p.u.coeffs(), p.v.coeffs(), du, dv);
        out.u.coeffs_mut().copy_from_slice(du);
        out.v.coeffs_mut().copy_from_slice(dv);
    }
    let (lu, lv) = frequencies(n, alpha);
    for k in 0..=n {
        out.u.coeffs_mut()[k] += C::new(0.0, lu[k]) * p.u.coeffs()[k];
        out.v.coeffs_mut()[k] += C::new(0.0, lv[k]) * p.v.coeffs()[k];
    }
    out
}

/// A reusable stepper for one configuration.
#[derive(Clone, Debug)]
pub struct Integrator {
    method: Method,
    nonlinear: bool,
    h: f64,
    n: usize,
    ws: Workspace,
    /// `e^{iλh}` and `e^{iλh/2}` (integrating factor) or the Cayley factors
    /// `(1 + iλh/2)/(1 - iλh/2)` and `1/(1 - iλh/2)` (midpoint), for u then v.
    full: [Vec<C>; 2],
    half: [Vec<C>; 2],
}

impl Integrator {
    pub fn new(cfg: &SimConfig) -> Self {
        Self::with_step(cfg, cfg.step_size())
    }

    /// Same configuration with an explicit signed step `h`.
    pub fn with_step(cfg: &SimConfig, h: f64) -> Self {
        let n = cfg.trunc_n;
        let (lu, lv) = frequencies(n, cfg.alpha.value());
        let build = |lam: &[f64]| -> (Vec<C>, Vec<C>) {
            match cfg.method {
                Method::IfRk4 => (
                    lam.iter().map(|l| C::from_polar(1.0, l * h)).collect(),
                    lam.iter().map(|l| C::from_polar(1.0, l * h / 2.0)).collect(),
                ),
                Method::ImplicitMidpoint => (
                    lam.iter().map(|l| C::new(1.0, l * h / 2.0) / C::new(1.0, -l * h / 2.0)).collect(),
                    lam.iter().map(|l| C::new(1.0, 0.0) / C::new(1.0, -l * h / 2.0)).collect(),
                ),
            }
        };
        let (fu, hu) = build(&lu);
        let (fv, hv) = build(&lv);
        Self { method: cfg.method, nonlinear: cfg.nonlinear, h, n, ws: Workspace::new(n), full: [fu, fv], half: [hu, hv] }
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Advances `p` by one step taken from time `t` (used for error reporting).
    pub fn step(&mut self, p: &mut FieldPair, t: f64) -> Result<()> {
        if p.trunc() != self.n {
            return Err(Error::TruncationMismatch { left: p.trunc(), right: self.n });
        }
        if !self.nonlinear {
            for (c, f) in p.u.coeffs_mut().iter_mut().zip(&self.full[0]) {
                *c *= f;
            }
            for (c, f) in p.v.coeffs_mut().iter_mut().zip(&self.full[1]) {
                *c *= f;
            }
        } else {
            match self.method {
                Method::IfRk4 => self.lawson_rk4(p),
                Method::ImplicitMidpoint => self.midpoint(p, t)?,
            }
        }
        // the zero modes are frozen; keep them exactly real
        p.u.coeffs_mut()[0].im = 0.0;
        p.v.coeffs_mut()[0].im = 0.0;
        if !p.is_finite() {
            return Err(Error::IntegrationFailure { time: t + self.h });
        }
        Ok(())
    }

    /// Classical RK4 on `w = e^{-iλt} y`, written back in the original variables.
    fn lawson_rk4(&mut self, p: &mut FieldPair) {
        let n = self.n;
        let h = self.h;
        let y = [p.u.coeffs().to_vec(), p.v.coeffs().to_vec()];
        let mut k = [pair(n), pair(n), pair(n), pair(n)];
        let mut stage = pair(n);

        let [k1, k2, k3, k4] = &mut k;
        {
            let [a, b] = k1;
            self.ws.nonlinear(&y[0], &y[1], a, b);
        }
        // y2 = E_h (y + h/2 k1)
        for c in 0..2 {
            for j in 0..=n {
                stage[c][j] = self.half[c][j] * (y[c][j] + k1[c][j] * (h / 2.0));
            }
        }
        {
            let [a, b] = k2;
            self.ws.nonlinear(&stage[0], &stage[1], a, b);
        }
        // y3 = E_h y + h/2 k2
        for c in 0..2 {
            for j in 0..=n {
                stage[c][j] = self.half[c][j] * y[c][j] + k2[c][j] * (h / 2.0);
            }
        }
        {
            let [a, b] = k3;
            self.ws.nonlinear(&stage[0], &stage[1], a, b);
        }
        // y4 = E y + h E_h k3
        for c in 0..2 {
            for j in 0..=n {
                stage[c][j] = self.full[c][j] * y[c][j] + self.half[c][j] * k3[c][j] * h;
            }
        }
        {
            let [a, b] = k4;
            self.ws.nonlinear(&stage[0], &stage[1], a, b);
        }
        let out = [p.u.coeffs_mut(), p.v.coeffs_mut()];
        for (c, dst) in out.into_iter().enumerate() {
            for j in 0..=n {
                let (e, eh) = (self.full[c][j], self.half[c][j]);
                dst[j] = e * y[c][j] + (e * k1[c][j] + eh * (k2[c][j] + k3[c][j]) * 2.0 + k4[c][j]) * (h / 6.0);
            }
        }
    }

    /// `y1 = C y0 + h D N((y0 + y1)/2)` with Cayley factor `C` and `D = 1/(1 - iλh/2)`,
    /// solved by fixed-point iteration.
    fn midpoint(&mut self, p: &mut FieldPair, t: f64) -> Result<()> {
        let n = self.n;
        let h = self.h;
        let y0 = [p.u.coeffs().to_vec(), p.v.coeffs().to_vec()];
        let mut y1 = y0.clone();
        let mut mid = y0.clone();
        let mut nl = pair(n);
        let scale = y0.iter().flatten().map(|c| c.norm()).fold(1.0, f64::max);
        for _ in 0..MIDPOINT_MAX_ITER {
            for c in 0..2 {
                for j in 0..=n {
                    mid[c][j] = (y0[c][j] + y1[c][j]) * 0.5;
                }
            }
            {
                let [a, b] = &mut nl;
                self.ws.nonlinear(&mid[0], &mid[1], a, b);
            }
            let mut change: f64 = 0.0;
            for c in 0..2 {
                for j in 0..=n {
                    let next = self.full[c][j] * y0[c][j] + self.half[c][j] * nl[c][j] * h;
                    change = change.max((next - y1[c][j]).norm());
                    y1[c][j] = next;
                }
            }
            if !change.is_finite() {
                break;
            }
            if change <= MIDPOINT_TOL * scale {
                p.u.coeffs_mut().copy_from_slice(&y1[0]);
                p.v.coeffs_mut().copy_from_slice(&y1[1]);
                return Ok(());
            }
        }
        Err(Error::IntegrationFailure { time: t })
    }
}

/// One step of the configured method.
pub fn step(p: &FieldPair, cfg: &SimConfig) -> Result<FieldPair> {
    let mut out = p.clone();
    let h = if cfg.t_final < 0.0 { -cfg.dt } else { cfg.dt };
    Integrator::with_step(cfg, h).step(&mut out, 0.0)?;
    Ok(out)
}

/// The state at `T` without recording a trajectory.
pub fn evolve(p0: &FieldPair, cfg: &SimConfig) -> Result<FieldPair> {
    cfg.validate()?;
    let mut p = p0.clone();
    let mut integ = Integrator::new(cfg);
    let h = integ.step_size();
    for k in 0..cfg.steps() {
        integ.step(&mut p, k as f64 * h)?;
    }
    Ok(p)
}
