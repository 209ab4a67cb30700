use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::CouplingParam;

/// Largest `|λ dt|` on the imaginary axis for which classical RK4 is stable.
pub const RK4_IMAGINARY_LIMIT: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Lawson integrating-factor RK4: the dispersive part is integrated exactly.
    #[default]
    #[serde(rename = "if-rk4")]
    IfRk4,
    /// Implicit midpoint with the linear part in Cayley form; conserves quadratic invariants.
    #[serde(rename = "implicit-midpoint")]
    ImplicitMidpoint,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "if-rk4" => Ok(Self::IfRk4),
            "implicit-midpoint" => Ok(Self::ImplicitMidpoint),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// Time-stepping parameters for the truncated flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(rename = "N")]
    pub trunc_n: usize,
    pub alpha: CouplingParam,
    pub dt: f64,
    /// Horizon; negative values run the flow backwards.
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "one")]
    pub record_every: usize,
    /// Switching this off leaves the pure dispersive rotation.
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl SimConfig {
    pub fn new(trunc_n: usize, alpha: CouplingParam, dt: f64, t_final: f64) -> Result<Self> {
        let cfg = Self { trunc_n, alpha, dt, t_final, method: Method::IfRk4, record_every: 1, nonlinear: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_record_every(mut self, k: usize) -> Self {
        self.record_every = k.max(1);
        self
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trunc_n == 0 {
            return Err(Error::Config("N must be positive".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !self.t_final.is_finite() {
            return Err(Error::Config("T must be finite".into()));
        }
        if self.t_final != 0.0 && self.dt > self.t_final.abs() {
            return Err(Error::Config(format!("dt = {} exceeds |T| = {}", self.dt, self.t_final.abs())));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps; the step is shortened to `T / steps` when `dt` does not divide `T`.
    pub fn steps(&self) -> usize {
        if self.t_final == 0.0 {
            return 0;
        }
        (self.t_final.abs() / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    /// Signed step actually taken.
    pub fn step_size(&self) -> f64 {
        match self.steps() {
            0 => 0.0,
            k => self.t_final / k as f64,
        }
    }

    /// `dt N³ max(1, α)`: the phase advanced by the fastest mode per step.
    pub fn stiffness(&self) -> f64 {
        self.dt * (self.trunc_n as f64).powi(3) * self.alpha.value().max(1.0)
    }

    /// Both methods treat the linear part exactly, so a large stiffness is
    /// only worth a warning: it means the nonlinear coupling between fast
    /// modes is resolved less accurately, not that the scheme is unstable.
    pub fn stability_warning(&self) -> Option<String> {
        (self.stiffness() > RK4_IMAGINARY_LIMIT).then(|| {
            format!(
                "dt N^3 max(1, alpha) = {:.3} exceeds {:.3}; the dispersion is integrated exactly but fast-mode interactions are under-resolved",
                self.stiffness(),
                RK4_IMAGINARY_LIMIT
            )
        })
    }
}
