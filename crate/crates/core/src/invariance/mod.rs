//! Monte Carlo checks of the statistical claims: invariance of `μ_N` under
//! the truncated flow, growth of the mixed norm along Gibbs trajectories,
//! and convergence of the truncated solutions as `N` grows.

mod convergence;
mod growth;
mod paired;

use serde::Serialize;

use crate::field::FieldPair;

pub use convergence::{truncation_convergence, ConvergenceReport, ConvergenceRow};
pub use growth::{growth_profile, GrowthPoint, GrowthReport};
pub use paired::{
    invariance_test, non_invariance_control, FunctionalResult, InvarianceReport, InvarianceRun, PairedRecord,
    DIFF_RESOLUTION, MAX_FAILURE_FRACTION, Z_THRESHOLD,
};

/// A bounded function of finitely many modes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TestFunctional {
    pub name: &'static str,
    /// Highest mode the value depends on.
    pub max_mode: usize,
    /// `sup |f|`.
    pub bound: f64,
    #[serde(skip)]
    f: fn(&FieldPair) -> f64,
}

impl TestFunctional {
    pub fn new(name: &'static str, max_mode: usize, bound: f64, f: fn(&FieldPair) -> f64) -> Self {
        Self { name, max_mode, bound, f }
    }

    pub fn eval(&self, p: &FieldPair) -> f64 {
        (self.f)(p)
    }
}

pub fn builtin_functionals() -> Vec<TestFunctional> {
    vec![
        TestFunctional::new("cos_re_u1", 1, 1.0, |p| p.u.coeff(1).re.cos()),
        TestFunctional::new("exp_v2", 2, 1.0, |p| (-p.v.coeff(2).norm_sqr()).exp()),
        TestFunctional::new("tanh_u2_v1", 2, 1.0, |p| (p.u.coeff(2).re * p.v.coeff(1).im).tanh()),
        TestFunctional::new("min_u1_10", 1, 10.0, |p| p.u.coeff(1).norm_sqr().min(10.0)),
        TestFunctional::new("sin_im_v3", 3, 1.0, |p| p.v.coeff(3).im.sin()),
    ]
}

/// Looks up builtins by name.
pub fn functionals_by_name(names: &[String]) -> crate::Result<Vec<TestFunctional>> {
    let all = builtin_functionals();
    names
        .iter()
        .map(|n| {
            all.iter()
                .find(|f| f.name == n)
                .copied()
                .ok_or_else(|| crate::Error::Config(format!("unknown functional {n:?}")))
        })
        .collect()
}
