//! Deterministic initial data.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldPair, SpectralField};

/// Amplitude of the builtin cosine datum `u = v = 2 A cos x`.
pub const COSINE_MODE_AMPLITUDE: f64 = 0.2;

/// Leading amplitude of the builtin smooth datum, `|c(n)| = A n^{-4}`.
pub const SMOOTH_AMPLITUDE: f64 = 0.05;

/// `u = v = 0.4 cos x`, i.e. `û(±1) = v̂(±1) = 0.2`.
pub fn cosine_datum(trunc: usize) -> FieldPair {
    let f = SpectralField::cosine(trunc, 1, 2.0 * COSINE_MODE_AMPLITUDE);
    FieldPair { u: f.clone(), v: f }
}

/// Mean-zero pair with `|û(n)| = |v̂(n)| = A n^{-4}` for `1 <= n <= trunc`
/// and phases drawn from `seed`. Projections of one seed are consistent:
/// `smooth_datum(m, s) = project(smooth_datum(n, s), m)` for `m <= n`.
pub fn smooth_datum(trunc: usize, seed: u64) -> FieldPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpectralField::zeros(trunc);
    let mut v = SpectralField::zeros(trunc);
    for n in 1..=trunc {
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        let r = SMOOTH_AMPLITUDE * (n as f64).powi(-4);
        u.set(n, Complex64::from_polar(r, 2.0 * PI * a));
        v.set(n, Complex64::from_polar(r, 2.0 * PI * b));
    }
    FieldPair { u, v }
}
