//! Truncated Fourier representation of real periodic functions on [0, 2π).
//!
//! A [`SpectralField`] stores the coefficients `c(n)` for `0 <= n <= N`; the
//! negative modes are implied by `c(-n) = conj(c(n))`, and `c(0)` is kept
//! real. Conventions used everywhere in the crate:
//!
//! * coefficient sums carry no `1/2π`;
//! * physical-space integrals over `[0, 2π)` carry the explicit `2π`, so
//!   `∫ f g dx = 2π Σ_n f(n) g(-n)`;
//! * the weight is `⟨n⟩ = 1 + |n|`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `⟨n⟩ = 1 + |n|`.
#[inline]
pub fn bracket(n: i64) -> f64 {
    1.0 + n.unsigned_abs() as f64
}

/// A real periodic function stored as Hermitian-symmetric Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(trunc: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); trunc + 1] }
    }

    /// Builds a field from the non-negative modes `0..=N`. The imaginary part
    /// of the zero mode is dropped so the field is real-valued.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a field needs at least the zero mode");
        coeffs[0].im = 0.0;
        Self { coeffs }
    }

    /// `amplitude * cos(k x)`.
    pub fn cosine(trunc: usize, k: usize, amplitude: f64) -> Self {
        let mut f = Self::zeros(trunc);
        if k == 0 {
            f.coeffs[0] = Complex64::new(amplitude, 0.0);
        } else if k <= trunc {
            f.coeffs[k] = Complex64::new(amplitude / 2.0, 0.0);
        }
        f
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Non-negative modes `0..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of mode `n`, any sign; zero beyond the truncation.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let k = n.unsigned_abs() as usize;
        if k > self.trunc() {
            return Complex64::new(0.0, 0.0);
        }
        if n < 0 {
            self.coeffs[k].conj()
        } else {
            self.coeffs[k]
        }
    }

    /// Sets mode `n >= 0` (and implicitly `-n`).
    pub fn set(&mut self, n: usize, value: Complex64) {
        self.coeffs[n] = value;
        if n == 0 {
            self.coeffs[0].im = 0.0;
        }
    }

    /// Zeroes every mode with `|n| > m`; the truncation is unchanged.
    pub fn project(&self, m: usize) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().skip(m + 1) {
            *c = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Same function stored at a different truncation (zero-padding or cutting).
    pub fn resized(&self, trunc: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); trunc + 1];
        for (dst, src) in coeffs.iter_mut().zip(&self.coeffs) {
            *dst = *src;
        }
        Self { coeffs }
    }

    /// `Σ_{|n|<=N} ⟨n⟩^{2s} |c(n)|²`.
    fn weighted_square_sum(&self, s: f64) -> f64 {
        let mut acc = self.coeffs[0].norm_sqr();
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * bracket(n as i64).powf(2.0 * s) * c.norm_sqr();
        }
        acc
    }

    /// `‖f‖_{H^s} = (Σ_{|n|<=N} ⟨n⟩^{2s} |c(n)|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.weighted_square_sum(s).sqrt()
    }

    /// `sup_n ⟨n⟩^{s2} |c(n)|`.
    pub fn sup_weighted_norm(&self, s2: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| bracket(n as i64).powf(s2) * c.norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_{|n|<=N} |c(n)|²`.
    pub fn l2_sq(&self) -> f64 {
        self.weighted_square_sum(0.0)
    }

    /// Translation `f(x) -> f(x - shift)`, i.e. `c(n) -> e^{-i n shift} c(n)`.
    pub fn translate(&self, shift: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * shift))
            .collect();
        Self { coeffs }
    }

    /// Point value of the physical-space function.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * (c * Complex64::from_polar(1.0, n as f64 * x)).re;
        }
        acc
    }

    /// All modes `-N..=N` in order.
    pub fn full(&self) -> Vec<Complex64> {
        let n = self.trunc();
        let mut out = Vec::with_capacity(2 * n + 1);
        out.extend(self.coeffs.iter().skip(1).rev().map(|c| c.conj()));
        out.extend_from_slice(&self.coeffs);
        out
    }

    /// Full (unaliased) convolution, truncation `2N`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.trunc() != other.trunc() {
            return Err(Error::TruncationMismatch { left: self.trunc(), right: other.trunc() });
        }
        let n = self.trunc();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        convolve_into(&self.full(), &other.full(), n, &mut coeffs);
        Ok(Self::from_coeffs(coeffs))
    }

    /// Raw coefficient access for the integrators; callers keep `c(0)` real.
    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Writes `(f⋆g)(k)` for `k = 0..out.len()` given full mode arrays of two
/// fields with truncation `n` (index `j` holds mode `j - n`).
pub(crate) fn convolve_into(f: &[Complex64], g: &[Complex64], n: usize, out: &mut [Complex64]) {
    let n = n as isize;
    for (k, slot) in out.iter_mut().enumerate() {
        let k = k as isize;
        let lo = (k - n).max(-n);
        let hi = n.min(k + n);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut m = lo;
        while m <= hi {
            acc += f[(m + n) as usize] * g[(k - m + n) as usize];
            m += 1;
        }
        *slot = acc;
    }
    if let Some(zero) = out.first_mut() {
        zero.im = 0.0;
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.trunc(), rhs.trunc());
        SpectralField { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.trunc(), rhs.trunc());
        SpectralField { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        SpectralField { coeffs: self.coeffs.iter().map(|c| c * rhs).collect() }
    }
}

/// Regularity pair `(s1, s2)` of the mixed norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSobolev", into = "RawSobolev")]
pub struct SobolevParams {
    s1: f64,
    s2: f64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSobolev {
    s1: f64,
    s2: f64,
}

impl TryFrom<RawSobolev> for SobolevParams {
    type Error = Error;
    fn try_from(raw: RawSobolev) -> Result<Self> {
        Self::new(raw.s1, raw.s2)
    }
}

impl From<SobolevParams> for RawSobolev {
    fn from(p: SobolevParams) -> Self {
        RawSobolev { s1: p.s1, s2: p.s2 }
    }
}

impl SobolevParams {
    /// Requires `1/4 < s1 < 1/2 < s2 < 1` and `2 s1 > s2`.
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        let ok = 0.25 < s1 && s1 < 0.5 && 0.5 < s2 && s2 < 1.0 && 2.0 * s1 > s2;
        if !ok {
            return Err(Error::Config(format!(
                "regularity pair (s1, s2) = ({s1}, {s2}) needs 1/4 < s1 < 1/2 < s2 < 1 and 2 s1 > s2"
            )));
        }
        Ok(Self { s1, s2 })
    }

    /// Skips the window check, e.g. to evaluate norms on its boundary `2 s1 = s2`.
    pub fn new_unchecked(s1: f64, s2: f64) -> Self {
        Self { s1, s2 }
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// `‖f‖_{H^{s1,s2}} = ‖f‖_{H^{s1}} + sup_n ⟨n⟩^{s2}|f(n)|`.
    pub fn component_norm(&self, f: &SpectralField) -> f64 {
        f.sobolev_norm(self.s1) + f.sup_weighted_norm(self.s2)
    }
}

/// The state `(u, v)` of the coupled system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldPairJson", into = "FieldPairJson")]
pub struct FieldPair {
    pub u: SpectralField,
    pub v: SpectralField,
}

impl FieldPair {
    pub fn new(u: SpectralField, v: SpectralField) -> Result<Self> {
        if u.trunc() != v.trunc() {
            return Err(Error::TruncationMismatch { left: u.trunc(), right: v.trunc() });
        }
        Ok(Self { u, v })
    }

    pub fn zeros(trunc: usize) -> Self {
        Self { u: SpectralField::zeros(trunc), v: SpectralField::zeros(trunc) }
    }

    pub fn trunc(&self) -> usize {
        self.u.trunc()
    }

    /// `u` has zero mean.
    pub fn is_mean_zero(&self) -> bool {
        self.u.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn project(&self, m: usize) -> Self {
        Self { u: self.u.project(m), v: self.v.project(m) }
    }

    pub fn resized(&self, trunc: usize) -> Self {
        Self { u: self.u.resized(trunc), v: self.v.resized(trunc) }
    }

    pub fn translate(&self, shift: f64) -> Self {
        Self { u: self.u.translate(shift), v: self.v.translate(shift) }
    }

    /// `(Σ |u(n)|² + |v(n)|²)^{1/2}` over all retained modes.
    pub fn l2_norm(&self) -> f64 {
        (self.u.l2_sq() + self.v.l2_sq()).sqrt()
    }

    /// Sum of the two component `H^{s1,s2}` norms.
    pub fn mixed_norm(&self, sp: &SobolevParams) -> f64 {
        sp.component_norm(&self.u) + sp.component_norm(&self.v)
    }

    /// `∫ u v² dx` over `[0, 2π)`, i.e. `2π Σ_n u(-n) (v⋆v)(n)`.
    pub fn integral_uvv(&self) -> f64 {
        let n = self.trunc();
        let vf = self.v.full();
        let mut vv = vec![Complex64::new(0.0, 0.0); n + 1];
        convolve_into(&vf, &vf, n, &mut vv);
        2.0 * PI * pairing(self.u.coeffs(), &vv)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,u_re,u_im,v_re,v_im\n");
        for (k, (a, b)) in self.u.coeffs.iter().zip(&self.v.coeffs).enumerate() {
            out.push_str(&format!("{k},{:e},{:e},{:e},{:e}\n", a.re, a.im, b.re, b.im));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut u = Vec::new();
        let mut v = Vec::new();
        for (i, line) in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).enumerate() {
            if i == 0 && line.starts_with('n') {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{line}: {e}"))))
                .collect::<Result<_>>()?;
            if cols.len() != 5 || cols[0] as usize != u.len() {
                return Err(Error::Parse(format!("bad field row: {line}")));
            }
            u.push(Complex64::new(cols[1], cols[2]));
            v.push(Complex64::new(cols[3], cols[4]));
        }
        if u.is_empty() {
            return Err(Error::Parse("empty field table".into()));
        }
        Self::new(SpectralField::from_coeffs(u), SpectralField::from_coeffs(v))
    }
}

/// `Σ_{|n|<=N} a(-n) b(n)` for Hermitian `a`, `b` given by their non-negative modes.
pub(crate) fn pairing(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut acc = a[0].re * b[0].re;
    for (x, y) in a.iter().zip(b).skip(1) {
        acc += 2.0 * (x.conj() * y).re;
    }
    acc
}

impl Add for &FieldPair {
    type Output = FieldPair;
    fn add(self, rhs: &FieldPair) -> FieldPair {
        FieldPair { u: &self.u + &rhs.u, v: &self.v + &rhs.v }
    }
}

impl Sub for &FieldPair {
    type Output = FieldPair;
    fn sub(self, rhs: &FieldPair) -> FieldPair {
        FieldPair { u: &self.u - &rhs.u, v: &self.v - &rhs.v }
    }
}

impl Mul<f64> for &FieldPair {
    type Output = FieldPair;
    fn mul(self, rhs: f64) -> FieldPair {
        FieldPair { u: &self.u * rhs, v: &self.v * rhs }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldPairJson {
    #[serde(rename = "N")]
    n: usize,
    u: Vec<[f64; 2]>,
    v: Vec<[f64; 2]>,
}

impl TryFrom<FieldPairJson> for FieldPair {
    type Error = Error;
    fn try_from(raw: FieldPairJson) -> Result<Self> {
        if raw.u.len() != raw.n + 1 || raw.v.len() != raw.n + 1 {
            return Err(Error::Parse(format!(
                "field pair with N = {} needs {} coefficients per component",
                raw.n,
                raw.n + 1
            )));
        }
        let conv = |xs: Vec<[f64; 2]>| {
            SpectralField::from_coeffs(xs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        };
        FieldPair::new(conv(raw.u), conv(raw.v))
    }
}

impl From<FieldPair> for FieldPairJson {
    fn from(p: FieldPair) -> Self {
        let conv = |f: &SpectralField| f.coeffs.iter().map(|c| [c.re, c.im]).collect();
        FieldPairJson { n: p.trunc(), u: conv(&p.u), v: conv(&p.v) }
    }
}
