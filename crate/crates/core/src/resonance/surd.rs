//! Exact quadratic surds `(P + √D) / Q` and their continued fractions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::coupling::rational_to_f64;

/// The real number `(p + √d) / q` with integers `d >= 0`, `q != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadSurd {
    #[serde(rename = "P", with = "bigint_text")]
    pub p: BigInt,
    #[serde(rename = "D", with = "bigint_text")]
    pub d: BigInt,
    #[serde(rename = "Q", with = "bigint_text")]
    pub q: BigInt,
}

impl QuadSurd {
    pub fn new(p: impl Into<BigInt>, d: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        let (p, d, q) = (p.into(), d.into(), q.into());
        assert!(!d.is_negative(), "negative radicand");
        assert!(!q.is_zero(), "zero denominator");
        Self { p, d, q }
    }

    /// `Some(r)` when the radicand is a perfect square.
    pub fn as_rational(&self) -> Option<BigRational> {
        let r = self.d.sqrt();
        (&r * &r == self.d).then(|| BigRational::new(&self.p + r, self.q.clone()))
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return rational_to_f64(&r);
        }
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        // (p + √d) cancels when p ≈ -√d; use (d - p²) / (q (√d - p)) there
        if p < 0.0 {
            let num = (&self.d - &self.p * &self.p).to_f64().unwrap_or(f64::NAN);
            return num / (q * (d.sqrt() - p));
        }
        (p + d.sqrt()) / q
    }

    /// `⌊k · x⌋` in exact integer arithmetic.
    pub fn floor_mul(&self, k: &BigInt) -> BigInt {
        // k x = (k p + sign(k) √(k² d)) / q
        let sign = if k.is_negative() { -1 } else { 1 };
        floor_surd(&(k * &self.p), sign, &(k * k * &self.d), &self.q)
    }

    /// `⌊x⌋`.
    pub fn floor(&self) -> BigInt {
        floor_surd(&self.p, 1, &self.d, &self.q)
    }

    /// Whether `k · x` is an integer.
    pub fn mul_is_integer(&self, k: &BigInt) -> bool {
        match self.as_rational() {
            Some(r) => (r * BigRational::from_integer(k.clone())).is_integer(),
            None => k.is_zero(),
        }
    }

    /// Partial quotients `a_0, a_1, …` up to `depth` terms.
    pub fn continued_fraction(&self, depth: usize) -> ContinuedFraction {
        if let Some(r) = self.as_rational() {
            return rational_continued_fraction(&r, depth);
        }
        let (mut p, mut d, mut q) = (self.p.clone(), self.d.clone(), self.q.clone());
        // the recurrence needs q | d - p²; rescale by |q| otherwise
        if !(&d - &p * &p).is_multiple_of(&q) {
            let aq = q.abs();
            p *= &aq;
            d *= &aq * &aq;
            q *= &aq;
        }
        let mut quotients: Vec<BigInt> = Vec::with_capacity(depth);
        let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
        let mut period = None;
        while quotients.len() < depth {
            if period.is_none() {
                let key = (p.clone(), q.clone());
                if let Some(&start) = seen.get(&key) {
                    period = Some(Period { start, length: quotients.len() - start });
                } else {
                    seen.insert(key, quotients.len());
                }
            }
            if let Some(per) = period {
                // the rest repeats; no further arithmetic needed
                let k = quotients.len();
                let a: BigInt = quotients[per.start + (k - per.start) % per.length].clone();
                quotients.push(a);
                continue;
            }
            let a = floor_surd(&p, 1, &d, &q);
            let p_next = &a * &q - &p;
            let q_next = (&d - &p_next * &p_next) / &q;
            quotients.push(a);
            p = p_next;
            q = q_next;
        }
        ContinuedFraction { quotients, period, terminated: false }
    }
}

impl std::fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} + √{}) / {}", self.p, self.d, self.q)
    }
}

/// `⌊(a + s √e) / q⌋` for `s = ±1`, `e >= 0`, `q != 0`.
fn floor_surd(a: &BigInt, s: i32, e: &BigInt, q: &BigInt) -> BigInt {
    let (a, s, q) = if q.is_negative() { (-a, -s, -q) } else { (a.clone(), s, q.clone()) };
    let r = e.sqrt();
    if &r * &r == *e {
        let num = if s > 0 { a + r } else { a - r };
        return num.div_floor(&q);
    }
    // √e lies strictly between r and r + 1, so the numerator is not an integer
    let num = if s > 0 { a + r } else { a - r - 1 };
    num.div_floor(&q)
}

/// Repeating block of a periodic expansion: `a_k = a_{k + length}` for `k >= start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub start: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub quotients: Vec<BigInt>,
    pub period: Option<Period>,
    /// The expansion ended on its own (rational input).
    pub terminated: bool,
}

impl ContinuedFraction {
    /// Convergents `p_k / q_k` as integer pairs.
    pub fn convergents(&self) -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::with_capacity(self.quotients.len());
        let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
        let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
        for a in &self.quotients {
            let p = a * &p0 + &p1;
            let q = a * &q0 + &q1;
            p1 = std::mem::replace(&mut p0, p.clone());
            q1 = std::mem::replace(&mut q0, q.clone());
            out.push((p, q));
        }
        out
    }
}

pub fn rational_continued_fraction(r: &BigRational, depth: usize) -> ContinuedFraction {
    let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
    let mut quotients = Vec::new();
    let mut terminated = false;
    while quotients.len() < depth {
        let (a, rem) = num.div_mod_floor(&den);
        quotients.push(a);
        if rem.is_zero() {
            terminated = true;
            break;
        }
        num = den;
        den = rem;
    }
    ContinuedFraction { quotients, period: None, terminated }
}

/// Serializes big integers as decimal strings so no precision is lost.
pub(crate) mod bigint_text {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(x) => Ok(BigInt::from(x)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn golden_ratio() {
        let cf = QuadSurd::new(1, 5, 2).continued_fraction(12);
        assert_eq!(cf.quotients, ints(&[1; 12]));
        assert_eq!(cf.period, Some(Period { start: 0, length: 1 }));
    }

    #[test]
    fn sqrt_two() {
        let cf = QuadSurd::new(0, 2, 1).continued_fraction(8);
        assert_eq!(cf.quotients, ints(&[1, 2, 2, 2, 2, 2, 2, 2]));
        assert_eq!(cf.period, Some(Period { start: 1, length: 1 }));
        let conv = cf.convergents();
        assert_eq!(conv[2], (BigInt::from(7), BigInt::from(5)));
    }

    #[test]
    fn rational_input_terminates() {
        // 5/6 = (5 + √0)/6
        let cf = QuadSurd::new(5, 0, 6).continued_fraction(20);
        assert_eq!(cf.quotients, ints(&[0, 1, 5]));
        assert!(cf.terminated);
        // perfect-square radicand: (1 + √4)/6 = 1/2
        let cf = QuadSurd::new(1, 4, 6).continued_fraction(20);
        assert_eq!(cf.quotients, ints(&[0, 2]));
    }

    #[test]
    fn surd_needing_rescale() {
        // (3 + √3)/6: 6 does not divide 3 - 9
        let x = QuadSurd::new(3, 3, 6);
        let cf = x.continued_fraction(10);
        assert_eq!(&cf.quotients[..4], &ints(&[0, 1, 3, 1])[..]);
        assert!(cf.period.is_some());
        let (p, q) = cf.convergents()[9].clone();
        let qf = q.to_f64().unwrap();
        let approx = p.to_f64().unwrap() / qf;
        assert!((approx - x.to_f64()).abs() < 1.0 / (qf * qf));
    }

    #[test]
    fn negative_denominator_floor() {
        // (3 + √3)/(-6) = -0.7886…
        let x = QuadSurd::new(3, 3, -6);
        assert_eq!(x.floor(), BigInt::from(-1));
        assert_eq!(x.floor_mul(&BigInt::from(10)), BigInt::from(-8));
        assert_eq!(x.floor_mul(&BigInt::from(-10)), BigInt::from(7));
    }

    #[test]
    fn serde_as_pdq() {
        let x = QuadSurd::new(3, 3, 6);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"P":3,"D":3,"Q":6}"#);
        assert_eq!(serde_json::from_str::<QuadSurd>(&s).unwrap(), x);
    }

    proptest! {
        #[test]
        fn floor_matches_float(p in -50i64..50, d in 0i64..500, q in prop_oneof![-40i64..-1, 1i64..40], k in -300i64..300) {
            let x = QuadSurd::new(p, d, q);
            let exact = x.floor_mul(&BigInt::from(k)).to_i64().unwrap();
            let kx = k as f64 * x.to_f64();
            // float disagrees only within rounding of an integer
            if (kx - kx.round()).abs() > 1e-9 {
                prop_assert_eq!(exact, kx.floor() as i64);
            } else {
                prop_assert!((exact - kx.round() as i64).abs() <= 1);
            }
        }

        #[test]
        fn convergents_approach_value(p in -20i64..20, d in 2i64..200, q in prop_oneof![-20i64..-1, 1i64..20]) {
            let x = QuadSurd::new(p, d, q);
            let cf = x.continued_fraction(20);
            let v = x.to_f64();
            for (k, (pk, qk)) in cf.convergents().iter().enumerate().take(12) {
                let qf = qk.to_f64().unwrap();
                let err = (pk.to_f64().unwrap() / qf - v).abs();
                prop_assert!(err <= 1.0 / (qf * qf) + 1e-12, "k={} err={}", k, err);
            }
            // quotients beyond the first are positive
            for a in &cf.quotients[1..] {
                prop_assert!(a.is_positive());
            }
        }
    }
}
