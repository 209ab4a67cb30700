use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The coupling parameter `α` of the second equation.
///
/// Values parsed from `"p/q"` or from a decimal literal carry an exact
/// rational so resonance gaps can be decided in integer arithmetic;
/// values built from an `f64` are float-only.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingParam {
    value: f64,
    exact: Option<BigRational>,
}

impl CouplingParam {
    pub fn from_f64(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Domain { alpha: value.to_string(), reason: "alpha must be a positive real" });
        }
        Ok(Self { value, exact: None })
    }

    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: BigRational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Domain { alpha: rational_string(&r), reason: "alpha must be a positive real" });
        }
        let value = rational_to_f64(&r);
        Ok(Self { value, exact: Some(r) })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    /// Numerator and denominator of the exact value, denominator positive.
    pub(crate) fn ratio(&self) -> Option<(BigInt, BigInt)> {
        self.exact.as_ref().map(|r| (r.numer().clone(), r.denom().clone()))
    }

    pub fn is_one(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_one(),
            None => self.value == 1.0,
        }
    }

    /// `α <= 4`, decided exactly when possible.
    pub(crate) fn at_most_four(&self) -> bool {
        match &self.exact {
            Some(r) => *r <= BigRational::from_integer(BigInt::from(4)),
            None => self.value <= 4.0,
        }
    }
}

impl FromStr for CouplingParam {
    type Err = Error;

    /// Accepts `"p/q"`, integers, and decimals such as `"0.899"` or `"2.5e-1"`.
    fn from_str(s: &str) -> Result<Self> {
        Self::from_rational(parse_rational(s)?)
    }
}

impl fmt::Display for CouplingParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => f.write_str(&rational_string(r)),
            None => write!(f, "{}", self.value),
        }
    }
}

impl Serialize for CouplingParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.exact {
            Some(r) => s.serialize_str(&rational_string(r)),
            None => s.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for CouplingParam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(x) => CouplingParam::from_f64(x),
            Raw::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// `"p/q"` (or `"p"` for integers).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // scale both down to keep the quotient representable
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational or decimal literal: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -r } else { r })
}
