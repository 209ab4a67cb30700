use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::coupling::{rational_string, rational_to_f64, CouplingParam};
use super::roots::{compute_c_roots, compute_d_roots, RootPair};
use crate::error::Result;

/// Which dispersion relation the triple interacts through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum Family {
    /// `v v_x` forcing `u`: gap `|n³ - α n1³ - α n2³|`.
    B,
    /// `(u v)_x` forcing `v`: gap `|α n³ - n1³ - α n2³|`.
    D,
}

impl std::str::FromStr for Family {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(Self::B),
            "D" | "d" => Ok(Self::D),
            _ => Err(crate::error::Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// A nonnegative dispersion gap; exact when the coupling is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub value: f64,
    pub exact: Option<BigRational>,
}

impl Gap {
    pub fn is_exact_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(|g| g.is_zero())
    }
}

impl Serialize for Gap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.exact {
            Some(r) => s.serialize_str(&rational_string(r)),
            None => s.serialize_f64(self.value),
        }
    }
}

fn cube(x: i64) -> BigInt {
    let x = BigInt::from(x);
    &x * &x * &x
}

/// `|n³ - α n1³ - α n2³|` with `n2 = n - n1`.
pub fn dispersion_gap_b(alpha: &CouplingParam, n: i64, n1: i64) -> Gap {
    gap(alpha, n, n1, Family::B)
}

/// `|α n³ - n1³ - α n2³|` with `n2 = n - n1`.
pub fn dispersion_gap_d(alpha: &CouplingParam, n: i64, n1: i64) -> Gap {
    gap(alpha, n, n1, Family::D)
}

pub fn gap(alpha: &CouplingParam, n: i64, n1: i64, family: Family) -> Gap {
    let n2 = n - n1;
    if let Some((p, q)) = alpha.ratio() {
        // q · gap is an integer
        let num = match family {
            Family::B => &q * cube(n) - &p * (cube(n1) + cube(n2)),
            Family::D => &p * (cube(n) - cube(n2)) - &q * cube(n1),
        }
        .abs();
        let exact = BigRational::new(num, q);
        return Gap { value: rational_to_f64(&exact), exact: Some(exact) };
    }
    Gap { value: gap_f64(alpha.value(), n, n1, family), exact: None }
}

/// Floating-point gap. `n³ - n2³ = n1 (n² + n n2 + n2²)` and
/// `n1³ + n2³ = n (n1² - n1 n2 + n2²)` are formed exactly in `i128`.
#[inline]
pub(crate) fn gap_f64(alpha: f64, n: i64, n1: i64, family: Family) -> f64 {
    let (n, n1) = (n as i128, n1 as i128);
    let n2 = n - n1;
    match family {
        Family::B => ((n * n * n) as f64 - alpha * (n * (n1 * n1 - n1 * n2 + n2 * n2)) as f64).abs(),
        Family::D => (alpha * (n1 * (n * n + n * n2 + n2 * n2)) as f64 - (n1 * n1 * n1) as f64).abs(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NearResonantTriple {
    pub n: i64,
    pub n1: i64,
    pub n2: i64,
    pub gap: Gap,
    pub family: Family,
}

pub(crate) fn family_roots(alpha: &CouplingParam, family: Family) -> Result<RootPair> {
    match family {
        Family::B => compute_c_roots(alpha),
        Family::D => compute_d_roots(alpha),
    }
}

/// Candidate `n1` values for one `n`: `⌊c n⌋` and `⌊c n⌋ + 1` for each root,
/// keeping those with `|n1 - c n| < 1` strictly. Sorted, deduplicated.
pub(crate) fn candidates(roots: &RootPair, n: i64) -> Vec<i64> {
    let mut out = Vec::with_capacity(4);
    match roots.surds() {
        Some(surds) => {
            let k = BigInt::from(n);
            for c in surds {
                let f = c.floor_mul(&k).to_i64().expect("candidate fits in i64");
                out.push(f);
                // ⌊cn⌋ + 1 is at distance exactly 1 when cn is an integer
                if !c.mul_is_integer(&k) {
                    out.push(f + 1);
                }
            }
        }
        None => {
            for c in roots.values() {
                let cn = c * n as f64;
                let f = cn.floor();
                out.push(f as i64);
                if cn != f {
                    out.push(f as i64 + 1);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Near-resonant triples for `1 <= |n| <= n_max`, ordered by `n` then `n1`.
///
/// Family D never contains `n1 = 0`: that resonance holds for every `n`
/// (the gap vanishes identically) and is not an approximation of `d1`, `d2`.
pub fn enumerate_near_resonant(alpha: &CouplingParam, n_max: i64, family: Family) -> Result<Vec<NearResonantTriple>> {
    let roots = family_roots(alpha, family)?;
    let mut out = Vec::new();
    for n in (-n_max..=n_max).filter(|&n| n != 0) {
        for n1 in candidates(&roots, n) {
            if family == Family::D && n1 == 0 {
                continue;
            }
            out.push(NearResonantTriple { n, n1, n2: n - n1, gap: gap(alpha, n, n1, family), family });
        }
    }
    Ok(out)
}
