use num_bigint::BigInt;
use serde::Serialize;

use super::coupling::CouplingParam;
use super::surd::QuadSurd;
use crate::error::{Error, Result};

/// A pair of resonance roots, in floating point and (for rational `α`) as exact surds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootPair {
    pub first: f64,
    pub second: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<(QuadSurd, QuadSurd)>,
}

impl RootPair {
    pub fn values(&self) -> [f64; 2] {
        [self.first, self.second]
    }

    pub fn surds(&self) -> Option<[&QuadSurd; 2]> {
        self.exact.as_ref().map(|(a, b)| [a, b])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceRoots {
    pub c: RootPair,
    /// Missing at the pole `α = 1`.
    pub d: Option<RootPair>,
}

impl ResonanceRoots {
    pub fn for_alpha(alpha: &CouplingParam) -> Result<Self> {
        let c = compute_c_roots(alpha)?;
        let d = match compute_d_roots(alpha) {
            Ok(d) => Some(d),
            Err(Error::Pole) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { c, d })
    }
}

fn check_range(alpha: &CouplingParam) -> Result<()> {
    if !alpha.at_most_four() {
        return Err(Error::Domain { alpha: alpha.to_string(), reason: "roots are real only for 0 < alpha <= 4" });
    }
    Ok(())
}

/// Radicand `3p(4q - p)` shared by both families for `α = p/q`.
fn radicand(p: &BigInt, q: &BigInt) -> BigInt {
    BigInt::from(3) * p * (BigInt::from(4) * q - p)
}

/// Roots of `α(c³ + (1-c)³) = 1`: `c = 1/2 ± √(-3 + 12/α)/6`, with `c1 >= c2`.
pub fn compute_c_roots(alpha: &CouplingParam) -> Result<RootPair> {
    check_range(alpha)?;
    let a = alpha.value();
    let half_width = ((-3.0 + 12.0 / a).max(0.0)).sqrt() / 6.0;
    let exact = alpha.ratio().map(|(p, q)| {
        // c = (3p ± √(3p(4q - p))) / (6p)
        let d = radicand(&p, &q);
        let six_p = BigInt::from(6) * &p;
        let three_p = BigInt::from(3) * &p;
        (QuadSurd::new(three_p.clone(), d.clone(), six_p.clone()), QuadSurd::new(-three_p, d, -six_p))
    });
    let (first, second) = match &exact {
        Some((c1, c2)) => (c1.to_f64(), c2.to_f64()),
        None => (0.5 + half_width, 0.5 - half_width),
    };
    Ok(RootPair { first, second, exact })
}

/// Roots of `(α - 1) d² - 3α d + 3α = 0`:
/// `d = (-3α ± √(3α(4-α))) / (2(1-α))`, `+` giving `d1`.
pub fn compute_d_roots(alpha: &CouplingParam) -> Result<RootPair> {
    check_range(alpha)?;
    if alpha.is_one() {
        return Err(Error::Pole);
    }
    let a = alpha.value();
    let exact = alpha.ratio().map(|(p, q)| {
        let d = radicand(&p, &q);
        let three_p = BigInt::from(3) * &p;
        let two_diff = BigInt::from(2) * (&q - &p);
        // d1 = (-3p + √D) / (2(q - p)),  d2 = (3p + √D) / (2(p - q))
        (QuadSurd::new(-three_p.clone(), d.clone(), two_diff.clone()), QuadSurd::new(three_p, d, -two_diff))
    });
    let (first, second) = match &exact {
        Some((d1, d2)) => (d1.to_f64(), d2.to_f64()),
        None => {
            // rationalized forms avoid cancellation near α = 1
            let s = 3.0 * a + (3.0 * a * (4.0 - a)).max(0.0).sqrt();
            (6.0 * a / s, s / (2.0 * (a - 1.0)))
        }
    };
    Ok(RootPair { first, second, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;
    use proptest::prelude::*;

    /// `a + b √d` with rational `a`, `b`.
    #[derive(Clone, Debug, PartialEq)]
    struct QuadNum {
        a: BigRational,
        b: BigRational,
        d: BigInt,
    }

    impl QuadNum {
        fn from(x: &QuadSurd) -> Self {
            let q = BigRational::from_integer(x.q.clone());
            Self { a: BigRational::from_integer(x.p.clone()) / &q, b: BigRational::one() / q, d: x.d.clone() }
        }
        fn rational(a: BigRational, d: &BigInt) -> Self {
            Self { a, b: BigRational::from_integer(0.into()), d: d.clone() }
        }
        fn add(&self, o: &Self) -> Self {
            Self { a: &self.a + &o.a, b: &self.b + &o.b, d: self.d.clone() }
        }
        fn mul(&self, o: &Self) -> Self {
            let d = BigRational::from_integer(self.d.clone());
            Self { a: &self.a * &o.a + &self.b * &o.b * d, b: &self.a * &o.b + &self.b * &o.a, d: self.d.clone() }
        }
        fn scale(&self, k: &BigRational) -> Self {
            Self { a: &self.a * k, b: &self.b * k, d: self.d.clone() }
        }
    }

    fn alpha(s: &str) -> CouplingParam {
        s.parse().unwrap()
    }

    #[test]
    fn c_root_examples() {
        let r = compute_c_roots(&alpha("4")).unwrap();
        assert_eq!((r.first, r.second), (0.5, 0.5));
        let r = compute_c_roots(&alpha("1")).unwrap();
        assert_eq!((r.first, r.second), (1.0, 0.0));
        let r = compute_c_roots(&alpha("12/7")).unwrap();
        let (c1, c2) = r.exact.unwrap();
        let five_sixths = BigRational::new(5.into(), 6.into());
        assert_eq!(c1.as_rational().unwrap(), five_sixths);
        assert_eq!(c2.as_rational().unwrap(), BigRational::new(1.into(), 6.into()));
        // α (c1³ + c2³) = 1 exactly
        let a = BigRational::new(12.into(), 7.into());
        let s = c1.as_rational().unwrap().pow(3) + c2.as_rational().unwrap().pow(3);
        assert_eq!(a * s, BigRational::from_integer(1.into()));
    }

    #[test]
    fn d_root_examples() {
        let r = compute_d_roots(&alpha("4")).unwrap();
        assert_eq!((r.first, r.second), (2.0, 2.0));
        assert!(matches!(compute_d_roots(&alpha("1")), Err(Error::Pole)));
        assert!(matches!(compute_d_roots(&alpha("9/2")), Err(Error::Domain { .. })));
        assert!(matches!(compute_c_roots(&alpha("5")), Err(Error::Domain { .. })));
        assert!(ResonanceRoots::for_alpha(&alpha("1")).unwrap().d.is_none());
    }

    #[test]
    fn float_and_exact_agree() {
        for s in ["2", "1/3", "12/7", "7/2", "99/100", "101/100"] {
            let e = alpha(s);
            let f = CouplingParam::from_f64(e.value()).unwrap();
            let (ce, cf) = (compute_c_roots(&e).unwrap(), compute_c_roots(&f).unwrap());
            let (de, df) = (compute_d_roots(&e).unwrap(), compute_d_roots(&f).unwrap());
            for (x, y) in ce.values().iter().zip(cf.values()).chain(de.values().iter().zip(df.values())) {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{s}: {x} vs {y}");
            }
        }
    }

    proptest! {
        #[test]
        fn float_identities(a in 0.01f64..4.0) {
            prop_assume!((a - 1.0).abs() > 1e-3);
            let alpha = CouplingParam::from_f64(a).unwrap();
            let c = compute_c_roots(&alpha).unwrap();
            prop_assert!(c.first >= c.second);
            prop_assert!((c.first + c.second - 1.0).abs() < 1e-12);
            prop_assert!((a * (c.first.powi(3) + c.second.powi(3)) - 1.0).abs() < 1e-12);
            let d = compute_d_roots(&alpha).unwrap();
            let (s, p) = (d.first + d.second, d.first * d.second);
            let scale = s.abs().max(1.0);
            prop_assert!((s - p).abs() < 1e-12 * scale);
            prop_assert!((s - 3.0 * a / (a - 1.0)).abs() < 1e-12 * scale);
        }

        #[test]
        fn exact_identities(p in 1i64..200, q in 1i64..200) {
            prop_assume!(4 * q >= p && p != q);
            let alpha = CouplingParam::from_ratio(p, q).unwrap();
            let (c1, c2) = compute_c_roots(&alpha).unwrap().exact.unwrap();
            let (d1, d2) = compute_d_roots(&alpha).unwrap().exact.unwrap();
            let a = alpha.exact().unwrap().clone();
            let (c1, c2) = (QuadNum::from(&c1), QuadNum::from(&c2));
            let one = QuadNum::rational(BigRational::one(), &c1.d);
            prop_assert_eq!(c1.add(&c2), one.clone());
            let cubes = c1.mul(&c1).mul(&c1).add(&c2.mul(&c2).mul(&c2));
            prop_assert_eq!(cubes.scale(&a), one);
            let (d1, d2) = (QuadNum::from(&d1), QuadNum::from(&d2));
            let target = QuadNum::rational(&a * BigRational::from_integer(3.into()) / (&a - BigRational::one()), &d1.d);
            prop_assert_eq!(d1.add(&d2), target.clone());
            prop_assert_eq!(d1.mul(&d2), target);
        }
    }
}
