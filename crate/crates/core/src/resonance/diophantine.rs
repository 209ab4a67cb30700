//! Continued-fraction estimates of the Diophantine type index.
//!
//! For convergents `p_k/q_k` of `x`, `|x - p_k/q_k| ≍ 1/(a_{k+1} q_k²)`, so a
//! bound `|x - p/q| >= K/q^{2+ν}` fails exactly when `a_{k+1}` grows like
//! `q_k^ν`. The estimator reports `max log(a_{k+1}) / log(q_k)` over the tail
//! half of the computed expansion, which tends to 0 for bounded quotients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::coupling::rational_string;
use super::surd::{rational_continued_fraction, ContinuedFraction, Period, QuadSurd};

/// Float relative precision budget: stop once `q_k² ε |x|` exceeds this.
const FLOAT_BUDGET: f64 = 1e-4;

#[derive(Clone, Debug)]
pub enum DiophantineInput {
    Surd(QuadSurd),
    Rational(BigRational),
    Float(f64),
}

/// `ν̂`, or the marker for rational inputs whose type index is infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TypeIndex {
    Finite(f64),
    Infinite,
}

impl TypeIndex {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }
}

impl Serialize for TypeIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Infinite => s.serialize_str("infinity"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiophantineEstimate {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surd: Option<QuadSurd>,
    #[serde(serialize_with = "big_list")]
    pub partial_quotients: Vec<BigInt>,
    /// `"p/q"` strings.
    pub convergents: Vec<String>,
    pub nu_hat: TypeIndex,
    pub is_rational: bool,
    /// Number of partial quotients actually used.
    pub depth: usize,
    pub period: Option<Period>,
    /// Float input ran out of precision before the requested depth.
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn big_list<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x.to_i64() {
            Some(i) => seq.serialize_element(&i)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

/// Continued fraction of a float, stopping when rounding could corrupt the
/// next quotient. Returns the expansion and whether it was cut short.
fn float_continued_fraction(x: f64, depth: usize) -> (ContinuedFraction, bool) {
    let eps = f64::EPSILON * x.abs().max(1.0);
    let mut quotients = Vec::new();
    let (mut q_prev, mut q) = (0.0_f64, 1.0_f64);
    let mut y = x;
    let mut terminated = false;
    while quotients.len() < depth {
        if q * q * eps > FLOAT_BUDGET {
            break;
        }
        let a = y.floor();
        quotients.push(BigInt::from(a as i64));
        let frac = y - a;
        if frac == 0.0 {
            terminated = true;
            break;
        }
        y = 1.0 / frac;
        if !y.is_finite() || y > 1e15 {
            break;
        }
        // denominators for the budget check, starting from q_0 = 1
        if quotients.len() > 1 {
            let q_next = a * q + q_prev;
            q_prev = q;
            q = q_next;
        }
    }
    let truncated = !terminated && quotients.len() < depth;
    (ContinuedFraction { quotients, period: None, terminated }, truncated)
}

/// `max log(a_{k+1}) / log(q_k)` over the tail window `k ∈ [⌈K/2⌉, K-1)`.
fn nu_from_quotients(cf: &ContinuedFraction) -> f64 {
    let conv = cf.convergents();
    let k_total = cf.quotients.len();
    let ratio = |k: usize| -> Option<f64> {
        let q = conv[k].1.to_f64()?;
        let a = cf.quotients[k + 1].to_f64()?;
        (q >= 2.0).then(|| (a.ln() / q.ln()).max(0.0))
    };
    let tail = k_total.div_ceil(2)..k_total.saturating_sub(1);
    let mut best: Option<f64> = None;
    for k in tail {
        if let Some(r) = ratio(k) {
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    if best.is_none() {
        for k in 0..k_total.saturating_sub(1) {
            if let Some(r) = ratio(k) {
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
        }
    }
    best.unwrap_or(0.0)
}

pub fn estimate_type_index(x: &DiophantineInput, depth: usize) -> DiophantineEstimate {
    let (value, surd, cf, truncated) = match x {
        DiophantineInput::Surd(s) => (s.to_f64(), Some(s.clone()), s.continued_fraction(depth), false),
        DiophantineInput::Rational(r) => {
            let cf = rational_continued_fraction(r, depth);
            (super::coupling::rational_to_f64(r), None, cf, false)
        }
        DiophantineInput::Float(v) => {
            let (cf, truncated) = float_continued_fraction(*v, depth);
            (*v, None, cf, truncated)
        }
    };
    let is_rational = cf.terminated
        || match x {
            DiophantineInput::Surd(s) => s.is_rational(),
            DiophantineInput::Rational(_) => true,
            DiophantineInput::Float(_) => false,
        };
    let nu_hat = if is_rational { TypeIndex::Infinite } else { TypeIndex::Finite(nu_from_quotients(&cf)) };
    let convergents = cf
        .convergents()
        .into_iter()
        .map(|(p, q)| if q.is_zero() { p.to_string() } else { rational_string(&BigRational::new(p, q)) })
        .collect();
    let warning = truncated.then(|| {
        format!("float input supports only {} partial quotients of the {depth} requested", cf.quotients.len())
    });
    DiophantineEstimate {
        value,
        surd,
        depth: cf.quotients.len(),
        partial_quotients: cf.quotients,
        convergents,
        nu_hat,
        is_rational,
        period: cf.period,
        truncated,
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(e: &DiophantineEstimate) -> f64 {
        e.nu_hat.finite().unwrap()
    }

    #[test]
    fn rational_is_flagged() {
        let e = estimate_type_index(&DiophantineInput::Rational(BigRational::new(5.into(), 6.into())), 50);
        assert!(e.is_rational);
        assert_eq!(e.nu_hat, TypeIndex::Infinite);
        assert_eq!(e.convergents.last().unwrap(), "5/6");
        let e = estimate_type_index(&DiophantineInput::Surd(QuadSurd::new(-3, 9, 12)), 50);
        assert!(e.is_rational);
        assert_eq!(e.value, 0.0);
        let e = estimate_type_index(&DiophantineInput::Float(0.375), 50);
        assert!(e.is_rational && !e.truncated);
    }

    #[test]
    fn surds_have_vanishing_index() {
        let golden = estimate_type_index(&DiophantineInput::Surd(QuadSurd::new(1, 5, 2)), 50);
        assert!(nu(&golden) < 1e-12);
        let mut last = f64::MAX;
        for depth in [20, 50, 200] {
            let root2 = estimate_type_index(&DiophantineInput::Surd(QuadSurd::new(0, 2, 1)), depth);
            let c1 = estimate_type_index(&DiophantineInput::Surd(QuadSurd::new(3, 3, 6)), depth);
            let worst = nu(&root2).max(nu(&c1));
            assert!(worst <= last + 1e-15);
            last = worst;
        }
        assert!(last < 0.02, "{last}");
    }

    #[test]
    fn liouville_like_number_has_large_index() {
        // quotients a_{k+1} = q_k² give ν̂ ≈ 2
        let mut quotients = vec![BigInt::from(0), BigInt::from(2)];
        let mut cf = ContinuedFraction { quotients: quotients.clone(), period: None, terminated: false };
        for _ in 0..4 {
            let q = cf.convergents().last().unwrap().1.clone();
            quotients.push(&q * &q);
            cf = ContinuedFraction { quotients: quotients.clone(), period: None, terminated: false };
        }
        assert!((nu_from_quotients(&cf) - 2.0).abs() < 0.1);
    }

    #[test]
    fn float_input_truncates_with_warning() {
        let e = estimate_type_index(&DiophantineInput::Float(2f64.sqrt()), 200);
        assert!(e.truncated && e.warning.is_some());
        assert!(e.depth >= 10 && e.depth < 40);
        assert!(e.partial_quotients[1..].iter().all(|a| *a == BigInt::from(2)));
        let depths: Vec<_> = [5, 10, 20, 400]
            .iter()
            .map(|&d| estimate_type_index(&DiophantineInput::Float(2f64.sqrt()), d).depth)
            .collect();
        assert!(depths.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn json_shape() {
        let e = estimate_type_index(&DiophantineInput::Surd(QuadSurd::new(0, 2, 1)), 4);
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        assert_eq!(v["partial_quotients"], serde_json::json!([1, 2, 2, 2]));
        assert_eq!(v["convergents"][1], "3/2");
        assert_eq!(v["surd"]["D"], 2);
    }
}
