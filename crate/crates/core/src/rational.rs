//! Exact rational coordinates and points.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number, always kept in lowest terms.
pub type Rational = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` as a rational. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Error produced when a coordinate string is not an integer or `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p"`, `"-p"`, or `"p/q"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let t = s.trim();
    let err = || ParseRationalError(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => BigInt::from_str(t)
            .map(Rational::from_integer)
            .map_err(|_| err()),
    }
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion used only for rendering.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Midpoint of two rationals.
pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / rat(2)
}

/// Serde adapter: rationals are written as strings and read from strings or integers.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_json(&v).map_err(serde::de::Error::custom)
    }

    pub(crate) fn from_json(v: &serde_json::Value) -> Result<Rational, String> {
        match v {
            serde_json::Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) => {
                let txt = n.to_string();
                parse_rational(&txt).map_err(|_| format!("non-integer number {txt}; use \"p/q\""))
            }
            other => Err(format!("expected rational, found {other}")),
        }
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(serde_rational::from_json)
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)
    }
}

/// A point with exact coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// Key ordering points by `y` first, then `x`.
    pub fn yx_key(&self) -> (Rational, Rational) {
        (self.y.clone(), self.x.clone())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Sign helper returning -1, 0 or 1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
