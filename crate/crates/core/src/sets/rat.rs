//! Exact rational scalars and planar points.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Exact value of a finite `f64` (every float is a dyadic rational).
pub fn q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite float")
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn f(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn half() -> Q {
    qr(1, 2)
}

pub fn qmin(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn qmax(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Parses `"p/q"`, integers and decimal literals exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s}: zero denominator")));
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Q::from_integer(n));
    }
    // Decimal literal: digits with one point and an optional exponent.
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|e| Error::Parse(format!("{s}: {e}")))?),
        None => (s, 0),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{ip}{fp}");
    let n = BigInt::from_str(&digits).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    let scale = exp - fp.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    let mut v = Q::from_integer(n);
    let mut p = Q::one();
    for _ in 0..scale.unsigned_abs() {
        p *= &ten;
    }
    if scale >= 0 {
        v *= p;
    } else {
        v /= p;
    }
    Ok(v)
}

/// Serde wrapper: written as `"p/q"` (or `"p"`), read from such strings or JSON numbers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub Q);

impl fmt::Display for Rat {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(fm, "{}", self.0.numer())
        } else {
            write!(fm, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_q(&s).map(Rat).map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rat(qi(i)))
                } else {
                    let x = n.as_f64().ok_or_else(|| serde::de::Error::custom("bad number"))?;
                    Ok(Rat(q(x)))
                }
            }
            other => Err(serde::de::Error::custom(format!("expected a rational, got {other}"))),
        }
    }
}

/// Exact planar point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPoint {
    pub x: Q,
    pub y: Q,
}

impl QPoint {
    pub fn new(x: Q, y: Q) -> Self {
        QPoint { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        QPoint { x: q(x), y: q(y) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (f(&self.x), f(&self.y))
    }

    pub fn lerp(&self, o: &QPoint, t: &Q) -> QPoint {
        QPoint { x: &self.x + (&o.x - &self.x) * t, y: &self.y + (&o.y - &self.y) * t }
    }

    pub fn sub(&self, o: &QPoint) -> QPoint {
        QPoint { x: &self.x - &o.x, y: &self.y - &o.y }
    }
}

/// Twice the signed area of (a, b, c); positive for a counter-clockwise turn.
pub fn orient(a: &QPoint, b: &QPoint, c: &QPoint) -> Q {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

pub fn cross(u: &QPoint, v: &QPoint) -> Q {
    &u.x * &v.y - &u.y * &v.x
}

impl Serialize for QPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [Rat(self.x.clone()), Rat(self.y.clone())].serialize(s)
    }
}

impl<'de> Deserialize<'de> for QPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[Rat; 2]>::deserialize(d)?;
        Ok(QPoint { x: x.0, y: y.0 })
    }
}

pub fn ser_q<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    Rat(x.clone()).serialize(s)
}

pub fn de_q<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
    Rat::deserialize(d).map(|r| r.0)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("1/3").unwrap(), qr(1, 3));
        assert_eq!(parse_q("-7").unwrap(), qi(-7));
        assert_eq!(parse_q("0.25").unwrap(), qr(1, 4));
        assert_eq!(parse_q("1.5e2").unwrap(), qi(150));
        assert_eq!(parse_q("2.5e-1").unwrap(), qr(1, 4));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn rat_json_round_trip() {
        let r = Rat(qr(-2, 6));
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"-1/3\"");
        let back: Rat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let n: Rat = serde_json::from_str("0.5").unwrap();
        assert_eq!(n.0, half());
    }
}
