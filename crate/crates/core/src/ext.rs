//! Extended rationals `Q ∪ {-inf, +inf}` with the absorbing-infinity algebra
//! used for clock values and constraint constants.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational used for timestamps and finite clock values.
pub type Rat = Ratio<i64>;

/// Builds `n/d` as a rational.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// Parses `"n"` or `"n/d"` (optionally signed) into a rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    if let Some((int, frac)) = n.split_once('.') {
        if d != "1" {
            return Err(format!("malformed rational `{s}`"));
        }
        let neg = int.starts_with('-');
        let int_v: i64 = int.parse().map_err(|_| format!("malformed rational `{s}`"))?;
        let scale = 10i64.pow(frac.len() as u32);
        let frac_v: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| format!("malformed rational `{s}`"))?
        };
        let mag = int_v.abs() * scale + frac_v;
        return Ok(Rat::new(if neg { -mag } else { mag }, scale));
    }
    let n: i64 = n.parse().map_err(|_| format!("malformed rational `{s}`"))?;
    let d: i64 = d.parse().map_err(|_| format!("malformed rational `{s}`"))?;
    if d == 0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rat::new(n, d))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floor of a rational as an integer.
pub fn floor_rat(r: &Rat) -> i64 {
    r.numer().div_floor(r.denom())
}

/// Fractional part `r - floor(r)`, always in `[0, 1)`.
pub fn frac_rat(r: &Rat) -> Rat {
    r - Rat::from_integer(floor_rat(r))
}

/// A value of `Q ∪ {-inf, +inf}`.
///
/// Addition is total: `+inf` absorbs everything (including `-inf`), and
/// `-inf` absorbs every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtReal {
    NegInf,
    Fin(Rat),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Fin(Ratio::new_raw(0, 1));

    pub fn int(c: i64) -> Self {
        ExtReal::Fin(Rat::from_integer(c))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Fin(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite(&self) -> Option<Rat> {
        match self {
            ExtReal::Fin(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtReal::Fin(r) if r.is_zero())
    }

    pub fn is_negative(&self) -> bool {
        match self {
            ExtReal::NegInf => true,
            ExtReal::Fin(r) => r.is_negative(),
            ExtReal::PosInf => false,
        }
    }
}

impl From<Rat> for ExtReal {
    fn from(r: Rat) -> Self {
        ExtReal::Fin(r)
    }
}

impl From<i64> for ExtReal {
    fn from(c: i64) -> Self {
        ExtReal::int(c)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Fin(a), Fin(b)) => Fin(a + b),
        }
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::Fin(r) => ExtReal::Fin(-r),
        }
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    /// `a - b` is `a + (-b)`, so `(-inf) - (-inf) = +inf`.
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self + (-rhs)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::Fin(r) => write!(f, "{}", fmt_rat(r)),
        }
    }
}

impl FromStr for ExtReal {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            t => parse_rat(t).map(ExtReal::Fin),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(ExtReal::int)
                .ok_or_else(|| serde::de::Error::custom("expected an integer constant")),
            _ => Err(serde::de::Error::custom("expected a number or string")),
        }
    }
}

/// Serde adapter writing a rational as the string `"n/d"`.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_rat(&s).map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Rat::from_integer)
                .ok_or_else(|| serde::de::Error::custom("expected an integer or \"n/d\"")),
            _ => Err(serde::de::Error::custom("expected a rational")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorbing_infinities() {
        let two = ExtReal::int(2);
        assert_eq!(ExtReal::PosInf + ExtReal::NegInf, ExtReal::PosInf);
        assert_eq!(ExtReal::NegInf + two, ExtReal::NegInf);
        assert_eq!(ExtReal::NegInf - ExtReal::NegInf, ExtReal::PosInf);
        assert_eq!(-ExtReal::PosInf, ExtReal::NegInf);
        assert_eq!(two + ExtReal::int(3), ExtReal::int(5));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("3/2".parse::<ExtReal>().unwrap(), ExtReal::Fin(rat(3, 2)));
        assert_eq!("-inf".parse::<ExtReal>().unwrap(), ExtReal::NegInf);
        assert_eq!(parse_rat("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(ExtReal::Fin(rat(6, 4)).to_string(), "3/2");
        assert_eq!(floor_rat(&rat(-1, 2)), -1);
        assert_eq!(frac_rat(&rat(-1, 3)), rat(2, 3));
    }
}
