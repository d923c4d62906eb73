//! Exact rationals and their text form.
//!
//! Every rational crossing a file or wire boundary is written as a `"p/q"`
//! string (or `"p"` when the denominator is one). Input additionally accepts
//! finite decimals such as `"0.25"` or JSON numbers with a finite decimal
//! expansion.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;

use crate::error::ParseError;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn half() -> Rat {
    ratio(1, 2)
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn to_text(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal (`"-1.25"`, `"3e-2"`).
pub fn parse(text: &str) -> Result<Rat, ParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseError::Rational(text.to_string()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| ParseError::Rational(text.to_string()))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| ParseError::Rational(text.to_string()))?;
        if q.is_zero() {
            return Err(ParseError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rat::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| ParseError::Rational(text.to_string()))
}

fn parse_decimal(s: &str) -> Option<Rat> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{whole}{frac}");
    let mut numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rat::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rat::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

/// Number of bits in the larger of numerator and denominator.
pub fn bit_size(r: &Rat) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn floor(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn is_in_open_unit(r: &Rat) -> bool {
    r.is_positive() && r < &Rat::one()
}

/// Serde adapter writing a [`Rat`] as a `"p/q"` string and reading strings
/// or JSON numbers.
pub mod text {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        d.deserialize_any(RatVisitor)
    }

    struct RatVisitor;

    impl Visitor<'_> for RatVisitor {
        type Value = Rat;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a rational as \"p/q\" or a finite decimal number")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
            parse(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
            Ok(Rat::from_integer(BigInt::from(v)))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
            // Shortest round-trip decimal, so 0.1 reads as 1/10.
            parse(&format!("{v:?}")).map_err(E::custom)
        }
    }
}

/// Same as [`text`] for sequences.
pub mod text_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&to_text(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super::text")] Rat);
        let items: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(items.into_iter().map(|w| w.0).collect())
    }
}

/// Same as [`text`] for open intervals stored as pairs.
pub mod text_pair {
    use super::*;

    pub fn serialize<S: Serializer>(v: &(Rat, Rat), s: S) -> Result<S::Ok, S::Error> {
        text_vec::serialize(&[v.0.clone(), v.1.clone()], s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rat, Rat), D::Error> {
        let v = text_vec::deserialize(d)?;
        match <[Rat; 2]>::try_from(v) {
            Ok([a, b]) => Ok((a, b)),
            Err(v) => Err(de::Error::invalid_length(v.len(), &"2 rationals")),
        }
    }
}

/// A `Rat` that serializes as text; handy inside derived structs and maps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RatText(#[serde(with = "text")] pub Rat);

impl Default for RatText {
    fn default() -> Self {
        RatText(Rat::zero())
    }
}

impl From<Rat> for RatText {
    fn from(r: Rat) -> Self {
        RatText(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("3/5").unwrap(), ratio(3, 5));
        assert_eq!(parse("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse("-1.5e1").unwrap(), int(-15));
        assert_eq!(parse("2.5E-1").unwrap(), ratio(1, 4));
        assert_eq!(parse(".5").unwrap(), half());
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert!(parse("1.2.3").is_err());
    }

    #[test]
    fn text_form_is_canonical() {
        assert_eq!(to_text(&ratio(4, -6)), "-2/3");
        assert_eq!(to_text(&int(5)), "5");
    }

    #[test]
    fn json_numbers_read_exactly() {
        let v: RatText = serde_json::from_str("0.1").unwrap();
        assert_eq!(v.0, ratio(1, 10));
        let v: RatText = serde_json::from_str("3").unwrap();
        assert_eq!(v.0, int(3));
        let v: RatText = serde_json::from_str("\"22/7\"").unwrap();
        assert_eq!(v.0, ratio(22, 7));
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"22/7\"");
    }

    #[test]
    fn floor_rounds_toward_negative_infinity() {
        assert_eq!(floor(&ratio(7, 2)), BigInt::from(3));
        assert_eq!(floor(&ratio(-7, 2)), BigInt::from(-4));
    }
}
