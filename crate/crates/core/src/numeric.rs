//! Scalar types shared by every solver: exact big rationals and `f64`.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use thiserror::Error;

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Which arithmetic an assignment was computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NumericKind {
    Rational,
    Float,
}

/// Ordered field used for edge values and loads.
///
/// Implemented for [`Rational`] (exact) and `f64` (tolerance based). Everything
/// that only needs field operations and comparisons is generic over it; root
/// finding on nonlinear load functions is only available for `f64`.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    const KIND: NumericKind;

    fn from_rational(r: &Rational) -> Self;

    /// `None` when the value cannot be represented (non-finite floats).
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Canonical string form: `p/q` in lowest terms for rationals, Rust's
    /// round-trip `Debug` form for floats (always contains `.`, `e`, `inf` or `NaN`).
    fn to_canonical_string(&self) -> String;

    fn is_exact() -> bool {
        Self::KIND == NumericKind::Rational
    }
}

impl Scalar for Rational {
    const KIND: NumericKind = NumericKind::Rational;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| if self.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
    }

    fn to_canonical_string(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const KIND: NumericKind = NumericKind::Float;

    fn from_rational(r: &Rational) -> Self {
        <Rational as Scalar>::to_f64(r)
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_canonical_string(&self) -> String {
        format!("{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"-2.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let (neg, int_part) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        let digits_ok = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !digits_ok(int_part) || !digits_ok(frac_part) || (int_part.is_empty() && frac_part.is_empty()) {
            return Err(err());
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10u32), frac_part.len());
        let r = Rational::new(mantissa, scale);
        return Ok(if neg { -r } else { r });
    }
    let r = Rational::from_str(t).map_err(|_| err())?;
    Ok(r)
}

/// Value parsed from a `"rational-or-float"` string.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedValue {
    Exact(Rational),
    Float(f64),
}

/// Strings with a decimal point, an exponent, `inf` or `NaN` are floats; integer
/// and `p/q` literals are exact.
pub fn parse_value(s: &str) -> Result<ParsedValue, ParseRationalError> {
    let t = s.trim();
    let looks_float = t.contains(['.', 'e', 'E']) || t.contains("inf") || t.contains("NaN");
    if looks_float {
        let v: f64 = t.parse().map_err(|_| ParseRationalError(s.to_string()))?;
        Ok(ParsedValue::Float(v))
    } else {
        parse_rational(t).map(ParsedValue::Exact)
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn max_of<T: Scalar>(values: &[T]) -> Option<T> {
    values.iter().cloned().reduce(|a, b| if b > a { b } else { a })
}

pub(crate) fn min_of<T: Scalar>(values: &[T]) -> Option<T> {
    values.iter().cloned().reduce(|a, b| if b < a { b } else { a })
}

/// `|a - b| <= tol`, exact comparison for rationals.
pub fn approx_eq<T: Scalar>(a: &T, b: &T, tol: f64) -> bool {
    if T::is_exact() {
        a == b
    } else {
        (a.clone() - b.clone()).abs().to_f64() <= tol
    }
}
