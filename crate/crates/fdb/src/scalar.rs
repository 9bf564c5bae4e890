//! The scalar fields the evaluators work over.
//!
//! Everything downstream (derivative sequences, jets, the expression
//! evaluator) is generic over [`Scalar`], which has exactly two
//! implementations: [`Rational`] (exact arbitrary-precision fractions, the
//! reference kind) and `f64` (the kind that admits transcendental seeds).
//! Exact values compare with `==`; float values compare through the
//! tolerance helpers.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision fraction: always reduced, denominator positive.
pub type Rational = BigRational;

/// Which scalar field a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    /// Arbitrary-precision rationals; results are exact.
    Exact,
    /// 64-bit binary floating point; results carry rounding error.
    Float,
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Exact => f.write_str("exact"),
            ScalarKind::Float => f.write_str("float"),
        }
    }
}

/// A field of values usable by the derivative evaluators and jets.
///
/// The transcendental seeds (`exp_value`, `ln_value`, `sin_cos_value`)
/// return `None` in the exact kind; callers turn that into a kind error.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign<Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + Zero
    + One
{
    const KIND: ScalarKind;

    fn from_nat(n: &BigUint) -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// `self * rhs` without consuming either operand.
    fn mul_ref(&self, rhs: &Self) -> Self;

    /// `lead * f_0 * f_1 * ...`, multiplied left to right. The exact kind
    /// multiplies raw numerators and denominators and reduces once, which
    /// is where the partition-streaming evaluator spends its time.
    fn term_product<'a, I>(lead: &Self, factors: I) -> Self
    where
        Self: 'a,
        I: Iterator<Item = &'a Self>,
    {
        let mut acc = lead.clone();
        for f in factors {
            acc *= f;
        }
        acc
    }

    fn is_strictly_positive(&self) -> bool;

    /// Exact kind: `==`. Float kind: `|a - b| <= tol`.
    fn approx_eq_abs(&self, other: &Self, tol: f64) -> bool;

    /// Exact kind: `==`. Float kind: `|a - b| <= tol * max(|a|, |b|, 1)`.
    fn approx_eq_rel(&self, other: &Self, tol: f64) -> bool;

    fn exp_value(&self) -> Option<Self>;

    /// Caller must check positivity first; this only gates on kind.
    fn ln_value(&self) -> Option<Self>;

    fn sin_cos_value(&self) -> Option<(Self, Self)>;

    /// Parse the kind's text form (exact: `p/q` rationals; float: decimal
    /// or `p/q`).
    fn parse_text(text: &str) -> Result<Self, String>;

    /// Lossless text form (exact: `p/q`; float: 17 significant digits).
    fn to_display_string(&self) -> String;

    /// JSON form (exact: string; float: number).
    fn to_json(&self) -> serde_json::Value;

    fn from_json(value: &serde_json::Value) -> Result<Self, String>;
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Exact;

    fn from_nat(n: &BigUint) -> Self {
        Rational::from_integer(BigInt::from(n.clone()))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn term_product<'a, I>(lead: &Self, factors: I) -> Self
    where
        Self: 'a,
        I: Iterator<Item = &'a Self>,
    {
        let mut numer = lead.numer().clone();
        let mut denom = lead.denom().clone();
        for f in factors {
            numer *= f.numer();
            denom *= f.denom();
        }
        Rational::new(numer, denom)
    }

    fn is_strictly_positive(&self) -> bool {
        self.is_positive()
    }

    fn approx_eq_abs(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn approx_eq_rel(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn exp_value(&self) -> Option<Self> {
        None
    }

    fn ln_value(&self) -> Option<Self> {
        None
    }

    fn sin_cos_value(&self) -> Option<(Self, Self)> {
        None
    }

    fn parse_text(text: &str) -> Result<Self, String> {
        parse_rational(text)
    }

    fn to_display_string(&self) -> String {
        self.to_string()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        match value {
            serde_json::Value::String(s) => parse_rational(s),
            other => Err(format!("expected a \"p/q\" string, got {other}")),
        }
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_nat(n: &BigUint) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn is_strictly_positive(&self) -> bool {
        *self > 0.0
    }

    fn approx_eq_abs(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn approx_eq_rel(&self, other: &Self, tol: f64) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= tol * scale
    }

    fn exp_value(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }

    fn ln_value(&self) -> Option<Self> {
        Some(f64::ln(*self))
    }

    fn sin_cos_value(&self) -> Option<(Self, Self)> {
        Some(f64::sin_cos(*self))
    }

    fn parse_text(text: &str) -> Result<Self, String> {
        let trimmed = text.trim();
        if let Ok(v) = trimmed.parse::<f64>() {
            return Ok(v);
        }
        parse_rational(trimmed).map(|r| Scalar::from_rational(&r))
    }

    fn to_display_string(&self) -> String {
        format!("{self:.16e}")
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        value
            .as_f64()
            .ok_or_else(|| format!("expected a number, got {value}"))
    }
}

/// Parse the rational text format: optional sign, integer, optional `/`
/// followed by a positive integer. Integers are shorthand for denominator 1.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    let (sign, digits) = match s.as_bytes().first() {
        Some(b'+') => (1, &s[1..]),
        Some(b'-') => (-1, &s[1..]),
        _ => (1, s),
    };
    let (numer_part, denom_part) = match digits.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (digits, None),
    };
    if numer_part.is_empty() || !numer_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("invalid rational {s:?}: expected an integer numerator"));
    }
    let mut numer: BigInt = numer_part.parse().expect("digits parse as BigInt");
    numer *= sign;
    let denom: BigInt = match denom_part {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!(
                    "invalid rational {s:?}: denominator must be a positive integer"
                ));
            }
            let denom: BigInt = d.parse().expect("digits parse as BigInt");
            if denom.is_zero() {
                return Err(format!("invalid rational {s:?}: denominator is zero"));
            }
            denom
        }
    };
    Ok(Rational::new(numer, denom))
}

/// Convenience constructor for small rationals, mostly used by tests and
/// examples.
pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}
