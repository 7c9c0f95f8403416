//! Exact integer and rational primitives.
//!
//! Every inequality the rest of the crate relies on is decided here by
//! integer cross-multiplication. Floating point only appears in
//! [`ln_big`] and [`render_decimal`], which feed reports and never a
//! comparison.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type Integer = BigInt;

/// Nonnegative greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Integer, b: &Integer) -> Integer {
    a.gcd(b)
}

/// Floor square root: the unique `r >= 0` with `r^2 <= n < (r+1)^2`.
pub fn isqrt(n: &Integer) -> Result<Integer> {
    if n.is_negative() {
        return Err(Error::NegativeRadicand(n.to_string()));
    }
    Ok(n.sqrt())
}

/// `a mod q` in `[0, q)`.
pub fn normalize_mod(a: &Integer, q: &Integer) -> Result<Integer> {
    if !q.is_positive() {
        return Err(Error::NonPositiveModulus(q.to_string()));
    }
    Ok(a.mod_floor(q))
}

/// Checks `q > 0` and `gcd(a, q) = 1`.
pub(crate) fn check_coprime(a: &Integer, q: &Integer) -> Result<()> {
    if !q.is_positive() {
        return Err(Error::NonPositiveModulus(q.to_string()));
    }
    if !gcd(a, q).is_one() {
        return Err(Error::NotCoprime {
            a: a.to_string(),
            q: q.to_string(),
        });
    }
    Ok(())
}

/// An exact fraction, always stored reduced with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: Integer, den: Integer) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator"));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    /// Builds a fraction the caller already knows to be reduced with
    /// `den > 0` (e.g. a convergent or semi-convergent).
    pub(crate) fn new_reduced(num: Integer, den: Integer) -> Self {
        debug_assert!(den.is_positive());
        debug_assert!(gcd(&num, &den).is_one());
        Rational(BigRational::new_raw(num, den))
    }

    pub fn from_integer(n: Integer) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn from_i64(num: i64, den: i64) -> Result<Self> {
        Self::new(num.into(), den.into())
    }

    pub fn zero() -> Self {
        Self::from_integer(Integer::zero())
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn floor(&self) -> Integer {
        self.numer().div_floor(self.denom())
    }

    pub fn is_integer(&self) -> bool {
        self.denom().is_one()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.numer().is_zero() {
            return Err(Error::InvalidParameter("reciprocal of zero"));
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn to_f64(&self) -> f64 {
        // Ratio::to_f64 handles operands far outside the f64 range.
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub(crate) fn from_inner(r: BigRational) -> Self {
        Rational(r)
    }
}

impl std::ops::Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl std::ops::Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A fraction exactly as written, before reduction: `-?[0-9]+/[1-9][0-9]*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionInput {
    pub num: Integer,
    pub den: Integer,
}

impl FractionInput {
    /// The fraction as a `Rational`, rejecting non-coprime input rather
    /// than reducing it.
    pub fn to_coprime(&self) -> Result<Rational> {
        check_coprime(&self.num, &self.den)?;
        Ok(Rational::new_reduced(self.num.clone(), self.den.clone()))
    }
}

impl FromStr for FractionInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedFraction(s.to_string());
        let (num, den) = s.split_once('/').ok_or_else(bad)?;
        let digits = num.strip_prefix('-').unwrap_or(num);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if den.is_empty() || !den.bytes().all(|b| b.is_ascii_digit()) || den.starts_with('0') {
            return Err(bad());
        }
        Ok(FractionInput {
            num: num.parse().map_err(|_| bad())?,
            den: den.parse().map_err(|_| bad())?,
        })
    }
}

/// Compares `sqrt(p / r)` with `value`, for `p >= 0`, `r > 0`.
pub fn cmp_sqrt_ratio(p: &Integer, r: &Integer, value: &Rational) -> Ordering {
    debug_assert!(!p.is_negative() && r.is_positive());
    if value.numer().is_negative() {
        return Ordering::Greater;
    }
    // sqrt(p/r) vs u/v  <=>  p v^2 vs r u^2
    let (u, v) = (value.numer(), value.denom());
    (p * v * v).cmp(&(r * u * u))
}

/// Natural logarithm of a positive big integer, valid far beyond the
/// f64 range of the integer itself.
pub fn ln_big(n: &Integer) -> f64 {
    if n.sign() != Sign::Plus {
        return f64::NAN;
    }
    let bits = n.bits();
    if bits <= 1000 {
        if let Some(v) = n.to_f64() {
            return v.ln();
        }
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Significant digits used for every decimal rendering.
pub const DECIMAL_DIGITS: usize = 12;

/// Renders `v` with [`DECIMAL_DIGITS`] significant digits in positional
/// notation (scientific beyond 1e21 or below 1e-9).
pub fn render_decimal(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("0.{}", "0".repeat(DECIMAL_DIGITS - 1));
    }
    let sci = format!("{:.*e}", DECIMAL_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-9..=21).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let n = digits.len() as i32;
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if exp + 1 >= n {
        format!("{}{}", digits, "0".repeat((exp + 1 - n) as usize))
    } else {
        let (int, frac) = digits.split_at((exp + 1) as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}
