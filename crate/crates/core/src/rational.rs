//! Exact rational scalar used for every profit, size and threshold.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number kept in lowest terms with a positive
/// denominator.
///
/// Values handled by the solver are nonnegative. Subtraction follows the
/// convention of unsigned integers: a negative result is a logic error and
/// panics; use [`Rational::checked_sub`] when the sign is not known.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`, rejecting a zero denominator and negative values.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, Error> {
        let numer = numer.into();
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let value = BigRational::new(numer, denom);
        if value.is_negative() {
            return Err(Error::InvalidParameter(format!("negative value {value}")));
        }
        Ok(Rational(value))
    }

    /// Shorthand for small literals; panics on invalid input.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("invalid rational literal")
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        let value = value.into();
        assert!(!value.is_negative(), "negative rational");
        Rational(BigRational::from_integer(value))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^exp` for a possibly negative exponent.
    pub fn pow2(exp: i32) -> Self {
        let big = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            Rational(BigRational::from_integer(big))
        } else {
            Rational(BigRational::new(BigInt::one(), big))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Option<Rational> {
        if rhs > self {
            None
        } else {
            Some(Rational(&self.0 - &rhs.0))
        }
    }

    /// Integer power.
    pub fn pow(&self, exp: u32) -> Self {
        Rational(num::traits::Pow::pow(&self.0, exp))
    }

    pub fn mul_int(&self, factor: impl Into<BigInt>) -> Self {
        Rational(&self.0 * BigRational::from_integer(factor.into()))
    }

    /// `floor(self / rhs)` for a positive `rhs`.
    pub fn div_floor(&self, rhs: &Rational) -> BigInt {
        (self / rhs).floor()
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for Rational {
    /// Canonical `a/b` form, also for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a/b`, plain integers and decimals such as `0.125`; decimals are
    /// read exactly as `a / 10^k`.
    fn from_str(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let bad = || Error::InvalidParameter(format!("malformed rational `{text}`"));
        if text.is_empty() || text.starts_with('-') || text.starts_with('+') {
            return Err(bad());
        }
        if let Some((numer, denom)) = text.split_once('/') {
            let numer = parse_digits(numer).ok_or_else(bad)?;
            let denom = parse_digits(denom).ok_or_else(bad)?;
            return Rational::new(numer, denom);
        }
        if let Some((whole, frac)) = text.split_once('.') {
            if whole.is_empty() && frac.is_empty() {
                return Err(bad());
            }
            let whole = if whole.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(whole).ok_or_else(bad)?
            };
            let scale = num::pow(BigInt::from(10u32), frac.len());
            let frac = if frac.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(frac).ok_or_else(bad)?
            };
            return Rational::new(whole * &scale + frac, scale);
        }
        Ok(Rational::from_integer(parse_digits(text).ok_or_else(bad)?))
    }
}

fn parse_digits(text: &str) -> Option<BigInt> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(text.as_bytes(), 10)
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                let f: fn(&BigRational, &BigRational) -> BigRational = $body;
                Rational(f(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a + b);
forward_binop!(Mul, mul, |a, b| a * b);
forward_binop!(Div, div, |a, b| {
    assert!(!b.is_zero(), "division by zero");
    a / b
});
forward_binop!(Sub, sub, |a, b| {
    assert!(a >= b, "rational subtraction underflow");
    a - b
});

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Compares `a/b` against `c/d` without building the quotients.
pub fn cmp_ratio(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Ordering {
    (a * d).cmp(&(c * b))
}
