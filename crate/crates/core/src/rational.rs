//! Exact rational quantities used for every time, speed, work and energy value.
//!
//! [`Rational`] wraps `Ratio<i128>` and routes all arithmetic through the checked
//! operations, so an overflow panics loudly instead of wrapping silently. Values
//! are always kept in lowest terms with a positive denominator.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `numer / denom` in lowest terms. Panics if `denom == 0`.
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(value: i128) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn floor(self) -> i128 {
        self.0.floor().to_integer()
    }

    pub fn ceil(self) -> i128 {
        self.0.ceil().to_integer()
    }

    /// Integer power; panics on overflow.
    pub fn pow(self, exp: u32) -> Self {
        let mut acc = Rational::ONE;
        for _ in 0..exp {
            acc *= self;
        }
        acc
    }

    pub fn checked_pow(self, exp: u32) -> Option<Self> {
        let numer = self.numer().checked_pow(exp)?;
        let denom = self.denom().checked_pow(exp)?;
        Some(Rational(Ratio::new(numer, denom)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer()), BigInt::from(self.denom()))
    }

    /// Converts back from an arbitrary-precision value, if it fits.
    pub fn from_big(value: &BigRational) -> Option<Self> {
        let numer = value.numer().to_i128()?;
        let denom = value.denom().to_i128()?;
        Some(Rational::new(numer, denom))
    }

    /// Renders as a decimal with `digits` fractional digits (for `--float` outputs).
    pub fn to_decimal_string(&self, digits: usize) -> String {
        format!("{:.*}", digits, self.to_f64())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q` and plain decimals such as `1.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let invalid = || ParseRationalError::Invalid(text.to_string());
        if let Some((numer, denom)) = text.split_once('/') {
            let numer: i128 = numer.trim().parse().map_err(|_| invalid())?;
            let denom: i128 = denom.trim().parse().map_err(|_| invalid())?;
            if denom == 0 {
                return Err(ParseRationalError::ZeroDenominator(text.to_string()));
            }
            return Ok(Rational::new(numer, denom));
        }
        if let Some((whole, frac)) = text.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
                return Err(invalid());
            }
            let negative = whole.trim_start().starts_with('-');
            let whole_value: i128 = match whole {
                "" | "-" | "+" => 0,
                w => w.parse().map_err(|_| invalid())?,
            };
            let scale = 10i128.checked_pow(frac.len() as u32).ok_or_else(invalid)?;
            let frac_value: i128 = frac.parse().map_err(|_| invalid())?;
            let magnitude = Rational::from_integer(whole_value.abs()) + Rational::new(frac_value, scale);
            return Ok(if negative { -magnitude } else { magnitude });
        }
        text.parse::<i128>().map(Rational::from_integer).map_err(|_| invalid())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string such as \"3/2\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v as i128))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v as i128))
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

impl From<i128> for Rational {
    fn from(value: i128) -> Self {
        Rational::from_integer(value)
    }
}

impl From<usize> for Rational {
    fn from(value: usize) -> Self {
        Rational::from_integer(value as i128)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_integer(value as i128)
    }
}

impl From<i32> for Rational {
    fn from(value: i32) -> Self {
        Rational::from_integer(value as i128)
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident, $assign_trait:ident, $assign:ident, $what:literal) => {
        impl $trait for Rational {
            type Output = Rational;

            fn $method(self, rhs: Rational) -> Rational {
                match self.0.$checked(&rhs.0) {
                    Some(value) => Rational(value),
                    None => panic!(concat!("rational overflow in ", $what, ": {} and {}"), self, rhs),
                }
            }
        }

        impl $assign_trait for Rational {
            fn $assign(&mut self, rhs: Rational) {
                *self = $trait::$method(*self, rhs);
            }
        }
    };
}

checked_binop!(Add, add, checked_add, AddAssign, add_assign, "addition");
checked_binop!(Sub, sub, checked_sub, SubAssign, sub_assign, "subtraction");
checked_binop!(Mul, mul, checked_mul, MulAssign, mul_assign, "multiplication");

impl Div for Rational {
    type Output = Rational;

    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        match self.0.checked_div(&rhs.0) {
            Some(value) => Rational(value),
            None => panic!("rational overflow in division: {self} and {rhs}"),
        }
    }
}

impl DivAssign for Rational {
    fn div_assign(&mut self, rhs: Rational) {
        *self = *self / rhs;
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + *x)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

/// Shorthand used throughout the tests: `rat(3, 2)` is 3/2.
pub fn rat(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}
