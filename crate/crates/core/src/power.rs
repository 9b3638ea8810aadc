//! Rational powers `base^exp` for the convex power model.
//!
//! Exact mode returns a [`Rational`] only when the root is itself rational
//! (always the case for integer exponents). Approximate mode returns a
//! [`Fixed64`]: a binary fixed-point value with 64 fractional bits, rounded to
//! nearest.

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

const FRACTION_BITS: u32 = 64;

/// Fixed-point number with 64 fractional bits stored in an `i128`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed64 {
    raw: i128,
}

impl Fixed64 {
    pub const ZERO: Fixed64 = Fixed64 { raw: 0 };

    pub fn from_raw(raw: i128) -> Self {
        Fixed64 { raw }
    }

    pub fn raw(&self) -> i128 {
        self.raw
    }

    /// Nearest representable value (ties away from zero).
    pub fn from_rational(value: Rational) -> Self {
        let scaled = value.to_big() * BigRational::from_integer(BigInt::one() << FRACTION_BITS);
        Fixed64 { raw: round_half_away(&scaled) }
    }

    pub fn mul_rational(self, factor: Rational) -> Self {
        let product = BigRational::from_integer(BigInt::from(self.raw)) * factor.to_big();
        Fixed64 { raw: round_half_away(&product) }
    }

    /// Exact value of this fixed-point number.
    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.raw), BigInt::one() << FRACTION_BITS)
    }

    pub fn to_f64(&self) -> f64 {
        self.raw as f64 / 2f64.powi(FRACTION_BITS as i32)
    }

    pub fn is_negative(&self) -> bool {
        self.raw < 0
    }
}

fn round_half_away(value: &BigRational) -> i128 {
    value
        .round()
        .to_integer()
        .to_i128()
        .expect("fixed-point value out of range")
}

impl Add for Fixed64 {
    type Output = Fixed64;

    fn add(self, rhs: Fixed64) -> Fixed64 {
        Fixed64 { raw: self.raw.checked_add(rhs.raw).expect("fixed-point overflow") }
    }
}

impl Sub for Fixed64 {
    type Output = Fixed64;

    fn sub(self, rhs: Fixed64) -> Fixed64 {
        Fixed64 { raw: self.raw.checked_sub(rhs.raw).expect("fixed-point overflow") }
    }
}

impl fmt::Display for Fixed64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12}", self.to_f64())
    }
}

impl fmt::Debug for Fixed64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fixed64({})", self.to_f64())
    }
}

/// `base^exp` when it is rational, `None` otherwise (or on `i128` overflow).
///
/// Requires `base > 0` and `exp >= 0`.
pub fn exact_pow(base: Rational, exp: Rational) -> Option<Rational> {
    assert!(base.is_positive(), "power base must be positive");
    assert!(!exp.is_negative(), "power exponent must be non-negative");
    let p = u32::try_from(exp.numer()).ok()?;
    let q = u32::try_from(exp.denom()).ok()?;
    let root = if q == 1 {
        base
    } else {
        let a = exact_integer_root(base.numer(), q)?;
        let b = exact_integer_root(base.denom(), q)?;
        Rational::new(a, b)
    };
    root.checked_pow(p)
}

fn exact_integer_root(value: i128, q: u32) -> Option<i128> {
    let r = value.nth_root(q);
    (r.checked_pow(q)? == value).then_some(r)
}

/// `base^exp` rounded to the nearest multiple of `2^-64`.
pub fn fixed_pow(base: Rational, exp: Rational) -> Fixed64 {
    assert!(base.is_positive(), "power base must be positive");
    assert!(!exp.is_negative(), "power exponent must be non-negative");
    let p = u32::try_from(exp.numer()).expect("exponent numerator too large");
    let q = u32::try_from(exp.denom()).expect("exponent denominator too large");
    let a = BigInt::from(base.numer()).pow(p);
    let b = BigInt::from(base.denom()).pow(p);
    // floor((a/b)^(1/q) * 2^65), then halve with rounding.
    let shift = (FRACTION_BITS + 1) as usize * q as usize;
    let scaled: BigInt = (a << shift) / b;
    let root = scaled.nth_root(q);
    let raw = (root + BigInt::one()) >> 1usize;
    Fixed64 {
        raw: raw.to_i128().expect("fixed-point power out of range"),
    }
}

/// A power or energy figure: exact when representable, fixed-point otherwise.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EnergyValue {
    Exact(Rational),
    Approx(Fixed64),
}

impl EnergyValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            EnergyValue::Exact(q) => q.to_f64(),
            EnergyValue::Approx(x) => x.to_f64(),
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match self {
            EnergyValue::Exact(q) => Some(*q),
            EnergyValue::Approx(_) => None,
        }
    }

    pub fn to_big_rational(&self) -> BigRational {
        match self {
            EnergyValue::Exact(q) => q.to_big(),
            EnergyValue::Approx(x) => x.to_big_rational(),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.to_big_rational().is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.to_big_rational().is_zero()
    }

    /// Scales by an exact factor; stays exact when `self` is.
    pub fn scale(&self, factor: Rational) -> EnergyValue {
        match self {
            EnergyValue::Exact(q) => EnergyValue::Exact(*q * factor),
            EnergyValue::Approx(x) => EnergyValue::Approx(x.mul_rational(factor)),
        }
    }

    fn as_fixed(&self) -> Fixed64 {
        match self {
            EnergyValue::Exact(q) => Fixed64::from_rational(*q),
            EnergyValue::Approx(x) => *x,
        }
    }
}

impl Add for EnergyValue {
    type Output = EnergyValue;

    fn add(self, rhs: EnergyValue) -> EnergyValue {
        match (self, rhs) {
            (EnergyValue::Exact(a), EnergyValue::Exact(b)) => EnergyValue::Exact(a + b),
            (a, b) => EnergyValue::Approx(a.as_fixed() + b.as_fixed()),
        }
    }
}

impl Sub for EnergyValue {
    type Output = EnergyValue;

    fn sub(self, rhs: EnergyValue) -> EnergyValue {
        match (self, rhs) {
            (EnergyValue::Exact(a), EnergyValue::Exact(b)) => EnergyValue::Exact(a - b),
            (a, b) => EnergyValue::Approx(a.as_fixed() - b.as_fixed()),
        }
    }
}

impl fmt::Display for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyValue::Exact(q) => write!(f, "{q}"),
            EnergyValue::Approx(x) => write!(f, "~{x}"),
        }
    }
}

/// `base^exp`, exact when possible.
pub fn pow_value(base: Rational, exp: Rational) -> EnergyValue {
    match exact_pow(base, exp) {
        Some(q) => EnergyValue::Exact(q),
        None => EnergyValue::Approx(fixed_pow(base, exp)),
    }
}
