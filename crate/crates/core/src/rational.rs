//! Exact rational numbers and the integer power-of-two helpers built on them.
//!
//! Capacities, rates, error probabilities and every quantity in an edge-removal
//! report are kept as exact rationals. The JSON form is the canonical string
//! `"p/q"` in lowest terms (or `"p"` when the denominator is one).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(v: i64) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        Rational(BigRational::new(numer, denom))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// `max(self - other, 0)`.
    pub fn saturating_sub(&self, other: &Rational) -> Rational {
        let d = self - other;
        if d.is_negative() {
            Rational::zero()
        } else {
            d
        }
    }

    pub fn min(self, other: Rational) -> Rational {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Rational) -> Rational {
        std::cmp::max(self, other)
    }

    /// Lossy conversion, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Nearest grid point `k / 10^digits` rounded toward `-inf` (`up == false`) or `+inf`.
    pub fn from_f64_rounded(x: f64, digits: u32, up: bool) -> Rational {
        let scale = 10f64.powi(digits as i32);
        let scaled = x * scale;
        let k = if up { scaled.ceil() } else { scaled.floor() };
        Rational(BigRational::new(
            BigInt::from(k as i64),
            BigInt::from(10u64.pow(digits)),
        ))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }
}

impl From<BigUint> for Rational {
    fn from(v: BigUint) -> Self {
        Rational(BigRational::from_integer(BigInt::from_biguint(Sign::Plus, v)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
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

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let numer: BigInt = n.parse().map_err(|_| err())?;
        let denom: BigInt = d.parse().map_err(|_| err())?;
        if denom.is_zero() {
            return Err(err());
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(v) => Ok(Rational::from_integer(v)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// `floor(2^x)` for a nonnegative rational exponent `x = p/q`, computed as the
/// integer `q`-th root of `2^p`. Negative exponents give `0`.
pub fn pow2_floor(exponent: &Rational) -> BigUint {
    if exponent.is_negative() {
        return BigUint::zero();
    }
    let p = exponent
        .numer()
        .to_u64()
        .expect("exponent numerator out of range");
    let q = exponent
        .denom()
        .to_u32()
        .expect("exponent denominator out of range");
    let power = BigUint::one() << p;
    if q == 1 {
        power
    } else {
        power.nth_root(q)
    }
}

/// Size of the per-round alphabet `floor(2^(capacity * n))` of an edge.
pub fn alphabet_size(capacity: &Rational, inner_n: u64) -> BigUint {
    pow2_floor(&(capacity * Rational::from(inner_n)))
}

/// `floor(2^(rate * N * n))`, the message-set size for a source of the given rate.
pub fn message_size_for_rate(rate: &Rational, inner_n: u64, outer_n: u64) -> BigUint {
    pow2_floor(&(rate * Rational::from(inner_n * outer_n)))
}

/// Saturating conversion used for split-constraint comparisons: a product of two
/// `u64` values always fits in `u128`, so clamping the bound is exact for that use.
pub fn saturating_u128(v: &BigUint) -> u128 {
    v.to_u128().unwrap_or(u128::MAX)
}

/// `Some(k)` when `v == 2^k`.
pub fn exact_log2(v: u64) -> Option<u32> {
    if v.is_power_of_two() {
        Some(v.trailing_zeros())
    } else {
        None
    }
}

/// `floor(log2 v)` and `ceil(log2 v)` for `v >= 1`.
pub fn log2_bounds(v: &BigUint) -> (u64, u64) {
    assert!(!v.is_zero());
    let floor = v.bits() - 1;
    let exact = (BigUint::one() << floor) == *v;
    (floor, if exact { floor } else { floor + 1 })
}

/// `gcd`-reduced ratio `a / b` of two positive integers.
pub fn ratio(a: u64, b: u64) -> Rational {
    let g = a.gcd(&b).max(1);
    Rational::from_big(BigInt::from(a / g), BigInt::from(b / g))
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer((*other).into())
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(&BigRational::from_integer((*other).into()))
    }
}
