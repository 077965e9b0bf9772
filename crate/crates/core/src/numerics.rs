//! Exact rational numbers over unbounded integers.
//!
//! Every coefficient in the crate is a [`Rational`]. Values are always held in
//! canonical form: the denominator is positive, numerator and denominator are
//! coprime, and zero is `0/1`. The textual form is `p/q`, or just `p` when the
//! denominator is one.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::iter::{Product, Sum};
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Errors raised by rational arithmetic and parsing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational {0:?}: expected \"p/q\" with q > 0 or an integer \"p\"")]
    Parse(String),
}

/// An exact fraction in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Builds `numer / denom`, reducing to canonical form.
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, NumericsError> {
        if denom.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    /// `numer / denom` for machine integers.
    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self, NumericsError> {
        Self::new(BigInt::from(numer), BigInt::from(denom))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `1 / n` for a positive machine integer.
    pub fn unit_fraction(n: u64) -> Result<Self, NumericsError> {
        Self::new(BigInt::one(), BigInt::from(n))
    }

    /// `(-1)^n` as a rational.
    pub fn sign_power(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Self::one()
        } else {
            -Self::one()
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Strictly greater than zero.
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The integer value when the denominator is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    /// The value as a natural number, when it is a non-negative integer.
    pub fn to_biguint(&self) -> Option<BigUint> {
        self.to_integer().and_then(|n| n.to_biguint())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, NumericsError> {
        if rhs.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational, NumericsError> {
        Rational::one().checked_div(self)
    }

    pub fn scale_int(&self, n: &BigInt) -> Rational {
        Rational(&self.0 * n)
    }

    /// Divides by a nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> Result<Rational, NumericsError> {
        if n.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(Rational(&self.0 / BigRational::from_integer(n.clone())))
    }
}

/// Sum of two rationals.
pub fn rat_add(a: &Rational, b: &Rational) -> Rational {
    a + b
}

/// Product of two rationals.
pub fn rat_mul(a: &Rational, b: &Rational) -> Rational {
    a * b
}

/// Quotient of two rationals; dividing by zero is an error.
pub fn rat_div(a: &Rational, b: &Rational) -> Result<Rational, NumericsError> {
    a.checked_div(b)
}

/// Total order by exact cross-multiplication.
pub fn rat_cmp(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // denominators are positive, so the sign of the cross difference decides
        let lhs = self.0.numer() * other.0.denom();
        let rhs = other.0.numer() * self.0.denom();
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigUint> for Rational {
    fn from(n: BigUint) -> Self {
        Rational::from_integer(BigInt::from_biguint(Sign::Plus, n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $assign_trait<&'a Rational> for Rational {
            fn $assign_method(&mut self, rhs: &'a Rational) {
                self.0.$assign_method(&rhs.0);
            }
        }
        impl $assign_trait<Rational> for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                self.0.$assign_method(rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
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
    type Err = NumericsError;

    /// Accepts `p` or `p/q` with `q > 0`; non-reduced input is reduced.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NumericsError::Parse(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p, Some(q)),
            None => (s, None),
        };
        let numer: BigInt = p.parse().map_err(|_| bad())?;
        match q {
            None => Ok(Rational::from_integer(numer)),
            Some(q) => {
                if q.starts_with(['-', '+']) {
                    return Err(bad());
                }
                let denom: BigInt = q.parse().map_err(|_| bad())?;
                if denom.is_zero() {
                    return Err(bad());
                }
                Rational::new(numer, denom)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
