//! Truncated formal power series over [`Rational`].
//!
//! A [`PowerSeries`] of order `n` knows the coefficients of `t^0 ..= t^n`;
//! everything above is unknown rather than zero. Each operation returns the
//! largest order at which its result is fully determined by the inputs.
//!
//! Division never silently absorbs a zero constant term. Series that start
//! with `t^v` are factored with [`valuation_split`] into a [`ValuedSeries`]
//! `t^v * u(t)` with `u(0) != 0`, and quotients of those carry the valuation
//! difference explicitly. A negative valuation is a formal Laurent series.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("a power series needs at least one coefficient")]
    Empty,
    #[error("divisor has zero constant term; factor both operands with valuation_split")]
    ZeroConstantTerm,
    #[error("series is zero up to order {0}; it has no known valuation")]
    NoValuation(usize),
    #[error("inner series of a composition must have zero constant term")]
    NonzeroInnerConstant,
    #[error("series has negative valuation {0}; it is not a power series")]
    NegativeValuation(i64),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
}

/// Coefficients `c_0 ..= c_order` of a series truncated after `t^order`.
#[derive(Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c * t^power`, truncated at `order`.
    pub fn monomial(c: Rational, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// The series `t` itself.
    pub fn variable(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `t^n`, or `None` past the truncation order.
    pub fn coeff(&self, n: usize) -> Option<&Rational> {
        self.coeffs.get(n)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// Drops knowledge above `order`; asking for more than is known is a no-op.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        PowerSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    /// Index of the first nonzero coefficient within the known range.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.order().min(other.order());
        PowerSeries {
            coeffs: (0..=n)
                .map(|i| &self.coeffs[i] + &other.coeffs[i])
                .collect(),
        }
    }

    pub fn sub(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.order().min(other.order());
        PowerSeries {
            coeffs: (0..=n)
                .map(|i| &self.coeffs[i] - &other.coeffs[i])
                .collect(),
        }
    }

    pub fn neg(&self) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Cauchy product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = Rational::zero();
                for p in 0..=k {
                    let (a, b) = (&self.coeffs[p], &other.coeffs[k - p]);
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect();
        PowerSeries { coeffs }
    }

    /// Multiplicative inverse of a unit series.
    pub fn inverse(&self) -> Result<PowerSeries, SeriesError> {
        PowerSeries::one(self.order()).div(self)
    }

    /// `self / divisor` for a divisor with nonzero constant term.
    pub fn div(&self, divisor: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        let lead = divisor.constant_term();
        if lead.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let lead_inv = lead.recip().expect("nonzero lead");
        let n = self.order().min(divisor.order());
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for m in 1..=k {
                let d = &divisor.coeffs[m];
                if !d.is_zero() {
                    acc -= d * &out[k - m];
                }
            }
            out.push(acc * &lead_inv);
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// `self^n` by repeated squaring; `self^0` is one.
    pub fn pow(&self, n: usize) -> PowerSeries {
        let mut result = PowerSeries::one(self.order());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `self(inner(t))`, accumulating successive powers of `inner`.
    pub fn compose(&self, inner: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        if !inner.constant_term().is_zero() {
            return Err(SeriesError::NonzeroInnerConstant);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut result = PowerSeries::constant(self.coeffs[0].clone(), n);
        let mut power = PowerSeries::one(n);
        // inner^m vanishes below t^m, so terms past m = n contribute nothing
        for m in 1..=n {
            power = power.mul(&inner);
            let c = &self.coeffs[m];
            if !c.is_zero() {
                result = result.add(&power.scale(c));
            }
        }
        Ok(result)
    }

    /// Divides by `t^shift`, discarding the (assumed zero) low coefficients.
    fn shift_down(&self, shift: usize) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs[shift..].to_vec(),
        }
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl fmt::Display for PowerSeries {
    /// JSON array of `"p/q"` strings.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "\"{c}\"")?;
        }
        f.write_str("]")
    }
}

pub fn ps_add(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    a.add(b)
}

pub fn ps_mul(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    a.mul(b)
}

pub fn ps_div(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    a.div(b)
}

pub fn ps_pow(f: &PowerSeries, n: usize) -> PowerSeries {
    f.pow(n)
}

pub fn ps_compose(f: &PowerSeries, g: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    f.compose(g)
}

/// `t^valuation * unit_part(t)` with `unit_part(0) != 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValuedSeries {
    valuation: i64,
    unit_part: PowerSeries,
}

/// Factors `a = t^v * u(t)` with `u(0) != 0`. The unit part has order
/// `a.order() - v`.
pub fn valuation_split(a: &PowerSeries) -> Result<ValuedSeries, SeriesError> {
    let v = a.valuation().ok_or(SeriesError::NoValuation(a.order()))?;
    Ok(ValuedSeries {
        valuation: v as i64,
        unit_part: a.shift_down(v),
    })
}

impl ValuedSeries {
    pub fn new(valuation: i64, unit_part: PowerSeries) -> Result<Self, SeriesError> {
        if unit_part.constant_term().is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        Ok(ValuedSeries {
            valuation,
            unit_part,
        })
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn unit_part(&self) -> &PowerSeries {
        &self.unit_part
    }

    /// Highest exponent whose coefficient is known.
    pub fn order(&self) -> i64 {
        self.valuation + self.unit_part.order() as i64
    }

    /// Coefficient of `t^n`; `None` past the known range.
    pub fn coeff(&self, n: i64) -> Option<Rational> {
        if n > self.order() {
            None
        } else if n < self.valuation {
            Some(Rational::zero())
        } else {
            self.unit_part.coeff((n - self.valuation) as usize).cloned()
        }
    }

    pub fn mul(&self, other: &ValuedSeries) -> ValuedSeries {
        ValuedSeries {
            valuation: self.valuation + other.valuation,
            unit_part: self.unit_part.mul(&other.unit_part),
        }
    }

    pub fn div(&self, other: &ValuedSeries) -> ValuedSeries {
        let unit_part = self
            .unit_part
            .div(&other.unit_part)
            .expect("unit parts are invertible");
        ValuedSeries {
            valuation: self.valuation - other.valuation,
            unit_part,
        }
    }

    pub fn pow(&self, n: usize) -> ValuedSeries {
        ValuedSeries {
            valuation: self.valuation * n as i64,
            unit_part: self.unit_part.pow(n),
        }
    }

    /// True when there is no principal part.
    pub fn is_power_series(&self) -> bool {
        self.valuation >= 0
    }

    /// Expands back to an ordinary power series of order [`Self::order`].
    pub fn to_power_series(&self) -> Result<PowerSeries, SeriesError> {
        if self.valuation < 0 {
            return Err(SeriesError::NegativeValuation(self.valuation));
        }
        let v = self.valuation as usize;
        let mut coeffs = vec![Rational::zero(); v];
        coeffs.extend(self.unit_part.coeffs.iter().cloned());
        Ok(PowerSeries { coeffs })
    }
}

/// Named series used throughout the coefficient computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    /// `t / (e^t - 1)`, the Bernoulli exponential generating function.
    BernoulliEgf,
    /// `1 - e^t`.
    OneMinusExp,
    /// `e^t - 1`.
    ExpMinusOne,
    /// `-log(1 - s) / s = sum s^q / (q + 1)`.
    NegLogOneMinusOverS,
    /// `log(1 + t) / t = sum (-1)^q t^q / (q + 1)`.
    LogOnePlusOverT,
}

impl Generator {
    pub const ALL: [Generator; 5] = [
        Generator::BernoulliEgf,
        Generator::OneMinusExp,
        Generator::ExpMinusOne,
        Generator::NegLogOneMinusOverS,
        Generator::LogOnePlusOverT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::BernoulliEgf => "bernoulli_egf",
            Generator::OneMinusExp => "one_minus_exp",
            Generator::ExpMinusOne => "exp_minus_one",
            Generator::NegLogOneMinusOverS => "neg_log_one_minus_over_s",
            Generator::LogOnePlusOverT => "log_one_plus_over_t",
        }
    }
}

impl FromStr for Generator {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| SeriesError::UnknownGenerator(s.to_string()))
    }
}

/// `1/n!` for `n = 0 ..= order`.
fn inverse_factorials(order: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(order + 1);
    let mut acc = Rational::one();
    out.push(acc.clone());
    for n in 1..=order {
        acc *= Rational::unit_fraction(n as u64).expect("n >= 1");
        out.push(acc.clone());
    }
    out
}

/// Exact coefficients of a named generator up to `order`.
pub fn gen_series(which: Generator, order: usize) -> PowerSeries {
    match which {
        Generator::ExpMinusOne => {
            let mut coeffs = inverse_factorials(order);
            coeffs[0] = Rational::zero();
            PowerSeries { coeffs }
        }
        Generator::OneMinusExp => gen_series(Generator::ExpMinusOne, order).neg(),
        Generator::BernoulliEgf => {
            // t / (e^t - 1): both sides have valuation one, so the quotient of
            // the unit parts is the whole answer.
            let numerator =
                valuation_split(&PowerSeries::variable(order + 1)).expect("t is nonzero");
            let denominator = valuation_split(&gen_series(Generator::ExpMinusOne, order + 1))
                .expect("e^t - 1 is nonzero");
            numerator
                .div(&denominator)
                .to_power_series()
                .expect("valuation zero")
                .truncate(order)
        }
        Generator::NegLogOneMinusOverS => PowerSeries {
            coeffs: (0..=order)
                .map(|q| Rational::unit_fraction(q as u64 + 1).expect("q + 1 >= 1"))
                .collect(),
        },
        Generator::LogOnePlusOverT => PowerSeries {
            coeffs: (0..=order)
                .map(|q| {
                    Rational::sign_power(q)
                        * Rational::unit_fraction(q as u64 + 1).expect("q + 1 >= 1")
                })
                .collect(),
        },
    }
}
