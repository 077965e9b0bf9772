//! The coefficient family `b(i, j, k)` and its normalisation
//! `d(i, j, k) = (-1)^j j! b(i, j, k)`, computed three independent ways.
//!
//! * [`Method::Recurrence`]: `b(1, j, k) = (-1)^{j+1-k} B_{j+1-k} / (j+1-k)!`
//!   for `k <= 1 + j` (zero otherwise) and, for `i >= 2`,
//!   `b(i, j, k) = sum_{m=0}^{j} (-1)^m B_m / m! * b(i-1, j+1-m, k)`.
//! * [`Method::Genfunc`]: `d(i, j, k) = j! [t^j] D_{(i,k)}(t)` where
//!   `D_{(i,k)} = (-t)^k / (1 - e^t)^i` when `k >= i`, and otherwise
//!   `D_{(i,k)} = (D_{(i-1,k)} - d(i-1, 0, k)) / (1 - e^t)` starting from
//!   `D_{(1,k)} = (-t)^k / (1 - e^t)`.
//! * [`Method::ClosedForm`]: for `i <= k <= i + j`, the coefficient of
//!   `t^{i+j-k}` in `(sum_l (-1)^l B_l t^l / l!)^i`; for `k < i`,
//!   `(1 / ((-1)^j j!)) sum_{p=0}^{j} (-1)^p p! S(j, p) H(k, p + i - k)` with
//!   `H` the harmonic product sums; zero for `k > i + j`.
//!
//! Indices live on the extended domain `i >= 1, j >= 0, k >= 1`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Claim, Witness};
use crate::numerics::Rational;
use crate::sequences::SequenceCache;
use crate::series::{
    gen_series, valuation_split, Generator, PowerSeries, SeriesError, ValuedSeries,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("invalid index ({i}, {j}, {k}): need i >= 1, j >= 0, k >= 1")]
    InvalidIndex { i: usize, j: usize, k: usize },
    #[error("unknown method {0:?}: expected recurrence, genfunc or closed")]
    UnknownMethod(alloc::string::String),
    #[error(
        "internal inconsistency at {idx}: constant term of D_(i,k) is {found}, expected {expected}"
    )]
    Inconsistent {
        idx: TripleIndex,
        expected: Box<Rational>,
        found: Box<Rational>,
    },
    #[error("conflicting values at {idx}: {existing} ({existing_method}) vs {new} ({new_method})")]
    Conflict {
        idx: TripleIndex,
        existing: Box<Rational>,
        existing_method: Method,
        new: Box<Rational>,
        new_method: Method,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `(i, j, k)` with `i >= 1`, `j >= 0`, `k >= 1`. Orders lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIndex", into = "RawIndex")]
pub struct TripleIndex {
    i: usize,
    j: usize,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct RawIndex {
    i: usize,
    j: usize,
    k: usize,
}

impl TryFrom<RawIndex> for TripleIndex {
    type Error = CoeffError;
    fn try_from(r: RawIndex) -> Result<Self, Self::Error> {
        TripleIndex::new(r.i, r.j, r.k)
    }
}

impl From<TripleIndex> for RawIndex {
    fn from(t: TripleIndex) -> Self {
        RawIndex {
            i: t.i,
            j: t.j,
            k: t.k,
        }
    }
}

impl TripleIndex {
    pub fn new(i: usize, j: usize, k: usize) -> Result<Self, CoeffError> {
        if i == 0 || k == 0 {
            return Err(CoeffError::InvalidIndex { i, j, k });
        }
        Ok(TripleIndex { i, j, k })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `k > i + j`, where every method gives zero.
    pub fn past_boundary(&self) -> bool {
        self.k > self.i + self.j
    }
}

impl fmt::Display for TripleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.i, self.j, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "recurrence")]
    Recurrence,
    #[serde(rename = "genfunc")]
    Genfunc,
    #[serde(rename = "closed_form", alias = "closed")]
    ClosedForm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Recurrence, Method::Genfunc, Method::ClosedForm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Recurrence => "recurrence",
            Method::Genfunc => "genfunc",
            Method::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "recurrence" => Ok(Method::Recurrence),
            "genfunc" => Ok(Method::Genfunc),
            "closed" | "closed_form" => Ok(Method::ClosedForm),
            other => Err(CoeffError::UnknownMethod(other.into())),
        }
    }
}

fn sign_factorial(j: usize) -> BigInt {
    let f = (1..=j).fold(BigInt::from(1), |acc, m| acc * BigInt::from(m));
    if j.is_multiple_of(2) {
        f
    } else {
        -f
    }
}

/// `d = (-1)^j j! b`.
pub fn d_from_b(idx: TripleIndex, b: &Rational) -> Rational {
    b.scale_int(&sign_factorial(idx.j))
}

/// `b = d / ((-1)^j j!)`.
pub fn b_from_d(idx: TripleIndex, d: &Rational) -> Rational {
    d.div_int(&sign_factorial(idx.j)).expect("j! is nonzero")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub value: Rational,
    pub method: Method,
}

/// Insert-only map from index to `b` value, tagged with the method that
/// first produced it. Writing a different value for an existing index is
/// an error.
#[derive(Debug, Clone, Default)]
pub struct CoeffTable {
    entries: BTreeMap<TripleIndex, TableEntry>,
}

impl CoeffTable {
    pub fn insert(
        &mut self,
        idx: TripleIndex,
        value: Rational,
        method: Method,
    ) -> Result<(), CoeffError> {
        match self.entries.get(&idx) {
            Some(existing) if existing.value != value => Err(CoeffError::Conflict {
                idx,
                existing: Box::new(existing.value.clone()),
                existing_method: existing.method,
                new: Box::new(value),
                new_method: method,
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(idx, TableEntry { value, method });
                Ok(())
            }
        }
    }

    pub fn get(&self, idx: &TripleIndex) -> Option<&TableEntry> {
        self.entries.get(idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TripleIndex, &TableEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Chain `D_{(1,k)}, D_{(2,k)}, ...`; entry `i - 1` has order `top + 1 - i`.
#[derive(Debug, Clone)]
struct GenfuncChain {
    top: usize,
    series: Vec<PowerSeries>,
}

/// Coefficient engine with per-method memo tables.
///
/// Cloning gives an independent engine that keeps everything computed so
/// far; the certifier clones a warmed engine into each shard.
#[derive(Debug, Clone, Default)]
pub struct Coefficients {
    seq: SequenceCache,
    table: CoeffTable,
    /// `k -> rows`, `rows[i - 1][j] = b(i, j, k)` by the recurrence.
    recurrence_slabs: BTreeMap<usize, Vec<Vec<Rational>>>,
    genfunc_chains: BTreeMap<usize, GenfuncChain>,
    /// `(1 - e^t)^i` for `i = 1..`, unit parts of a common order.
    one_minus_exp_powers: Vec<ValuedSeries>,
    one_minus_exp_order: usize,
    /// `(sum_l (-1)^l B_l t^l / l!)^i` for `i = 0..`, of a common order.
    signed_bernoulli_powers: Vec<PowerSeries>,
    signed_bernoulli_order: usize,
}

impl Coefficients {
    pub fn new() -> Self {
        Self::default()
    }

    /// An engine whose sequence values come from `seq`, which may have been
    /// seeded with arbitrary values (used to test the checking harness).
    pub fn with_sequences(seq: SequenceCache) -> Self {
        Coefficients {
            seq,
            ..Self::default()
        }
    }

    pub fn sequences(&mut self) -> &mut SequenceCache {
        &mut self.seq
    }

    pub fn table(&self) -> &CoeffTable {
        &self.table
    }

    /// `b(idx)` by `method`, recorded in the table.
    pub fn b(&mut self, idx: TripleIndex, method: Method) -> Result<Rational, CoeffError> {
        let value = match method {
            Method::Recurrence => self.b_recurrence(idx),
            Method::Genfunc => b_from_d(idx, &self.d_genfunc(idx)?),
            Method::ClosedForm => self.b_closed_form(idx),
        };
        self.table.insert(idx, value.clone(), method)?;
        Ok(value)
    }

    /// `d(idx)` by `method`, recorded in the table as its `b` value.
    pub fn d(&mut self, idx: TripleIndex, method: Method) -> Result<Rational, CoeffError> {
        Ok(d_from_b(idx, &self.b(idx, method)?))
    }

    /// `b(idx)` without touching the table.
    pub fn b_untracked(
        &mut self,
        idx: TripleIndex,
        method: Method,
    ) -> Result<Rational, CoeffError> {
        Ok(match method {
            Method::Recurrence => self.b_recurrence(idx),
            Method::Genfunc => b_from_d(idx, &self.d_genfunc(idx)?),
            Method::ClosedForm => self.b_closed_form(idx),
        })
    }

    /// Precomputes what a sweep over `1 <= i <= i_max`, `0 <= j <= j_max`
    /// needs from the sequence tables.
    pub fn prepare(&mut self, i_max: usize, j_max: usize, method: Method) {
        self.seq.stirling2(j_max, 0).expect("0 <= j");
        self.seq.factorial(i_max + j_max + 1);
        match method {
            Method::Recurrence => {
                self.seq.bernoulli(i_max + j_max + 1);
            }
            Method::Genfunc => {}
            Method::ClosedForm => {
                self.seq.bernoulli(j_max + 1);
                self.seq.ensure_stirling1(i_max + j_max);
                self.ensure_signed_bernoulli_powers(i_max, j_max);
            }
        }
    }

    fn signed_bernoulli_terms(&mut self, n: usize) -> Vec<Rational> {
        (0..=n)
            .map(|m| Rational::sign_power(m) * self.seq.bernoulli_over_factorial(m))
            .collect()
    }

    /// `b(idx)` from the extended recurrence. The slab of rows for this `k`
    /// is memoised and only ever extended.
    pub fn b_recurrence(&mut self, idx: TripleIndex) -> Rational {
        let TripleIndex { i, j, k } = idx;
        // row i' must reach column j + (i - i')
        let terms = self.signed_bernoulli_terms(j + i);
        let rows = self.recurrence_slabs.entry(k).or_default();
        while rows.len() < i {
            rows.push(Vec::new());
        }
        for row in 1..=i {
            let target = j + (i - row) + 1;
            let (below, here) = rows.split_at_mut(row - 1);
            let current = &mut here[0];
            while current.len() < target {
                let col = current.len();
                let value = if row == 1 {
                    if k > col + 1 {
                        Rational::zero()
                    } else {
                        terms[col + 1 - k].clone()
                    }
                } else {
                    let prev = &below[row - 2];
                    let mut acc = Rational::zero();
                    for (m, term) in terms.iter().enumerate().take(col + 1) {
                        let other = &prev[col + 1 - m];
                        if !other.is_zero() && !term.is_zero() {
                            acc += term * other;
                        }
                    }
                    acc
                };
                current.push(value);
            }
        }
        rows[i - 1][j].clone()
    }

    fn one_minus_exp_split(order: usize) -> ValuedSeries {
        valuation_split(&gen_series(Generator::OneMinusExp, order + 1)).expect("1 - e^t is nonzero")
    }

    /// `(1 - e^t)^i` with a unit part of order at least `order`.
    fn one_minus_exp_power(&mut self, i: usize, order: usize) -> ValuedSeries {
        if order > self.one_minus_exp_order || self.one_minus_exp_powers.is_empty() {
            self.one_minus_exp_order = order.max(2 * self.one_minus_exp_order);
            self.one_minus_exp_powers.clear();
        }
        let base = Self::one_minus_exp_split(self.one_minus_exp_order);
        while self.one_minus_exp_powers.len() < i {
            let next = match self.one_minus_exp_powers.last() {
                Some(p) => p.mul(&base),
                None => base.clone(),
            };
            self.one_minus_exp_powers.push(next);
        }
        self.one_minus_exp_powers[i - 1].clone()
    }

    /// `d(idx)` read off the generating function `D_{(i,k)}(t)`.
    pub fn d_genfunc(&mut self, idx: TripleIndex) -> Result<Rational, CoeffError> {
        let TripleIndex { i, j, k } = idx;
        if k >= i {
            // (-t)^k / (1 - e^t)^i = (-1)^k t^{k-i} / u(t)^i
            let shift = k - i;
            if j < shift {
                return Ok(Rational::zero());
            }
            let order = j - shift;
            let numerator = ValuedSeries::new(
                k as i64,
                PowerSeries::constant(Rational::sign_power(k), order),
            )?;
            let quotient = numerator.div(&self.one_minus_exp_power(i, order));
            let coeff = quotient.coeff(j as i64).expect("order covers j");
            return Ok(coeff.scale_int(&BigInt::from(self.seq.factorial(j))));
        }
        let series = self.genfunc_series(i, j, k)?;
        let coeff = series.coeff(j).expect("chain order covers j").clone();
        Ok(coeff.scale_int(&BigInt::from(self.seq.factorial(j))))
    }

    /// `D_{(i,k)}` from the one-step recursion, known to order at least `j`.
    fn genfunc_series(&mut self, i: usize, j: usize, k: usize) -> Result<&PowerSeries, CoeffError> {
        // entry i - 1 has order top + 1 - i, so the chain serves (i, j) iff top + 1 >= i + j
        let rebuild = self
            .genfunc_chains
            .get(&k)
            .is_none_or(|c| c.top + 1 < i + j);
        if rebuild {
            let old_top = self.genfunc_chains.get(&k).map_or(0, |c| c.top);
            let top = (i + j).max(old_top);
            let first = Self::genfunc_first(k, top)?;
            self.genfunc_chains.insert(
                k,
                GenfuncChain {
                    top,
                    series: alloc::vec![first],
                },
            );
        }
        while self.genfunc_chains[&k].series.len() < i {
            let step = self.genfunc_chains[&k].series.len();
            let prev = self.genfunc_chains[&k].series[step - 1].clone();
            // prev is D_{(step,k)}; its constant term is d(step, 0, k)
            let expected = if step < k {
                Rational::zero()
            } else {
                self.seq.harmonic_product_sum(k, step - k)
            };
            let found = prev.constant_term().clone();
            if found != expected {
                let idx = TripleIndex::new(step, 0, k)?;
                return Err(CoeffError::Inconsistent {
                    idx,
                    expected: Box::new(expected),
                    found: Box::new(found),
                });
            }
            let next = Self::genfunc_step(&prev)?;
            self.genfunc_chains
                .get_mut(&k)
                .expect("inserted")
                .series
                .push(next);
        }
        Ok(&self.genfunc_chains[&k].series[i - 1])
    }

    /// `D_{(1,k)} = (-t)^k / (1 - e^t)` to order `top`.
    fn genfunc_first(k: usize, top: usize) -> Result<PowerSeries, CoeffError> {
        if k - 1 > top {
            return Ok(PowerSeries::zero(top));
        }
        let unit_order = top - (k - 1);
        let numerator = ValuedSeries::new(
            k as i64,
            PowerSeries::constant(Rational::sign_power(k), unit_order),
        )?;
        let quotient = numerator.div(&Self::one_minus_exp_split(unit_order));
        Ok(quotient.to_power_series()?)
    }

    /// `(D - D(0)) / (1 - e^t)`, one order lower than `D`.
    fn genfunc_step(prev: &PowerSeries) -> Result<PowerSeries, CoeffError> {
        let order = prev.order();
        let mut coeffs = prev.coeffs().to_vec();
        coeffs[0] = Rational::zero();
        let numerator = PowerSeries::from_coeffs(coeffs)?;
        if order == 0 {
            return Err(SeriesError::NoValuation(0).into());
        }
        let split = match valuation_split(&numerator) {
            Ok(split) => split,
            // zero through t^order leaves zero through t^(order-1)
            Err(SeriesError::NoValuation(_)) => return Ok(PowerSeries::zero(order - 1)),
            Err(e) => return Err(e.into()),
        };
        let quotient = split.div(&Self::one_minus_exp_split(order));
        let series = quotient.to_power_series()?;
        Ok(series.truncate(order - 1))
    }

    fn ensure_signed_bernoulli_powers(&mut self, i: usize, order: usize) {
        if order > self.signed_bernoulli_order || self.signed_bernoulli_powers.is_empty() {
            self.signed_bernoulli_order = order.max(2 * self.signed_bernoulli_order);
            self.signed_bernoulli_powers.clear();
        }
        let n = self.signed_bernoulli_order;
        let base = PowerSeries::from_coeffs(self.signed_bernoulli_terms(n)).expect("non-empty");
        if self.signed_bernoulli_powers.is_empty() {
            self.signed_bernoulli_powers.push(PowerSeries::one(n));
        }
        while self.signed_bernoulli_powers.len() <= i {
            let next = self
                .signed_bernoulli_powers
                .last()
                .expect("seeded")
                .mul(&base);
            self.signed_bernoulli_powers.push(next);
        }
    }

    /// `b(idx)` from the closed form.
    pub fn b_closed_form(&mut self, idx: TripleIndex) -> Rational {
        let TripleIndex { i, j, k } = idx;
        if k > i + j {
            return Rational::zero();
        }
        if k >= i {
            let n = i + j - k;
            self.ensure_signed_bernoulli_powers(i, n);
            return self.signed_bernoulli_powers[i]
                .coeff(n)
                .expect("order covers n")
                .clone();
        }
        // H(k, q) = k! c(q + k, k) / (q + k)!, so over the common denominator
        // (i + j)! every term is an integer and only the final quotient is reduced.
        let mut acc = BigInt::zero();
        for p in 0..=j {
            let s = self.seq.stirling2(j, p).expect("p <= j");
            if s.is_zero() {
                continue;
            }
            let rising: BigUint = (p + i + 1..=i + j).map(BigUint::from).product();
            let term = BigInt::from(
                s * self.seq.factorial(p) * self.seq.stirling1_unsigned(p + i, k) * rising,
            );
            if p % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let numer = acc * BigInt::from(self.seq.factorial(k));
        let denom = sign_factorial(j) * BigInt::from(self.seq.factorial(i + j));
        Rational::new(numer, denom).expect("j! (i + j)! is nonzero")
    }

    /// Checks recurrence, generating function and closed form against each
    /// other for `1 <= i <= i_max`, `0 <= j <= j_max`, `1 <= k <= i + j + 2`,
    /// and that all of them vanish past `k = i + j`.
    pub fn cross_validate(&mut self, i_max: usize, j_max: usize) -> Certificate {
        let claim = Claim::new("method_agreement")
            .with("i_max", i_max)
            .with("j_max", j_max);
        let mut checked = 0u64;
        let mut witnesses = Vec::new();
        for i in 1..=i_max {
            for j in 0..=j_max {
                for k in 1..=i + j + 2 {
                    let idx = TripleIndex::new(i, j, k).expect("i, k >= 1");
                    checked += 1;
                    if let Some(w) = self.check_agreement(idx) {
                        witnesses.push(w);
                    }
                }
            }
        }
        Certificate::new(claim, checked, witnesses)
    }

    /// A witness if the three methods disagree at `idx` or fail to vanish
    /// past the boundary.
    pub fn check_agreement(&mut self, idx: TripleIndex) -> Option<Witness> {
        let rec = self.b_recurrence(idx);
        let gf = match self.d_genfunc(idx) {
            Ok(d) => b_from_d(idx, &d),
            Err(e) => return Some(Witness::new(idx, rec, format!("genfunc failed: {e}"))),
        };
        let closed = self.b_closed_form(idx);
        if rec != gf || rec != closed {
            return Some(Witness::new(
                idx,
                rec.clone(),
                format!("recurrence={rec} genfunc={gf} closed_form={closed}"),
            ));
        }
        if idx.past_boundary() && !rec.is_zero() {
            return Some(Witness::new(idx, rec, "nonzero past k = i + j"));
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn idx(i: usize, j: usize, k: usize) -> TripleIndex {
        TripleIndex::new(i, j, k).unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn index_domain() {
        assert!(TripleIndex::new(0, 1, 1).is_err());
        assert!(TripleIndex::new(1, 1, 0).is_err());
        assert!(TripleIndex::new(1, 0, 1).is_ok());
        assert!(idx(1, 2, 3) < idx(2, 0, 1));
    }

    #[test]
    fn recurrence_examples() {
        let mut c = Coefficients::new();
        assert_eq!(c.b_recurrence(idx(1, 1, 1)), r("1/2"));
        assert_eq!(c.b_recurrence(idx(1, 2, 1)), r("1/12"));
        assert_eq!(c.b_recurrence(idx(2, 1, 1)), r("1/3"));
        for (i, j) in [(1, 1), (2, 3), (5, 0), (4, 4)] {
            for k in i + j + 1..i + j + 4 {
                assert!(c.b_recurrence(idx(i, j, k)).is_zero(), "({i},{j},{k})");
            }
        }
    }

    #[test]
    fn recurrence_slab_grows_consistently() {
        let mut grown = Coefficients::new();
        let probes = [(3, 1, 2), (7, 4, 2), (2, 9, 2), (7, 4, 2), (10, 2, 2)];
        for (i, j, k) in probes {
            let mut fresh = Coefficients::new();
            assert_eq!(
                grown.b_recurrence(idx(i, j, k)),
                fresh.b_recurrence(idx(i, j, k))
            );
        }
    }

    #[test]
    fn recurrence_matches_restricted_form() {
        let mut c = Coefficients::new();
        for i in 1..=7 {
            for j in 1..=5 {
                for k in 1..=i + j {
                    let expected = oracle::restricted_recurrence(i, j, k).unwrap();
                    assert_eq!(c.b_recurrence(idx(i, j, k)), expected, "({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn b_d_conversion() {
        assert_eq!(d_from_b(idx(3, 0, 1), &r("5/7")), r("5/7"));
        assert_eq!(d_from_b(idx(1, 1, 1), &r("1/2")), r("-1/2"));
        assert_eq!(d_from_b(idx(1, 2, 1), &r("1/12")), r("1/6"));
        for j in 0..8 {
            let x = r("-13/11");
            assert_eq!(b_from_d(idx(2, j, 1), &d_from_b(idx(2, j, 1), &x)), x);
        }
    }

    #[test]
    fn genfunc_examples() {
        let mut c = Coefficients::new();
        for i in 1..6 {
            assert_eq!(c.d_genfunc(idx(i, 0, i)).unwrap(), Rational::one());
        }
        assert_eq!(c.d_genfunc(idx(2, 0, 1)).unwrap(), r("1/2"));
        let mut seq = SequenceCache::new();
        for j in 0..6 {
            for k in 1..=j + 1 {
                let n = j + 1 - k;
                let base = Rational::sign_power(n) * seq.bernoulli_over_factorial(n);
                let expected = d_from_b(idx(1, j, k), &base);
                assert_eq!(c.d_genfunc(idx(1, j, k)).unwrap(), expected, "(1,{j},{k})");
            }
        }
    }

    #[test]
    fn genfunc_chain_rebuilds_for_higher_orders() {
        let mut c = Coefficients::new();
        let a = c.d_genfunc(idx(6, 1, 2)).unwrap();
        let b = c.d_genfunc(idx(4, 9, 2)).unwrap();
        let again = c.d_genfunc(idx(6, 1, 2)).unwrap();
        assert_eq!(a, again);
        let mut fresh = Coefficients::new();
        assert_eq!(b, fresh.d_genfunc(idx(4, 9, 2)).unwrap());
    }

    #[test]
    fn closed_form_examples() {
        let mut c = Coefficients::new();
        assert_eq!(c.b_closed_form(idx(2, 1, 1)), r("1/3"));
        assert_eq!(c.b_closed_form(idx(2, 2, 1)), r("1/12"));
        for i in 1..=40usize {
            let expected =
                Rational::from_ratio(i as i64, 2 * (i as i64 + 2) * (i as i64 + 1)).unwrap();
            assert_eq!(c.b_closed_form(idx(i, 2, 1)), expected, "i={i}");
        }
        for i in 1..6 {
            for j in 0..6 {
                assert_eq!(c.b_closed_form(idx(i, j, i + j)), Rational::one());
            }
        }
    }

    #[test]
    fn closed_form_case_one_matches_enumeration() {
        let mut c = Coefficients::new();
        for i in 1..=5 {
            for j in 0..=5 {
                for k in i..=i + j {
                    assert_eq!(
                        c.b_closed_form(idx(i, j, k)),
                        oracle::closed_form_case_one_by_enumeration(i, j, k),
                        "({i},{j},{k})"
                    );
                }
            }
        }
    }

    #[test]
    fn three_methods_agree_small() {
        let mut c = Coefficients::new();
        let cert = c.cross_validate(5, 5);
        assert!(cert.passed(), "{:?}", cert.witnesses);
        assert_eq!(
            cert.checked_count,
            (1..=5u64)
                .map(|i| (0..=5u64).map(|j| i + j + 2).sum::<u64>())
                .sum()
        );
        assert!(Coefficients::new().cross_validate(1, 3).passed());
    }

    #[test]
    fn table_rejects_conflicts() {
        let mut t = CoeffTable::default();
        t.insert(idx(1, 1, 1), r("1/2"), Method::Recurrence)
            .unwrap();
        t.insert(idx(1, 1, 1), r("1/2"), Method::ClosedForm)
            .unwrap();
        assert_eq!(t.get(&idx(1, 1, 1)).unwrap().method, Method::Recurrence);
        let err = t
            .insert(idx(1, 1, 1), r("1/3"), Method::Genfunc)
            .unwrap_err();
        assert!(matches!(err, CoeffError::Conflict { .. }));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn engine_records_every_method() {
        let mut c = Coefficients::new();
        for m in Method::ALL {
            assert_eq!(c.b(idx(3, 2, 2), m).unwrap(), c.b_closed_form(idx(3, 2, 2)));
        }
        assert_eq!(c.table().len(), 1);
        assert_eq!(c.d(idx(1, 2, 1), Method::Recurrence).unwrap(), r("1/6"));
    }

    #[test]
    fn method_names() {
        assert_eq!("closed".parse::<Method>().unwrap(), Method::ClosedForm);
        assert_eq!("closed_form".parse::<Method>().unwrap(), Method::ClosedForm);
        assert_eq!("genfunc".parse::<Method>().unwrap(), Method::Genfunc);
        assert!("fast".parse::<Method>().is_err());
    }
}
