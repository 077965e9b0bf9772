//! Positivity certification and the identity regression suite.
//!
//! Everything here returns a [`Certificate`] over an explicit finite range.
//! Sharded runs split the positivity range by `(i, k)` pairs; each shard
//! works on its own clone of a warmed [`Coefficients`] engine and the parts
//! are merged by index order, so the result does not depend on the number
//! of shards.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Claim, Witness};
use crate::coefficients::{CoeffError, Coefficients, Method, TripleIndex};
use crate::numerics::Rational;
use crate::oracle;
use crate::sequences::harmonic_by_convolution;
use crate::series::{gen_series, Generator, PowerSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("positivity range needs N >= 2, got {0}")]
    Range(usize),
    #[error("shard {shard} out of range for {shards} shards")]
    Shard { shard: usize, shards: usize },
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
}

/// The `(i, k)` pairs of the positivity range for `N`, in index order.
/// Pair `(i, k)` covers `j = 1` when `k <= i + 1` and always covers `j = 2`.
pub fn positivity_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 1..n {
        for k in 1..=i + 2 {
            pairs.push((i, k));
        }
    }
    pairs
}

/// Size of the positivity range: `sum_{i<N} (i + 1) + (i + 2)`.
pub fn positivity_count(n: usize) -> u64 {
    (1..n).map(|i| (2 * i + 3) as u64).sum()
}

pub fn positivity_claim(n: usize, method: Method) -> Claim {
    Claim::new("positivity")
        .with("N", n)
        .with("i_range", format!("1..={}", n.saturating_sub(1)).as_str())
        .with("j", "1,2")
        .with("k_range", "1..=i+j")
        .with("method", method.as_str())
}

/// Warms `engine` for a positivity run up to `N`. Shards cloned afterwards
/// never have to extend the shared tables.
pub fn prepare_positivity(engine: &mut Coefficients, n: usize, method: Method) {
    engine.prepare(n.saturating_sub(1), 2, method);
}

/// Checks shard `shard` of `shards`: the pairs whose position in
/// [`positivity_pairs`] is congruent to `shard`.
pub fn certify_positivity_shard(
    engine: &mut Coefficients,
    n: usize,
    method: Method,
    shard: usize,
    shards: usize,
) -> Result<Certificate, VerifyError> {
    if n < 2 {
        return Err(VerifyError::Range(n));
    }
    if shards == 0 || shard >= shards {
        return Err(VerifyError::Shard { shard, shards });
    }
    let mut checked = 0u64;
    let mut witnesses = Vec::new();
    for (pos, (i, k)) in positivity_pairs(n).into_iter().enumerate() {
        if pos % shards != shard {
            continue;
        }
        for j in 1..=2 {
            if k > i + j {
                continue;
            }
            let idx = TripleIndex::new(i, j, k).expect("i, k >= 1");
            checked += 1;
            match engine.b_untracked(idx, method) {
                Ok(v) if v.is_positive() => {}
                Ok(v) => witnesses.push(Witness::new(idx, v, "not strictly positive")),
                Err(e) => witnesses.push(Witness::new(
                    idx,
                    Rational::zero(),
                    format!("{method} failed: {e}"),
                )),
            }
        }
    }
    Ok(Certificate::new(
        positivity_claim(n, method),
        checked,
        witnesses,
    ))
}

/// `b(i, j, k) > 0` for `1 <= i < N`, `j` in `{1, 2}`, `1 <= k <= i + j`,
/// in a single task.
pub fn certify_positivity(n: usize, method: Method) -> Result<Certificate, VerifyError> {
    let mut engine = Coefficients::new();
    prepare_positivity(&mut engine, n, method);
    certify_positivity_shard(&mut engine, n, method, 0, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    /// `b = 0` for `k > i + j`, by every method.
    Vanishing,
    /// The three methods agree.
    MethodAgreement,
    /// `d(q+k, 0, k) = (-1)^q D_q^{(k)} / q!`.
    Daehee,
    /// `d(i, j, k) = (-1)^{k-i} B_{i+j-k}^{(i)} j! / (i+j-k)!`.
    HigherBernoulli,
    /// `d(q+k, 0, k)` equals the harmonic product sum by every route.
    LogSeries,
    /// `b(i, 2, 1) = i / (2 (i+2) (i+1))`.
    Endpoint,
    /// `f_k(1-e^t) - sum_{r<i-k} d(r+k, 0, k) (1-e^t)^r` has valuation `>= i-k`.
    LaurentDivisibility,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 7] = [
        IdentityKind::Vanishing,
        IdentityKind::MethodAgreement,
        IdentityKind::Daehee,
        IdentityKind::HigherBernoulli,
        IdentityKind::LogSeries,
        IdentityKind::Endpoint,
        IdentityKind::LaurentDivisibility,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityKind::Vanishing => "vanishing",
            IdentityKind::MethodAgreement => "method_agreement",
            IdentityKind::Daehee => "daehee",
            IdentityKind::HigherBernoulli => "higher_bernoulli",
            IdentityKind::LogSeries => "log_series",
            IdentityKind::Endpoint => "endpoint",
            IdentityKind::LaurentDivisibility => "laurent_divisibility",
        }
    }
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityKind {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.replace('-', "_");
        IdentityKind::ALL
            .into_iter()
            .find(|kind| kind.as_str() == norm)
            .ok_or_else(|| VerifyError::UnknownIdentity(s.into()))
    }
}

/// Inclusive upper bounds for each identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityBounds {
    /// `1 <= i <= i_max`, `0 <= j <= j_max`, `i+j < k <= i+j+extra_k`.
    pub vanishing_i_max: usize,
    pub vanishing_j_max: usize,
    pub vanishing_extra_k: usize,
    pub agreement_i_max: usize,
    pub agreement_j_max: usize,
    pub daehee_q_max: usize,
    pub daehee_k_max: usize,
    pub higher_bernoulli_i_max: usize,
    pub higher_bernoulli_j_max: usize,
    pub log_k_max: usize,
    pub log_q_max: usize,
    /// Composition enumeration is exponential; only used while
    /// `C(q + k - 1, k - 1)` stays small.
    pub log_enumeration_limit: u64,
    pub endpoint_i_max: usize,
    /// The recurrence and generating function repeat the endpoint check up
    /// to this `i`; the closed form covers the whole range.
    pub endpoint_cross_i_max: usize,
    pub laurent_k_max: usize,
    /// `k < i <= k + laurent_depth`.
    pub laurent_depth: usize,
}

impl Default for IdentityBounds {
    fn default() -> Self {
        IdentityBounds {
            vanishing_i_max: 10,
            vanishing_j_max: 10,
            vanishing_extra_k: 3,
            agreement_i_max: 10,
            agreement_j_max: 6,
            daehee_q_max: 12,
            daehee_k_max: 6,
            higher_bernoulli_i_max: 8,
            higher_bernoulli_j_max: 8,
            log_k_max: 6,
            log_q_max: 10,
            log_enumeration_limit: 100_000,
            endpoint_i_max: 200,
            endpoint_cross_i_max: 40,
            laurent_k_max: 4,
            laurent_depth: 5,
        }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, m| acc * BigInt::from(m))
}

fn idx(i: usize, j: usize, k: usize) -> TripleIndex {
    TripleIndex::new(i, j, k).expect("i, k >= 1")
}

/// Compares `expected` with `d(idx)` by every method in `methods`.
fn check_d(
    engine: &mut Coefficients,
    at: TripleIndex,
    methods: &[Method],
    expected: &Rational,
    witnesses: &mut Vec<Witness>,
) {
    for &method in methods {
        match engine.d(at, method) {
            Ok(d) if &d == expected => {}
            Ok(d) => witnesses.push(Witness::new(
                at,
                d,
                format!("{method}: expected d = {expected}"),
            )),
            Err(e) => witnesses.push(Witness::new(
                at,
                Rational::zero(),
                format!("{method} failed: {e}"),
            )),
        }
    }
}

fn check_vanishing(engine: &mut Coefficients, b: &IdentityBounds) -> Certificate {
    let claim = Claim::new(IdentityKind::Vanishing.as_str())
        .with("i_max", b.vanishing_i_max)
        .with("j_max", b.vanishing_j_max)
        .with("k_past_boundary", b.vanishing_extra_k);
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for i in 1..=b.vanishing_i_max {
        for j in 0..=b.vanishing_j_max {
            for k in i + j + 1..=i + j + b.vanishing_extra_k {
                checked += 1;
                check_d(
                    engine,
                    idx(i, j, k),
                    &Method::ALL,
                    &Rational::zero(),
                    &mut witnesses,
                );
            }
        }
    }
    Certificate::new(claim, checked, witnesses)
}

fn check_agreement(engine: &mut Coefficients, b: &IdentityBounds) -> Certificate {
    engine.cross_validate(b.agreement_i_max, b.agreement_j_max)
}

fn check_daehee(engine: &mut Coefficients, b: &IdentityBounds) -> Certificate {
    let claim = Claim::new(IdentityKind::Daehee.as_str())
        .with("q_max", b.daehee_q_max)
        .with("k_max", b.daehee_k_max);
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for k in 1..=b.daehee_k_max {
        for q in 0..=b.daehee_q_max {
            checked += 1;
            let expected = (Rational::sign_power(q) * engine.sequences().daehee(q, k))
                .div_int(&factorial(q))
                .expect("q! > 0");
            check_d(
                engine,
                idx(q + k, 0, k),
                &Method::ALL,
                &expected,
                &mut witnesses,
            );
        }
    }
    Certificate::new(claim, checked, witnesses)
}

fn check_higher_bernoulli(engine: &mut Coefficients, b: &IdentityBounds) -> Certificate {
    let claim = Claim::new(IdentityKind::HigherBernoulli.as_str())
        .with("i_max", b.higher_bernoulli_i_max)
        .with("j_max", b.higher_bernoulli_j_max);
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for i in 1..=b.higher_bernoulli_i_max {
        for j in 0..=b.higher_bernoulli_j_max {
            for k in i..=i + j {
                checked += 1;
                let n = i + j - k;
                let expected = (Rational::sign_power(k - i)
                    * engine.sequences().higher_bernoulli(n, i))
                .scale_int(&factorial(j))
                .div_int(&factorial(n))
                .expect("n! > 0");
                check_d(
                    engine,
                    idx(i, j, k),
                    &Method::ALL,
                    &expected,
                    &mut witnesses,
                );
            }
        }
    }
    Certificate::new(claim, checked, witnesses)
}

fn composition_count(q: usize, k: usize) -> u64 {
    // C(q + k - 1, k - 1), saturating
    let mut acc: u64 = 1;
    for m in 0..k.saturating_sub(1) {
        acc = acc.saturating_mul((q + 1 + m) as u64) / (m as u64 + 1);
    }
    acc
}

fn check_log_series(engine: &mut Coefficients, b: &IdentityBounds) -> Certificate {
    let claim = Claim::new(IdentityKind::LogSeries.as_str())
        .with("k_max", b.log_k_max)
        .with("q_max", b.log_q_max)
        .with("enumeration_limit", b.log_enumeration_limit as usize);
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for k in 1..=b.log_k_max {
        for q in 0..=b.log_q_max {
            checked += 1;
            let at = idx(q + k, 0, k);
            let table = engine.sequences().harmonic_product_sum(k, q);
            let convolution = harmonic_by_convolution(k, q);
            if table != convolution {
                witnesses.push(Witness::new(
                    at,
                    table.clone(),
                    format!("triangle={table} convolution={convolution}"),
                ));
            }
            if composition_count(q, k) <= b.log_enumeration_limit {
                let enumerated = oracle::harmonic_by_enumeration(k, q);
                if enumerated != convolution {
                    witnesses.push(Witness::new(
                        at,
                        enumerated.clone(),
                        format!("enumeration={enumerated} convolution={convolution}"),
                    ));
                }
            }
            check_d(engine, at, &Method::ALL, &convolution, &mut witnesses);
        }
    }
    Certificate::new(claim, checked, witnesses)
}

fn check_endpoint(engine: &mut Coefficients, b: &IdentityBounds) -> Certificate {
    let claim = Claim::new(IdentityKind::Endpoint.as_str())
        .with("i_max", b.endpoint_i_max)
        .with("cross_check_i_max", b.endpoint_cross_i_max);
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for i in 1..=b.endpoint_i_max {
        checked += 1;
        let at = idx(i, 2, 1);
        let expected =
            Rational::new(BigInt::from(i), BigInt::from(2 * (i + 2) * (i + 1))).expect("positive");
        let methods: &[Method] = if i <= b.endpoint_cross_i_max {
            &Method::ALL
        } else {
            &[Method::ClosedForm]
        };
        for &method in methods {
            match engine.b(at, method) {
                Ok(v) if v == expected => {}
                Ok(v) => witnesses.push(Witness::new(
                    at,
                    v,
                    format!("{method}: expected b = {expected}"),
                )),
                Err(e) => witnesses.push(Witness::new(
                    at,
                    Rational::zero(),
                    format!("{method} failed: {e}"),
                )),
            }
        }
    }
    Certificate::new(claim, checked, witnesses)
}

/// `f_k(s) = (-log(1-s)/s)^k` at `s = 1 - e^t` minus the first `i - k`
/// terms of its expansion in powers of `1 - e^t`, to `order`.
pub fn laurent_remainder(
    engine: &mut Coefficients,
    k: usize,
    i: usize,
    order: usize,
    method: Method,
) -> Result<PowerSeries, CoeffError> {
    let s = gen_series(Generator::OneMinusExp, order);
    let f = gen_series(Generator::NegLogOneMinusOverS, order).pow(k);
    let mut rem = f.compose(&s)?;
    let mut s_power = PowerSeries::one(order);
    for r in 0..i - k {
        let d = engine.d(idx(r + k, 0, k), method)?;
        rem = rem.sub(&s_power.scale(&d));
        s_power = s_power.mul(&s);
    }
    Ok(rem)
}

fn check_laurent(engine: &mut Coefficients, b: &IdentityBounds) -> Certificate {
    let claim = Claim::new(IdentityKind::LaurentDivisibility.as_str())
        .with("k_max", b.laurent_k_max)
        .with("depth", b.laurent_depth);
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for k in 1..=b.laurent_k_max {
        for i in k + 1..=k + b.laurent_depth {
            checked += 1;
            let at = idx(i, 0, k);
            let need = i - k;
            // two coefficients past the required valuation so a zero remainder is not vacuous
            match laurent_remainder(engine, k, i, need + 2, Method::Genfunc) {
                Ok(rem) => match rem.valuation() {
                    Some(v) if v < need => witnesses.push(Witness::new(
                        at,
                        rem.coeff(v).expect("v <= order").clone(),
                        format!("valuation {v} < {need}"),
                    )),
                    _ => {}
                },
                Err(e) => witnesses.push(Witness::new(
                    at,
                    Rational::zero(),
                    format!("genfunc failed: {e}"),
                )),
            }
        }
    }
    Certificate::new(claim, checked, witnesses)
}

/// One certificate per identity in `kinds`, in the order given.
pub fn verify_identities_with(
    engine: &mut Coefficients,
    bounds: &IdentityBounds,
    kinds: &[IdentityKind],
) -> Vec<Certificate> {
    kinds
        .iter()
        .map(|kind| match kind {
            IdentityKind::Vanishing => check_vanishing(engine, bounds),
            IdentityKind::MethodAgreement => check_agreement(engine, bounds),
            IdentityKind::Daehee => check_daehee(engine, bounds),
            IdentityKind::HigherBernoulli => check_higher_bernoulli(engine, bounds),
            IdentityKind::LogSeries => check_log_series(engine, bounds),
            IdentityKind::Endpoint => check_endpoint(engine, bounds),
            IdentityKind::LaurentDivisibility => check_laurent(engine, bounds),
        })
        .collect()
}

/// Every identity over `bounds` with a fresh engine.
pub fn verify_identities(bounds: &IdentityBounds) -> Vec<Certificate> {
    verify_identities_with(&mut Coefficients::new(), bounds, &IdentityKind::ALL)
}

/// Combines per-identity certificates into one.
pub fn aggregate_identities(parts: &[Certificate]) -> Certificate {
    let mut claim = Claim::new("identities");
    for part in parts {
        claim = claim.with(&part.claim.property, part.checked_count as usize);
    }
    Certificate::aggregate(claim, parts)
}

/// Sign counts of `b(i, j, k)` for one `j`, over `1 <= i <= i_max`,
/// `1 <= k <= i + j`. Exploratory only; nothing is claimed for `j >= 3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignRow {
    pub j: usize,
    pub positive: u64,
    pub zero: u64,
    pub negative: u64,
    pub first_nonpositive: Option<(usize, usize)>,
}

pub fn sign_survey(
    engine: &mut Coefficients,
    i_max: usize,
    js: core::ops::RangeInclusive<usize>,
    method: Method,
) -> Result<Vec<SignRow>, CoeffError> {
    let mut rows = Vec::new();
    for j in js {
        let mut row = SignRow {
            j,
            positive: 0,
            zero: 0,
            negative: 0,
            first_nonpositive: None,
        };
        for i in 1..=i_max {
            for k in 1..=i + j {
                let v = engine.b_untracked(idx(i, j, k), method)?;
                if v.is_positive() {
                    row.positive += 1;
                    continue;
                }
                if v.is_zero() {
                    row.zero += 1;
                } else {
                    row.negative += 1;
                }
                row.first_nonpositive.get_or_insert((i, k));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
