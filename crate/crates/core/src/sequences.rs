//! Special-number sequences: Bernoulli, higher-order Bernoulli, higher-order
//! Daehee, Stirling numbers of the second kind, multinomials and harmonic
//! product sums.
//!
//! Main paths go through the series engine (coefficient extraction from a
//! generating function). The independent reference implementations live in
//! [`crate::oracle`].

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::numerics::Rational;
use crate::series::{gen_series, Generator, PowerSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("stirling2({j}, {p}) needs p <= j")]
    StirlingDomain { j: usize, p: usize },
    #[error("multinomial parts sum to {sum}, expected {n}")]
    MultinomialDomain { n: usize, sum: usize },
}

/// Insert-only memo of the sequences the coefficient methods revisit.
///
/// Entries are appended, never rewritten; extending a table only adds
/// coefficients past the ones already stored.
#[derive(Debug, Clone, Default)]
pub struct SequenceCache {
    /// `B_n / n!`
    bernoulli_egf: Vec<Rational>,
    bernoulli: Vec<Rational>,
    factorials: Vec<BigUint>,
    stirling2: Vec<Vec<BigUint>>,
    /// `harmonic_rows[k - 1][q]` is the harmonic product sum `H(k, q)`.
    harmonic_rows: Vec<Vec<Rational>>,
    /// Integer-scaled coefficients of `(-log(1 - s))^k`, see
    /// [`SequenceCache::harmonic_product_sum`].
    log_power_triangle: Vec<Vec<BigUint>>,
}

impl SequenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A cache whose `B_0, B_1, ...` start with `prefix` instead of the true
    /// values. Later entries are computed as usual. Only useful for checking
    /// that the identity checks notice bad input.
    pub fn with_bernoulli_prefix(prefix: &[Rational]) -> Self {
        let mut cache = Self::default();
        for (m, b) in prefix.iter().enumerate() {
            let fact = BigInt::from(cache.factorial(m));
            cache.bernoulli_egf.push(b.div_int(&fact).expect("m! > 0"));
            cache.bernoulli.push(b.clone());
        }
        cache
    }

    fn ensure_bernoulli(&mut self, n: usize) {
        if n < self.bernoulli_egf.len() {
            return;
        }
        let order = n.max(2 * self.bernoulli_egf.len());
        let fresh = gen_series(Generator::BernoulliEgf, order).into_coeffs();
        for (m, c) in fresh.into_iter().enumerate().skip(self.bernoulli_egf.len()) {
            let b = c.scale_int(&BigInt::from(self.factorial(m)));
            self.bernoulli_egf.push(c);
            self.bernoulli.push(b);
        }
    }

    /// `B_n`, read from `t / (e^t - 1)`.
    pub fn bernoulli(&mut self, n: usize) -> Rational {
        self.ensure_bernoulli(n);
        self.bernoulli[n].clone()
    }

    /// `B_n / n!`, the coefficient of `t^n` in `t / (e^t - 1)`.
    pub fn bernoulli_over_factorial(&mut self, n: usize) -> Rational {
        self.ensure_bernoulli(n);
        self.bernoulli_egf[n].clone()
    }

    /// `t / (e^t - 1)` truncated at `order`.
    pub fn bernoulli_series(&mut self, order: usize) -> PowerSeries {
        self.ensure_bernoulli(order);
        PowerSeries::from_coeffs(self.bernoulli_egf[..=order].to_vec()).expect("non-empty")
    }

    pub fn factorial(&mut self, n: usize) -> BigUint {
        if self.factorials.is_empty() {
            self.factorials.push(BigUint::one());
        }
        while self.factorials.len() <= n {
            let m = self.factorials.len();
            let next = &self.factorials[m - 1] * BigUint::from(m);
            self.factorials.push(next);
        }
        self.factorials[n].clone()
    }

    /// Triangular table `S(j, p) = p S(j-1, p) + S(j-1, p-1)`.
    pub fn stirling2(&mut self, j: usize, p: usize) -> Result<BigUint, SequenceError> {
        if p > j {
            return Err(SequenceError::StirlingDomain { j, p });
        }
        if self.stirling2.is_empty() {
            self.stirling2.push(vec![BigUint::one()]);
        }
        while self.stirling2.len() <= j {
            let prev = self.stirling2.last().expect("seeded");
            let n = prev.len();
            let mut row = vec![BigUint::zero(); n + 1];
            for (q, slot) in row.iter_mut().enumerate().skip(1) {
                let stay = if q < n {
                    &prev[q] * BigUint::from(q)
                } else {
                    BigUint::zero()
                };
                *slot = stay + &prev[q - 1];
            }
            self.stirling2.push(row);
        }
        Ok(self.stirling2[j][p].clone())
    }

    /// Harmonic product sum `H(k, q)`: the sum over compositions
    /// `l_1 + ... + l_k = q` of `1 / ((l_1 + 1) ... (l_k + 1))`, which is the
    /// coefficient of `s^q` in `(-log(1 - s) / s)^k`. `k = 0` is the empty
    /// product.
    ///
    /// With `P_k(s) = (-log(1 - s))^k = s^k (-log(1 - s) / s)^k`, differentiating
    /// gives `(1 - s) P_k' = k P_{k-1}`. On coefficients scaled by `n! / k!`
    /// that is the integer triangle `c(n, k) = c(n-1, k-1) + (n-1) c(n-1, k)`,
    /// and `H(k, q) = k! c(q + k, k) / (q + k)!`. Each entry costs one small
    /// multiply and one add, against `O(q)` rational operations for the
    /// Cauchy product ([`harmonic_by_convolution`]).
    pub fn harmonic_product_sum(&mut self, k: usize, q: usize) -> Rational {
        if k == 0 {
            return if q == 0 {
                Rational::one()
            } else {
                Rational::zero()
            };
        }
        self.ensure_harmonic(k, q);
        self.harmonic_rows[k - 1][q].clone()
    }

    /// Fills `H(k', q')` for all `k' <= k`, `q' <= q`.
    pub fn ensure_harmonic(&mut self, k: usize, q: usize) {
        if k == 0 {
            return;
        }
        self.ensure_log_power_triangle(k + q);
        self.factorial(k + q);
        while self.harmonic_rows.len() < k {
            self.harmonic_rows.push(Vec::new());
        }
        for row in 1..=k {
            let k_fact = BigInt::from(self.factorials[row].clone());
            while self.harmonic_rows[row - 1].len() <= q {
                let n = self.harmonic_rows[row - 1].len() + row;
                let numer = BigInt::from(self.log_power_triangle[n][row].clone()) * &k_fact;
                let denom = BigInt::from(self.factorials[n].clone());
                let value = Rational::new(numer, denom).expect("n! > 0");
                self.harmonic_rows[row - 1].push(value);
            }
        }
    }

    /// Unsigned Stirling number of the first kind `c(n, k)`, the integer
    /// behind [`SequenceCache::harmonic_product_sum`]. Zero for `k > n`.
    pub fn stirling1_unsigned(&mut self, n: usize, k: usize) -> BigUint {
        self.ensure_log_power_triangle(n);
        self.log_power_triangle[n]
            .get(k)
            .cloned()
            .unwrap_or_default()
    }

    /// Fills `c(n', k)` for every `n' <= n`.
    pub fn ensure_stirling1(&mut self, n: usize) {
        self.ensure_log_power_triangle(n);
    }

    /// Rows `0 ..= n` of `c(n, k) = c(n-1, k-1) + (n-1) c(n-1, k)`,
    /// `c(0, 0) = 1`: `n! / k!` times the coefficient of `s^n` in
    /// `(-log(1 - s))^k`.
    fn ensure_log_power_triangle(&mut self, n: usize) {
        if self.log_power_triangle.is_empty() {
            self.log_power_triangle.push(vec![BigUint::one()]);
        }
        while self.log_power_triangle.len() <= n {
            let prev = self.log_power_triangle.last().expect("seeded");
            let m = prev.len();
            let scale = BigUint::from(m - 1);
            let mut row = vec![BigUint::zero(); m + 1];
            for (k, slot) in row.iter_mut().enumerate().skip(1) {
                let stay = if k < m {
                    &prev[k] * &scale
                } else {
                    BigUint::zero()
                };
                *slot = stay + &prev[k - 1];
            }
            self.log_power_triangle.push(row);
        }
    }

    /// Read-only lookup of an already computed harmonic product sum.
    pub fn cached_harmonic(&self, k: usize, q: usize) -> Option<&Rational> {
        self.harmonic_rows.get(k.checked_sub(1)?)?.get(q)
    }

    /// `B_n^{(i)}`: `n!` times the coefficient of `t^n` in `(t/(e^t-1))^i`.
    pub fn higher_bernoulli(&mut self, n: usize, i: usize) -> Rational {
        let series = self.bernoulli_series(n).pow(i);
        series
            .coeff(n)
            .expect("order n")
            .scale_int(&BigInt::from(self.factorial(n)))
    }

    /// `D_q^{(k)}`: `q!` times the coefficient of `t^q` in `(log(1+t)/t)^k`.
    pub fn daehee(&mut self, q: usize, k: usize) -> Rational {
        let series = gen_series(Generator::LogOnePlusOverT, q).pow(k);
        series
            .coeff(q)
            .expect("order q")
            .scale_int(&BigInt::from(self.factorial(q)))
    }
}

/// `S(j, p)` as `j!` times the coefficient of `t^j` in `(e^t - 1)^p / p!`.
pub fn stirling2_from_egf(j: usize, p: usize) -> Result<BigUint, SequenceError> {
    if p > j {
        return Err(SequenceError::StirlingDomain { j, p });
    }
    let mut cache = SequenceCache::new();
    let power = gen_series(Generator::ExpMinusOne, j).pow(p);
    let value = power
        .coeff(j)
        .expect("order j")
        .scale_int(&BigInt::from(cache.factorial(j)))
        .div_int(&BigInt::from(cache.factorial(p)))
        .expect("p! > 0");
    Ok(value
        .to_biguint()
        .expect("Stirling numbers are natural numbers"))
}

/// `H(k, q)` as the coefficient of `s^q` in the Cauchy power
/// `(sum s^m / (m + 1))^k`.
pub fn harmonic_by_convolution(k: usize, q: usize) -> Rational {
    gen_series(Generator::NegLogOneMinusOverS, q)
        .pow(k)
        .coeff(q)
        .expect("order q")
        .clone()
}

/// `n! / (l_1! ... l_r!)`.
pub fn multinomial(n: usize, parts: &[usize]) -> Result<BigUint, SequenceError> {
    let sum: usize = parts.iter().sum();
    if sum != n {
        return Err(SequenceError::MultinomialDomain { n, sum });
    }
    // product of binomials C(l_1 + ... + l_r, l_r) keeps every step integral
    let mut acc = BigUint::one();
    let mut running = 0usize;
    for &part in parts {
        for m in 1..=part {
            running += 1;
            acc = acc * BigUint::from(running) / BigUint::from(m);
        }
    }
    Ok(acc)
}

/// Convenience wrappers over a throwaway cache.
pub fn bernoulli(n: usize) -> Rational {
    SequenceCache::new().bernoulli(n)
}

pub fn higher_bernoulli(n: usize, i: usize) -> Rational {
    SequenceCache::new().higher_bernoulli(n, i)
}

pub fn daehee(q: usize, k: usize) -> Rational {
    SequenceCache::new().daehee(q, k)
}

pub fn stirling2(j: usize, p: usize) -> Result<BigUint, SequenceError> {
    SequenceCache::new().stirling2(j, p)
}

pub fn harmonic_product_sum(k: usize, q: usize) -> Rational {
    SequenceCache::new().harmonic_product_sum(k, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_ratio(p, q).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), r(1, 1));
        assert_eq!(bernoulli(1), r(-1, 2));
        assert_eq!(bernoulli(2), r(1, 6));
        assert_eq!(bernoulli(3), r(0, 1));
        assert_eq!(bernoulli(12), r(-691, 2730));
    }

    #[test]
    fn first_kind_stirling_values() {
        let mut cache = SequenceCache::new();
        let row: Vec<u64> = (0..=5)
            .map(|k| cache.stirling1_unsigned(5, k).try_into().unwrap())
            .collect();
        assert_eq!(row, [0, 24, 50, 35, 10, 1]);
        assert_eq!(cache.stirling1_unsigned(3, 7), BigUint::zero());
        // row sums are n!
        let sum: BigUint = (0..=12).map(|k| cache.stirling1_unsigned(12, k)).sum();
        assert_eq!(sum, cache.factorial(12));
    }

    #[test]
    fn seeded_bernoulli_prefix() {
        let mut cache = SequenceCache::with_bernoulli_prefix(&[r(1, 1), r(1, 2)]);
        assert_eq!(cache.bernoulli(1), r(1, 2));
        assert_eq!(cache.bernoulli_over_factorial(1), r(1, 2));
        assert_eq!(cache.bernoulli(2), r(1, 6));
    }

    #[test]
    fn bernoulli_matches_recurrence_oracle() {
        let expected = oracle::bernoulli_by_recurrence(40);
        let mut cache = SequenceCache::new();
        for (n, b) in expected.iter().enumerate() {
            assert_eq!(&cache.bernoulli(n), b, "B_{n}");
        }
        for m in 1..=20 {
            assert!(cache.bernoulli(2 * m + 1).is_zero());
        }
    }

    #[test]
    fn higher_bernoulli_values() {
        for i in 0..5 {
            assert_eq!(higher_bernoulli(0, i), Rational::one());
        }
        assert_eq!(higher_bernoulli(1, 2), r(-1, 1));
        for n in 0..10 {
            assert_eq!(higher_bernoulli(n, 1), bernoulli(n));
        }
    }

    #[test]
    fn higher_bernoulli_cauchy_refinement() {
        let mut cache = SequenceCache::new();
        for i in 1..5 {
            for n in 0..9 {
                let lhs = cache
                    .higher_bernoulli(n, i + 1)
                    .div_int(&BigInt::from(cache.factorial(n)))
                    .unwrap();
                let mut rhs = Rational::zero();
                for a in 0..=n {
                    let left = cache
                        .higher_bernoulli(a, i)
                        .div_int(&BigInt::from(cache.factorial(a)))
                        .unwrap();
                    rhs += left * cache.bernoulli_over_factorial(n - a);
                }
                assert_eq!(lhs, rhs, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn daehee_values() {
        for k in 0..5 {
            assert_eq!(daehee(0, k), Rational::one());
        }
        assert_eq!(daehee(1, 1), r(-1, 2));
        assert_eq!(daehee(2, 1), r(2, 3));
    }

    #[test]
    fn stirling2_values() {
        let mut c = SequenceCache::new();
        let s = |c: &mut SequenceCache, j, p| c.stirling2(j, p).unwrap();
        assert_eq!(s(&mut c, 1, 1), BigUint::from(1u32));
        assert_eq!(s(&mut c, 2, 1), BigUint::from(1u32));
        assert_eq!(s(&mut c, 2, 2), BigUint::from(1u32));
        assert_eq!(s(&mut c, 1, 0), BigUint::from(0u32));
        assert_eq!(s(&mut c, 2, 0), BigUint::from(0u32));
        assert_eq!(s(&mut c, 3, 2), BigUint::from(3u32));
        assert_eq!(s(&mut c, 0, 0), BigUint::from(1u32));
        assert_eq!(s(&mut c, 10, 4), BigUint::from(34105u32));
        assert_eq!(
            c.stirling2(2, 3),
            Err(SequenceError::StirlingDomain { j: 2, p: 3 })
        );
        assert!(stirling2_from_egf(1, 2).is_err());
    }

    #[test]
    fn stirling2_two_paths_agree() {
        let mut c = SequenceCache::new();
        let mut prev_row_sum = BigUint::zero();
        for j in 0..=20 {
            let mut row_sum = BigUint::zero();
            for p in 0..=j {
                let v = c.stirling2(j, p).unwrap();
                assert_eq!(v, stirling2_from_egf(j, p).unwrap(), "S({j},{p})");
                row_sum += v;
            }
            assert!(row_sum >= prev_row_sum);
            prev_row_sum = row_sum;
        }
        // Bell number B_20
        assert_eq!(prev_row_sum, "51724158235372".parse::<BigUint>().unwrap());
    }

    #[test]
    fn harmonic_values() {
        for k in 1..6 {
            assert_eq!(harmonic_product_sum(k, 0), Rational::one());
        }
        assert_eq!(harmonic_product_sum(2, 1), r(1, 1));
        assert_eq!(harmonic_product_sum(2, 2), r(11, 12));
        for q in 0..10 {
            assert_eq!(harmonic_product_sum(1, q), r(1, q as i64 + 1));
        }
        assert_eq!(harmonic_product_sum(0, 0), Rational::one());
        assert_eq!(harmonic_product_sum(0, 3), Rational::zero());
    }

    #[test]
    fn harmonic_paths_match_enumeration() {
        let mut c = SequenceCache::new();
        for k in 1..=6 {
            for q in 0..=8 {
                let brute = oracle::harmonic_by_enumeration(k, q);
                assert_eq!(c.harmonic_product_sum(k, q), brute, "k={k} q={q}");
                assert_eq!(harmonic_by_convolution(k, q), brute, "k={k} q={q}");
            }
        }
    }

    #[test]
    fn harmonic_triangle_matches_convolution_further_out() {
        let mut c = SequenceCache::new();
        for k in [1usize, 2, 7, 15] {
            for q in [0usize, 1, 12, 25] {
                assert_eq!(
                    c.harmonic_product_sum(k, q),
                    harmonic_by_convolution(k, q),
                    "k={k} q={q}"
                );
            }
        }
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(3, &[3]).unwrap(), BigUint::from(1u32));
        assert_eq!(multinomial(2, &[1, 1]).unwrap(), BigUint::from(2u32));
        assert_eq!(multinomial(4, &[2, 1, 1]).unwrap(), BigUint::from(12u32));
        assert_eq!(multinomial(0, &[]).unwrap(), BigUint::from(1u32));
        assert_eq!(
            multinomial(4, &[2, 1]),
            Err(SequenceError::MultinomialDomain { n: 4, sum: 3 })
        );
    }

    #[test]
    fn cache_audit() {
        let mut c = SequenceCache::new();
        // grow in uneven steps so several extensions happen
        for n in [3usize, 7, 8, 30, 31, 64] {
            c.bernoulli(n);
            c.harmonic_product_sum(n / 4 + 1, n);
            c.stirling2(n / 2, 1).unwrap();
        }
        for n in 0..=64 {
            assert_eq!(c.bernoulli(n), bernoulli(n));
        }
        for k in 1..=17 {
            for q in 0..=64 {
                if let Some(v) = c.cached_harmonic(k, q) {
                    assert_eq!(v, &harmonic_product_sum(k, q), "k={k} q={q}");
                }
            }
        }
        for j in 0..=32 {
            for p in 0..=j {
                assert_eq!(c.stirling2(j, p).unwrap(), stirling2(j, p).unwrap());
            }
        }
    }
}
