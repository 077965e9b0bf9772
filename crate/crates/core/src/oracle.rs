//! Slow reference implementations kept independent of the main paths.
//!
//! Nothing here goes through the series engine. These are used by the
//! identity checks and the test suites; most of them are exponential and
//! only meant for small arguments.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::numerics::Rational;

fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for m in 0..k {
        acc = acc * BigUint::from(n - m) / BigUint::from(m + 1);
    }
    acc
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, m| acc * BigUint::from(m))
}

/// `B_0 ..= B_n` from `sum_{m=0}^{n} C(n+1, m) B_m = 0` for `n >= 1`.
pub fn bernoulli_by_recurrence(n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for m in 1..=n {
        let mut acc = Rational::zero();
        for (idx, b) in out.iter().enumerate() {
            acc += b.scale_int(&BigInt::from(binomial(m + 1, idx)));
        }
        let next = (-acc).div_int(&BigInt::from(m + 1)).expect("m + 1 > 0");
        out.push(next);
    }
    out
}

/// Every composition of `total` into `parts` non-negative parts, in
/// lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Sum over compositions `l_1 + ... + l_k = q` of `prod 1/(l_r + 1)`.
pub fn harmonic_by_enumeration(k: usize, q: usize) -> Rational {
    compositions(q, k)
        .into_iter()
        .map(|c| {
            let denom = c
                .iter()
                .fold(BigInt::one(), |acc, &l| acc * BigInt::from(l + 1));
            Rational::new(BigInt::one(), denom).expect("positive denominator")
        })
        .sum()
}

/// `(-1)^l B_l / l!` with `B_l` from the recurrence oracle.
fn signed_bernoulli_terms(n: usize) -> Vec<Rational> {
    bernoulli_by_recurrence(n)
        .into_iter()
        .enumerate()
        .map(|(l, b)| {
            (Rational::sign_power(l) * b)
                .div_int(&BigInt::from(factorial(l)))
                .expect("l! > 0")
        })
        .collect()
}

/// The `i <= k <= i + j` closed form summed literally over compositions of
/// `i + j - k` into `i` parts. Returns zero outside that range.
pub fn closed_form_case_one_by_enumeration(i: usize, j: usize, k: usize) -> Rational {
    if k < i || k > i + j {
        return Rational::zero();
    }
    let total = i + j - k;
    let terms = signed_bernoulli_terms(total);
    compositions(total, i)
        .into_iter()
        .map(|c| c.iter().map(|&l| terms[l].clone()).product::<Rational>())
        .sum()
}

/// The restricted recurrence on `i, j >= 1`, `1 <= k <= i + j`:
/// `b(1, j, k) = (-1)^{j+1-k} B_{j+1-k} / (j+1-k)!` and, for `i >= 2`,
/// `b(i, j, k) = sum_{m=0}^{min(j, i+j-k)} (-1)^m B_m / m! * b(i-1, j+1-m, k)`.
///
/// Returns `None` outside that domain.
pub fn restricted_recurrence(i: usize, j: usize, k: usize) -> Option<Rational> {
    if i == 0 || j == 0 || k == 0 || k > i + j {
        return None;
    }
    let terms = signed_bernoulli_terms(i + j);
    let mut memo = BTreeMap::new();
    Some(restricted(&terms, &mut memo, i, j, k))
}

fn restricted(
    terms: &[Rational],
    memo: &mut BTreeMap<(usize, usize), Rational>,
    i: usize,
    j: usize,
    k: usize,
) -> Rational {
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    let value = if i == 1 {
        terms[j + 1 - k].clone()
    } else {
        let upper = j.min(i + j - k);
        (0..=upper)
            .map(|m| &terms[m] * &restricted(terms, memo, i - 1, j + 1 - m, k))
            .sum()
    };
    memo.insert((i, j), value.clone());
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
        assert!(compositions(3, 0).is_empty());
        // C(q + k - 1, k - 1)
        assert_eq!(compositions(8, 5).len(), 495);
    }

    #[test]
    fn recurrence_bernoulli_small() {
        let b = bernoulli_by_recurrence(4);
        let expect = ["1", "-1/2", "1/6", "0", "-1/30"];
        for (v, e) in b.iter().zip(expect) {
            assert_eq!(v, &e.parse::<Rational>().unwrap());
        }
    }

    #[test]
    fn enumerated_harmonic_sums() {
        assert_eq!(harmonic_by_enumeration(2, 1), Rational::one());
        assert_eq!(harmonic_by_enumeration(2, 2), "11/12".parse().unwrap());
    }

    #[test]
    fn restricted_recurrence_base_values() {
        assert_eq!(
            restricted_recurrence(1, 1, 1).unwrap(),
            "1/2".parse().unwrap()
        );
        assert_eq!(
            restricted_recurrence(1, 2, 1).unwrap(),
            "1/12".parse().unwrap()
        );
        assert_eq!(
            restricted_recurrence(2, 1, 1).unwrap(),
            "1/3".parse().unwrap()
        );
        assert!(restricted_recurrence(2, 1, 4).is_none());
    }
}
