//! Binomials, Stirling numbers of the second kind and the Koszul numbers.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Signed-argument binomial used by formulas that may step below zero.
pub fn binomial_i(n: i64, k: i64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    binomial(n as u64, k)
}

pub fn binomial_q(n: i64, k: i64) -> Rational {
    Rational::from(binomial_i(n, k))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

pub fn factorial_q(n: u64) -> Rational {
    Rational::from(factorial(n))
}

static STIRLING: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();

/// `{n i}` from the triangle recursion, memoised per process.
pub fn stirling2(n: usize, i: usize) -> Result<BigInt> {
    if i < 1 || i > n {
        return Err(Error::StirlingOutOfRange { n, i });
    }
    Ok(stirling2_unchecked(n, i))
}

/// Triangle lookup with the conventions `{0 0} = 1` and zero outside the triangle.
pub(crate) fn stirling2_unchecked(n: usize, i: usize) -> BigInt {
    if i > n {
        return BigInt::zero();
    }
    let table = STIRLING.get_or_init(|| Mutex::new(vec![vec![BigInt::one()]]));
    let mut rows = table.lock().unwrap_or_else(|e| e.into_inner());
    while rows.len() <= n {
        let m = rows.len();
        let prev = &rows[m - 1];
        let mut row = vec![BigInt::zero(); m + 1];
        for (k, slot) in row.iter_mut().enumerate().skip(1) {
            let left = &prev[k - 1];
            let up = prev.get(k).cloned().unwrap_or_default();
            *slot = left + up * k;
        }
        rows.push(row);
    }
    rows[n][i].clone()
}

/// `{n i} = (1/i!) sum_j (-1)^(i-j) C(i, j) j^n`; kept as an independent cross-check.
pub fn stirling2_closed_form(n: usize, i: usize) -> Result<BigInt> {
    if i < 1 || i > n {
        return Err(Error::StirlingOutOfRange { n, i });
    }
    let mut acc = BigInt::zero();
    for j in 0..=i {
        let term = binomial(i as u64, j as i64) * BigInt::from(j).pow(n as u32);
        if (i - j).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc / factorial(i as u64))
}

/// `K_1, ..., K_N`, stored 1-based through [`KoszulSequence::get`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KoszulSequence {
    values: Vec<Rational>,
}

impl KoszulSequence {
    pub fn from_values(values: Vec<Rational>) -> Self {
        KoszulSequence { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `K_n` for `1 <= n <= len`.
    pub fn get(&self, n: usize) -> &Rational {
        &self.values[n - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `n! K_n`, or `None` at the first index where it fails to be an integer.
    pub fn scaled_integers(&self) -> Option<Vec<BigInt>> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| (v * &factorial_q(k as u64 + 1)).to_integer())
            .collect()
    }

    /// First 1-based index where two sequences differ, comparing the common prefix.
    pub fn first_mismatch(&self, other: &KoszulSequence) -> Option<usize> {
        self.values
            .iter()
            .zip(&other.values)
            .position(|(a, b)| a != b)
            .map(|p| p + 1)
            .or_else(|| (self.len() != other.len()).then(|| self.len().min(other.len()) + 1))
    }
}

static KOSZUL: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();

/// `K_n = -2/((n+2)(n-1)) * sum_{i<n} {n+1 i} K_i`, seeded with `K_1 = 1`.
///
/// Results are cached; later calls only extend the cache.
pub fn koszul_numbers_recursive(n_max: usize) -> KoszulSequence {
    let cache = KOSZUL.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut ks = cache.lock().unwrap_or_else(|e| e.into_inner());
    while ks.len() < n_max {
        let n = ks.len() + 1;
        let sum: Rational = (1..n)
            .map(|i| Rational::from(stirling2_unchecked(n + 1, i)) * &ks[i - 1])
            .sum();
        let factor = Rational::new(-2, ((n + 2) * (n - 1)) as i64);
        ks.push(factor * sum);
    }
    KoszulSequence::from_values(ks[..n_max].to_vec())
}

/// `K_n` from the cached recursion.
pub fn koszul(n: usize) -> Rational {
    koszul_numbers_recursive(n).get(n).clone()
}

/// Koszul numbers as signed sums over chains `1 < n_1 < ... < n_k = n + 1`:
/// `K_n = sum_k (-1)^(k+1)/k * sum {n_2 n_1}{n_3 n_2}...{n_k n_(k-1)}`.
pub fn koszul_numbers_chain(n_max: usize) -> KoszulSequence {
    let top = n_max + 1;
    // chains[k][m]: sum over chains of length k with 2 <= n_1 and n_k = m.
    let mut chains: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); top + 1]; top + 1];
    for m in 2..=top {
        chains[1][m] = BigInt::one();
    }
    for k in 2..=top {
        for m in 2..=top {
            let mut acc = BigInt::zero();
            for j in 2..m {
                if !chains[k - 1][j].is_zero() {
                    acc += &chains[k - 1][j] * stirling2_unchecked(m, j);
                }
            }
            chains[k][m] = acc;
        }
    }
    let values = (1..=n_max)
        .map(|n| {
            (1..=n)
                .map(|k| {
                    let sign = if k % 2 == 1 { 1 } else { -1 };
                    Rational::from(chains[k][n + 1].clone()) * Rational::new(sign, k as i64)
                })
                .sum()
        })
        .collect();
    KoszulSequence::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigInt {
        s.parse().unwrap()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        for n in 0..8 {
            assert_eq!(binomial(n, 0), BigInt::one());
            assert_eq!(binomial(n, n as i64), BigInt::one());
        }
        assert_eq!(binomial(4, 7), BigInt::zero());
        assert_eq!(binomial(4, -1), BigInt::zero());
        assert_eq!(binomial(60, 30), big("118264581564861424"));
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(4, 2).unwrap(), BigInt::from(7));
        for n in 2..15usize {
            assert_eq!(stirling2(n, 2).unwrap(), BigInt::from((1u64 << (n - 1)) - 1));
            assert_eq!(
                stirling2(n, n - 1).unwrap(),
                binomial(n as u64, 2),
                "{{{n} {}}}",
                n - 1
            );
        }
        assert_eq!(stirling2(5, 4).unwrap(), BigInt::from(10));
        assert_eq!(stirling2(6, 6).unwrap(), BigInt::one());
        assert_eq!(stirling2(3, 0), Err(Error::StirlingOutOfRange { n: 3, i: 0 }));
        assert_eq!(stirling2(3, 4), Err(Error::StirlingOutOfRange { n: 3, i: 4 }));
    }

    #[test]
    fn triangle_matches_closed_form() {
        for n in 1..=20 {
            for i in 1..=n {
                assert_eq!(stirling2(n, i).unwrap(), stirling2_closed_form(n, i).unwrap());
            }
        }
    }

    #[test]
    fn koszul_recursive_values() {
        let ks = koszul_numbers_recursive(16);
        assert_eq!(ks.get(1), &Rational::one());
        assert_eq!(ks.get(5), &Rational::new(11, 12));
        let a = ks.scaled_integers().expect("n! K_n integral");
        assert_eq!(a[15], big("41404329870413936025600"));
        assert_eq!(koszul(2), Rational::new(-1, 2));
    }

    #[test]
    fn koszul_chain_values() {
        let ks = koszul_numbers_chain(12);
        assert_eq!(ks.get(1), &Rational::one());
        assert_eq!(ks.get(2), &Rational::new(-1, 2));
        assert_eq!(ks.get(12), &Rational::new(2636317, 60));
    }

    /// Chain sums enumerated over explicit subsets of {2, ..., n}.
    fn koszul_chain_brute(n: usize) -> Rational {
        let inner: Vec<usize> = (2..=n).collect();
        let mut total = Rational::zero();
        for mask in 0u32..(1 << inner.len()) {
            let mut chain: Vec<usize> = inner
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &v)| v)
                .collect();
            chain.push(n + 1);
            let k = chain.len();
            let prod = chain
                .windows(2)
                .fold(BigInt::one(), |acc, w| acc * stirling2(w[1], w[0]).unwrap());
            let sign = if k % 2 == 1 { 1 } else { -1 };
            total += Rational::from(prod) * Rational::new(sign, k as i64);
        }
        total
    }

    #[test]
    fn chain_dp_matches_subset_enumeration() {
        let ks = koszul_numbers_chain(10);
        for n in 1..=10 {
            assert_eq!(ks.get(n), &koszul_chain_brute(n), "n = {n}");
        }
    }

    #[test]
    fn routes_agree_to_sixteen() {
        let a = koszul_numbers_recursive(16);
        let b = koszul_numbers_chain(16);
        assert_eq!(a.first_mismatch(&b), None);
    }

    #[test]
    fn mismatch_reporting() {
        let a = KoszulSequence::from_values(vec![Rational::one(), Rational::zero()]);
        let b = KoszulSequence::from_values(vec![Rational::one(), Rational::one()]);
        assert_eq!(a.first_mismatch(&b), Some(2));
        assert_eq!(a.first_mismatch(&a), None);
    }
}
