//! Exact binomial arithmetic.
//!
//! Every count in this crate is a [`BigCount`]. Binomial coefficients follow a
//! total convention: `C(a, b) = 0` whenever `a < 0`, `b < 0` or `b > a`, so
//! sums over ranges never need per-term guards.

use std::cell::RefCell;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision nonnegative count.
///
/// Serializes as a decimal string so consumers never truncate it.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    /// Exact conversion, `None` when the value does not fit.
    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }

    /// Nearest `f64`; lossy above 2^53.
    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.0).unwrap_or(f64::INFINITY)
    }

    /// `self - other`, saturating at zero.
    pub fn saturating_sub(&self, other: &BigCount) -> BigCount {
        if self.0 >= other.0 {
            BigCount(&self.0 - &other.0)
        } else {
            BigCount::zero()
        }
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<usize> for BigCount {
    fn from(v: usize) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for BigCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a decimal count: {s:?}")));
        }
        s.parse::<BigUint>()
            .map(BigCount)
            .map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a BigCount> for BigCount {
    type Output = BigCount;
    fn add(self, rhs: &'a BigCount) -> BigCount {
        BigCount(self.0 + &rhs.0)
    }
}

impl AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        self.0 += &rhs.0;
    }
}

impl Mul for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a BigCount> for &'a BigCount {
    type Output = BigCount;
    fn mul(self, rhs: &'a BigCount) -> BigCount {
        BigCount(&self.0 * &rhs.0)
    }
}

impl Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), |acc, x| acc + x)
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rows above this index are computed on demand without being cached.
const MEMO_ROWS: usize = 2048;

/// Pascal rows built with the multiplicative recurrence
/// `C(a, j+1) = C(a, j) * (a - j) / (j + 1)`, which divides exactly.
#[derive(Debug, Default)]
pub struct BinomialTable {
    rows: Vec<Vec<BigUint>>,
}

impl BinomialTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `C(a, b)` under the zero convention.
    pub fn get(&mut self, a: i64, b: i64) -> BigCount {
        if a < 0 || b < 0 || b > a {
            return BigCount::zero();
        }
        let (a, b) = (a as usize, b as usize);
        let b = b.min(a - b);
        if a >= MEMO_ROWS {
            return BigCount(row_prefix(a, b).pop().unwrap_or_else(BigUint::one));
        }
        while self.rows.len() <= a {
            self.rows.push(Vec::new());
        }
        let row = &mut self.rows[a];
        if row.len() <= b {
            *row = row_prefix(a, a / 2);
        }
        BigCount(row[b].clone())
    }
}

/// `[C(a,0), ..., C(a,upto)]`.
fn row_prefix(a: usize, upto: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(upto + 1);
    let mut cur = BigUint::one();
    out.push(cur.clone());
    for j in 0..upto {
        cur = cur * BigUint::from(a - j) / BigUint::from(j + 1);
        out.push(cur.clone());
    }
    out
}

thread_local! {
    static TABLE: RefCell<BinomialTable> = RefCell::new(BinomialTable::new());
}

/// Binomial coefficient with the zero convention for out-of-range arguments.
///
/// Backed by a per-thread memo, so concurrent callers never contend.
pub fn binom(a: i64, b: i64) -> BigCount {
    TABLE.with(|t| t.borrow_mut().get(a, b))
}

/// `Σ_{j ≥ m} C(a, j) · C(n − a, k − j)`: the number of k-subsets of `[n]`
/// meeting the prefix `[a]` in at least `m` elements.
pub fn tail_sum(a: i64, m: i64, n: i64, k: i64) -> BigCount {
    let lo = m.max(0);
    let hi = a.min(k);
    (lo..=hi)
        .map(|j| &binom(a, j) * &binom(n - a, k - j))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: i64, b: i64) -> u64 {
        binom(a, b).to_u64().unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(c(5, 2), 10);
        assert_eq!(c(0, 0), 1);
        assert_eq!(c(3, 5), 0);
        assert_eq!(c(-1, 0), 0);
        assert_eq!(c(4, -1), 0);
        assert_eq!(c(10, 0), 1);
        assert_eq!(c(10, 10), 1);
    }

    #[test]
    fn large_row_matches_product_formula() {
        // C(100, 50) = 100891344545564193334812497256
        assert_eq!(
            binom(100, 50).to_string(),
            "100891344545564193334812497256"
        );
        // Uncached path.
        let big = binom(3000, 2);
        assert_eq!(big.to_u64(), Some(3000 * 2999 / 2));
    }

    #[test]
    fn pascal_identity_exhaustive() {
        for a in 1..=128i64 {
            for b in 1..=a {
                assert_eq!(binom(a, b), binom(a - 1, b) + binom(a - 1, b - 1), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn symmetry() {
        for a in 0..=128i64 {
            for b in 0..=a {
                assert_eq!(binom(a, b), binom(a, a - b));
            }
        }
    }

    #[test]
    fn vandermonde() {
        for n in 0..=40i64 {
            for a in 0..=n {
                for k in 0..=n {
                    let s: BigCount = (0..=k).map(|j| &binom(a, j) * &binom(n - a, k - j)).sum();
                    assert_eq!(s, binom(n, k), "n={n} a={a} k={k}");
                }
            }
        }
    }

    #[test]
    fn tail_sum_matches_hand_values() {
        assert_eq!(tail_sum(3, 2, 6, 3).to_u64(), Some(10));
        assert_eq!(tail_sum(6, 0, 6, 3).to_u64(), Some(20));
        assert_eq!(tail_sum(1, 1, 6, 2).to_u64(), Some(5));
    }

    #[test]
    fn count_serializes_as_string() {
        let v = binom(70, 35);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, format!("\"{v}\""));
        let back: BigCount = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert!("12a".parse::<BigCount>().is_err());
        assert!("-1".parse::<BigCount>().is_err());
    }
}
