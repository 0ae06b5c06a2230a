//! Column subsets of `[n]` as single-word bitmasks.
//!
//! Position `i` of the mask is column `i` (0-based). A set of cardinality `k`
//! indexes the `k x k` minor on the first `k` rows of a matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension; keeps every column set inside one `u64`.
pub const MAX_N: usize = 63;

#[inline]
pub(crate) const fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of `[n]` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnSet {
    mask: u64,
    n: u8,
}

impl ColumnSet {
    pub fn new(mask: u64, n: usize) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::DimensionOutOfRange { n, min: 0, max: MAX_N });
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::MaskOutOfRange { mask, n });
        }
        Ok(Self { mask, n: n as u8 })
    }

    /// Unchecked constructor for masks produced internally.
    #[inline]
    pub(crate) fn from_raw(mask: u64, n: usize) -> Self {
        debug_assert!(n <= MAX_N && mask & !full_mask(n) == 0);
        Self { mask, n: n as u8 }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    /// `[n]` itself.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(full_mask(n), n)
    }

    /// The initial block `{0, .., k-1}`.
    pub fn prefix(k: usize, n: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Precondition(format!("prefix block of size {k} in [{n}]")));
        }
        Self::new(full_mask(k), n)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I, n: usize) -> Result<Self> {
        let mut mask = 0u64;
        for i in indices {
            if i >= n {
                return Err(Error::MaskOutOfRange { mask: 1u64 << i.min(63), n });
            }
            mask |= 1 << i;
        }
        Self::new(mask, n)
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < self.n() && self.mask >> i & 1 == 1
    }

    /// `self ∪ {i}`.
    #[inline]
    pub fn with(self, i: usize) -> Self {
        debug_assert!(i < self.n());
        Self { mask: self.mask | 1 << i, n: self.n }
    }

    /// `self ∖ {i}`.
    #[inline]
    pub fn without(self, i: usize) -> Self {
        Self { mask: self.mask & !(1 << i), n: self.n }
    }

    pub fn complement(self) -> Self {
        Self { mask: !self.mask & full_mask(self.n()), n: self.n }
    }

    pub fn union(self, other: Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { mask: self.mask | other.mask, n: self.n }
    }

    pub fn intersection(self, other: Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { mask: self.mask & other.mask, n: self.n }
    }

    pub fn difference(self, other: Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { mask: self.mask & !other.mask, n: self.n }
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.mask & other.mask == 0
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        (self.mask != 0).then(|| self.mask.trailing_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn iter(self) -> Bits {
        Bits(self.mask)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (pos, i) in self.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over the set bits of a mask, lowest first.
#[derive(Clone, Debug)]
pub struct Bits(u64);

impl Bits {
    pub fn of(mask: u64) -> Self {
        Bits(mask)
    }
}

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Bits {}

/// All masks over `n` positions with exactly `k` bits set, in increasing
/// numeric order (Gosper's hack).
#[derive(Clone, Debug)]
pub struct KSubsets {
    next: Option<u64>,
    limit: u64,
}

impl KSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        debug_assert!(n <= MAX_N);
        if k > n {
            return Self { next: None, limit: 0 };
        }
        Self { next: Some(full_mask(k)), limit: 1u64 << n }
    }
}

impl Iterator for KSubsets {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        if cur >= self.limit && cur != 0 {
            self.next = None;
            return None;
        }
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt < self.limit).then_some(nxt)
        };
        Some(cur)
    }
}

/// Binomial coefficient `C(n, k)`, exact in `u128` for every `n <= 127`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `n!` when it fits in `u128` (`n <= 34`).
pub fn factorial(n: u64) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_subsets_counts_match_binomial() {
        for n in 0..=10 {
            for k in 0..=n {
                let all: Vec<u64> = KSubsets::new(n, k).collect();
                assert_eq!(all.len() as u128, binomial(n as u64, k as u64), "n={n} k={k}");
                assert!(all.windows(2).all(|w| w[0] < w[1]));
                assert!(all.iter().all(|m| m.count_ones() as usize == k && *m < 1 << n));
            }
        }
    }

    #[test]
    fn k_subsets_beyond_n_is_empty() {
        assert_eq!(KSubsets::new(3, 4).count(), 0);
    }

    #[test]
    fn k_subsets_near_word_limit() {
        assert_eq!(KSubsets::new(63, 62).count(), 63);
        assert_eq!(KSubsets::new(63, 63).count(), 1);
    }

    #[test]
    fn column_set_rejects_stray_bits() {
        assert!(ColumnSet::new(0b1000, 3).is_err());
        assert!(ColumnSet::new(0b111, 3).is_ok());
        assert!(ColumnSet::new(0, 64).is_err());
    }

    #[test]
    fn column_set_algebra() {
        let a = ColumnSet::from_indices([0, 2, 5], 6).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.complement().to_vec(), vec![1, 3, 4]);
        assert_eq!(a.with(1).without(5).to_vec(), vec![0, 1, 2]);
        assert!(a.is_disjoint(a.complement()));
        assert_eq!(a.first(), Some(0));
        assert_eq!(a.to_string(), "{0,2,5}");
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(22, 11), 705_432);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(factorial(0), Some(1));
        assert_eq!(factorial(16), Some(20_922_789_888_000));
        assert!(factorial(34).is_some());
        assert!(factorial(35).is_none());
    }
}
