//! The lattice of leading minors and heavy-minor statistics.
//!
//! For a row prefix `M_k` the table stores `Per(M_A)` for every column set `A`
//! with `|A| <= k`, where `M_A` is the `|A| x |A|` minor on the first `|A|`
//! rows. Level `j + 1` is derived from level `j` and row `j + 1` by the
//! cofactor expansion
//!
//! ```text
//! Per(M_A) = sum_{i in A} a_{|A|, i} * Per(M_{A \ {i}})
//! ```
//!
//! so exposing a row costs one pass over the subsets of the new level.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engines::ExactInt;
use crate::error::{Error, Result};
use crate::matrix::RowPrefix;
use crate::subset::{Bits, ColumnSet, KSubsets, MAX_N};

/// Default cap on `n` for a lattice: 2^22 entries of 16 bytes (~67 MB).
pub const DEFAULT_LATTICE_CAP: usize = 22;
/// Largest `n` for the CSV dump.
pub const DUMP_MAX_N: usize = 12;

/// A heaviness threshold `λ >= 0`.
///
/// Permanents are integers, so `|Per| >= λ` holds exactly when
/// `|Per| >= ceil(λ)`; the threshold is stored in that integer form. Ties count
/// as heavy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Threshold(u128);

impl Threshold {
    pub const ZERO: Threshold = Threshold(0);
    pub const ONE: Threshold = Threshold(1);

    pub fn from_int(v: u128) -> Self {
        Threshold(v)
    }

    /// `ceil(λ)` for a real `λ`; values past `u128::MAX` saturate (nothing is
    /// that heavy anyway).
    pub fn from_real(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!("threshold must be a nonnegative number, got {lambda}")));
        }
        let c = lambda.ceil();
        Ok(if c >= u128::MAX as f64 { Threshold(u128::MAX) } else { Threshold(c as u128) })
    }

    /// `ceil(num / den)`, exact.
    pub fn from_ratio(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidConfig("threshold ratio with zero denominator".into()));
        }
        Ok(Threshold(num.div_ceil(den)))
    }

    /// `ceil(self / d)`; equals `ceil(λ / d)` for the original real `λ`.
    pub fn divided_by(self, d: u128) -> Self {
        Threshold(self.0.div_ceil(d.max(1)))
    }

    #[inline]
    pub fn value(self) -> u128 {
        self.0
    }

    #[inline]
    pub fn admits(self, per: ExactInt) -> bool {
        per.unsigned_abs() >= self.0
    }
}

/// Exact permanents of all leading minors up to level `k_max`.
#[derive(Clone, Debug)]
pub struct MinorTable {
    n: usize,
    k_max: usize,
    rows: Vec<i8>,
    values: Vec<ExactInt>,
}

impl MinorTable {
    /// Empty table (only `value(∅) = 1`) for an `n`-column matrix.
    pub fn new(n: usize, cap: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_N });
        }
        if n > cap {
            return Err(Error::TooLarge { what: "minor lattice", n, cap });
        }
        let size = 1usize
            .checked_shl(n as u32)
            .ok_or(Error::TooLarge { what: "minor lattice", n, cap })?;
        let mut values = Vec::new();
        values
            .try_reserve_exact(size)
            .map_err(|_| Error::TooLarge { what: "minor lattice (allocation failed)", n, cap })?;
        values.resize(size, 0);
        values[0] = 1;
        Ok(Self { n, k_max: 0, rows: Vec::with_capacity(n * n), values })
    }

    /// Table through level `k_max` of the prefix.
    pub fn build(prefix: &RowPrefix, k_max: usize, cap: usize) -> Result<Self> {
        if k_max > prefix.k() {
            return Err(Error::LevelNotBuilt { k: k_max, k_max: prefix.k() });
        }
        let mut t = Self::new(prefix.n(), cap)?;
        for i in 0..k_max {
            t.push_row(prefix.row(i))?;
        }
        Ok(t)
    }

    /// Exposes the next row and fills level `k_max + 1`.
    pub fn push_row(&mut self, row: &[i8]) -> Result<()> {
        let n = self.n;
        if self.k_max == n {
            return Err(Error::PrefixFull(n));
        }
        if row.len() != n {
            return Err(Error::RowLength { expected: n, got: row.len() });
        }
        if let Some(&bad) = row.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::NotASign(bad as i64));
        }
        let level = self.k_max + 1;
        // Permanents of k x k sign minors are bounded by k!, which fits i128
        // for k <= 33; past that every step is checked.
        let checked = level > 33;
        for mask in KSubsets::new(n, level) {
            let mut acc: ExactInt = 0;
            for i in Bits::of(mask) {
                let parent = self.values[(mask & !(1 << i)) as usize];
                if checked {
                    acc = acc.checked_add(row[i] as ExactInt * parent).ok_or(Error::Overflow("minor lattice"))?;
                } else if row[i] > 0 {
                    acc += parent;
                } else {
                    acc -= parent;
                }
            }
            self.values[mask as usize] = acc;
        }
        self.rows.extend_from_slice(row);
        self.k_max = level;
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest completed level (= number of exposed rows).
    #[inline]
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Row `i` (0-based) of the exposed prefix.
    pub fn row(&self, i: usize) -> &[i8] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    pub fn prefix(&self) -> RowPrefix {
        let mut p = RowPrefix::empty(self.n).expect("table dimension already validated");
        for i in 0..self.k_max {
            p.push_row(self.row(i)).expect("table rows are valid signs");
        }
        p
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k > self.k_max {
            Err(Error::LevelNotBuilt { k, k_max: self.k_max })
        } else {
            Ok(())
        }
    }

    /// `Per(M_A)`.
    pub fn value(&self, a: ColumnSet) -> Result<ExactInt> {
        if a.n() != self.n {
            return Err(Error::Precondition(format!("column set over [{}] used with n = {}", a.n(), self.n)));
        }
        self.check_level(a.len())?;
        Ok(self.values[a.mask() as usize])
    }

    /// Unchecked lookup by mask; the level must be built.
    #[inline]
    pub fn value_by_mask(&self, mask: u64) -> ExactInt {
        debug_assert!(mask.count_ones() as usize <= self.k_max);
        self.values[mask as usize]
    }

    /// `(A, Per(M_A))` for all `A` at level `k`, in increasing mask order.
    pub fn level(&self, k: usize) -> Result<impl Iterator<Item = (ColumnSet, ExactInt)> + '_> {
        self.check_level(k)?;
        let n = self.n;
        Ok(KSubsets::new(n, k).map(move |m| (ColumnSet::from_raw(m, n), self.values[m as usize])))
    }

    /// Number of `λ`-heavy sets at level `k`.
    pub fn heavy_count(&self, k: usize, lambda: Threshold) -> Result<u64> {
        self.check_level(k)?;
        Ok(KSubsets::new(self.n, k).filter(|&m| lambda.admits(self.values[m as usize])).count() as u64)
    }

    /// Re-derives one entry from its parents; used by consistency checks.
    pub fn cofactor_expansion(&self, a: ColumnSet) -> Result<ExactInt> {
        let k = a.len();
        if k == 0 {
            return Ok(1);
        }
        self.check_level(k)?;
        let row = self.row(k - 1);
        Ok(a.iter().map(|i| row[i] as ExactInt * self.values[a.without(i).mask() as usize]).sum())
    }

    /// CSV rows `mask,level,value` in build order (level, then mask).
    pub fn dump_csv(&self) -> Result<String> {
        if self.n > DUMP_MAX_N {
            return Err(Error::TooLarge { what: "lattice dump", n: self.n, cap: DUMP_MAX_N });
        }
        let mut out = String::from("mask,level,value\n");
        for k in 0..=self.k_max {
            for m in KSubsets::new(self.n, k) {
                writeln!(out, "{m},{k},{}", self.values[m as usize]).expect("writing to a String");
            }
        }
        Ok(out)
    }
}

/// Builds the lattice of `p` through level `k_max` with the default size cap.
pub fn build_lattice(p: &RowPrefix, k_max: usize) -> Result<MinorTable> {
    MinorTable::build(p, k_max, DEFAULT_LATTICE_CAP)
}

/// A family of distinct `λ`-heavy column sets at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeavyFamily {
    pub k: usize,
    pub lambda: Threshold,
    pub members: Vec<ColumnSet>,
}

impl HeavyFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The first `count` members (increasing mask order).
    pub fn truncated(&self, count: usize) -> HeavyFamily {
        HeavyFamily { k: self.k, lambda: self.lambda, members: self.members.iter().copied().take(count).collect() }
    }
}

/// Every `λ`-heavy set at level `k`, in increasing mask order.
pub fn heavy_members(t: &MinorTable, k: usize, lambda: Threshold) -> Result<HeavyFamily> {
    let members = t.level(k)?.filter(|&(_, v)| lambda.admits(v)).map(|(a, _)| a).collect();
    Ok(HeavyFamily { k, lambda, members })
}

/// `F_l`: the number of level-`k + 1` sets with exactly `l` parents in a
/// level-`k` family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentHistogram {
    pub n: usize,
    /// Level of the parents; children live at `parent_level + 1`.
    pub parent_level: usize,
    pub family_size: usize,
    /// `counts[l] = F_l` for `l = 1..=n`; `counts[0]` is always zero.
    pub counts: Vec<u64>,
}

impl ParentHistogram {
    pub fn f(&self, l: usize) -> u64 {
        self.counts.get(l).copied().unwrap_or(0)
    }

    /// `sum_l l * F_l`, the number of (parent, child) incidences.
    pub fn incidences(&self) -> u64 {
        self.counts.iter().enumerate().map(|(l, &f)| l as u64 * f).sum()
    }

    /// Number of children with at least one parent in the family.
    pub fn children(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn parent_histogram(t: &MinorTable, family: &HeavyFamily) -> Result<ParentHistogram> {
    let n = t.n();
    let k = family.k;
    if k >= n {
        return Err(Error::LevelNotBuilt { k: k + 1, k_max: n });
    }
    t.check_level(k)?;
    let mut children: Vec<u64> = Vec::with_capacity(family.len() * (n - k));
    for a in &family.members {
        if a.len() != k || a.n() != n {
            return Err(Error::Precondition(format!("family member {a} is not a {k}-subset of [{n}]")));
        }
        children.extend(a.complement().iter().map(|i| a.mask() | 1 << i));
    }
    children.sort_unstable();
    let mut counts = vec![0u64; n + 1];
    for run in children.chunk_by(|x, y| x == y) {
        counts[run.len()] += 1;
    }
    Ok(ParentHistogram { n, parent_level: k, family_size: family.len(), counts })
}

/// Which side of the growth dichotomy holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Split {
    /// Many children with few (`<= K`) parents: `F_1 + .. + F_K >= εnN / 2K`.
    Prime,
    /// The low-multiplicity bound fails; many children have `> K` parents.
    DoublePrime,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitOutcome {
    pub split: Split,
    /// `K = max(1, floor((ε/8) n^(1-c)))`.
    pub k_threshold: usize,
    /// `F_1 + .. + F_K`.
    pub low_mass: u64,
    /// `F_{K+1} + .. + F_n`.
    pub high_mass: u64,
    /// Whether `F_{K+1} + .. + F_n >= εN / 2`; guaranteed whenever the
    /// low-mass bound fails and every member has at least `εn` children.
    pub high_bound_holds: bool,
}

/// `K = max(1, floor((ε/8) n^(1-c)))`. The unclamped value is 0 for every
/// practical `(ε, c)` at `n <= 22`; the dichotomy argument only needs `K >= 1`.
pub fn multiplicity_threshold(n: usize, eps: f64, c: f64) -> usize {
    let raw = (eps / 8.0 * (n as f64).powf(1.0 - c)).floor();
    (raw as usize).max(1)
}

pub fn split_events(h: &ParentHistogram, eps: f64, c: f64, family_size: usize) -> Result<SplitOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!("ε must lie in (0, 1), got {eps}")));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidConfig(format!("c must lie in (0, 1), got {c}")));
    }
    if family_size == 0 {
        return Err(Error::Precondition("split of an empty family".into()));
    }
    let n = h.n;
    let k_threshold = multiplicity_threshold(n, eps, c);
    let cut = k_threshold.min(n);
    let low_mass: u64 = (1..=cut).map(|l| h.f(l)).sum();
    let high_mass: u64 = (cut + 1..=n).map(|l| h.f(l)).sum();
    let nn = family_size as f64;
    let low_holds = low_mass as f64 * 2.0 * k_threshold as f64 >= eps * n as f64 * nn;
    let high_bound_holds = high_mass as f64 * 2.0 >= eps * nn;
    let split = if low_holds { Split::Prime } else { Split::DoublePrime };
    Ok(SplitOutcome { split, k_threshold, low_mass, high_mass, high_bound_holds })
}
