//! Carrying heaviness from level `k` to the full matrix.
//!
//! A path walk extends a heavy `[k]` one column at a time, preferring heavy
//! extensions outside a protected block `B`, then heavy ones inside it, then the
//! smallest unused column. Disjoint blocks give heavy sets of order `n - L`
//! with disjoint complements; those are pushed down one row at a time, losing
//! a factor `n` in the threshold each time, and the last row is expanded to
//! read off the full permanent.

use serde::{Deserialize, Serialize};

use crate::engines::ExactInt;
use crate::error::{Error, Result};
use crate::growth::RowSource;
use crate::lattice::{MinorTable, Threshold, DEFAULT_LATTICE_CAP};
use crate::matrix::SignMatrix;
use crate::subset::{ColumnSet, KSubsets};

/// Exposes rows from `source` until `table` holds level `level`.
pub fn expose_to(table: &mut MinorTable, source: &mut dyn RowSource, level: usize) -> Result<()> {
    if level > table.n() {
        return Err(Error::NoNextRow(table.n()));
    }
    while table.k_max() < level {
        table.push_row(&source.next_row()?)?;
    }
    Ok(())
}

/// Column order that moves the first `λ`-heavy `k`-set (mask order) of the
/// first `k` rows onto `[k]`, for use with [`SignMatrix::permute_cols`].
pub fn heavy_start_permutation(m: &SignMatrix, k: usize, lambda: Threshold) -> Result<Option<Vec<usize>>> {
    let n = m.n();
    if k > n {
        return Err(Error::Precondition(format!("start level {k} exceeds n = {n}")));
    }
    let mut table = MinorTable::new(n, DEFAULT_LATTICE_CAP)?;
    for i in 0..k {
        table.push_row(m.row(i))?;
    }
    let Some(mask) = KSubsets::new(n, k).find(|&mask| lambda.admits(table.value_by_mask(mask))) else {
        return Ok(None);
    };
    let start = ColumnSet::new(mask, n)?;
    let mut perm = start.to_vec();
    perm.extend(start.complement().iter());
    Ok(Some(perm))
}

/// Which rule picked the column at a path step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathRule {
    /// Heavy extension outside `B`.
    Outside,
    /// Heavy extension inside `B`.
    Block,
    /// No heavy extension; smallest unused column.
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    /// Level before the step.
    pub j: usize,
    pub column: usize,
    pub rule: PathRule,
    /// `W_{j+1} = |[n] \ (B ∪ A_{j+1})|`.
    pub w: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgamePath {
    pub k: usize,
    pub block: ColumnSet,
    /// `W_k = n - k - 2L`.
    pub w_start: usize,
    pub steps: Vec<PathStep>,
    /// `A_{n-L}`, whether or not it is heavy.
    pub end: ColumnSet,
    pub end_value: ExactInt,
    /// `A_{n-L}` when it is `λ`-heavy and contains `[n] \ B`.
    pub result: Option<ColumnSet>,
}

impl EndgamePath {
    /// `W_k, W_{k+1}, .., W_{n-L}`.
    pub fn potentials(&self) -> Vec<usize> {
        std::iter::once(self.w_start).chain(self.steps.iter().map(|s| s.w)).collect()
    }
}

/// Walks from `[k]` to a set of order `n - l` with protected block `b`.
/// Rows `k + 1 ..= n - l` are exposed from `source` as needed.
pub fn run_endgame_path(
    table: &mut MinorTable,
    source: &mut dyn RowSource,
    k: usize,
    b: ColumnSet,
    lambda: Threshold,
    l: usize,
) -> Result<EndgamePath> {
    let n = table.n();
    let start = ColumnSet::prefix(k, n)?;
    if b.n() != n || b.len() != 2 * l || !b.is_disjoint(start) {
        return Err(Error::Precondition(format!("block {b} must be a {}-subset of [n] \\ [k]", 2 * l)));
    }
    if l == 0 || k + l > n {
        return Err(Error::Precondition(format!("need L >= 1 and k + L <= n (k = {k}, L = {l}, n = {n})")));
    }
    expose_to(table, source, k)?;
    if !lambda.admits(table.value(start)?) {
        return Err(Error::Precondition(format!("[{k}] is not heavy")));
    }

    let top = n - l;
    let outside = b.complement();
    let mut a = start;
    let mut steps = Vec::with_capacity(top.saturating_sub(k));
    for j in k..top {
        expose_to(table, source, j + 1)?;
        let heavy = |i: usize| lambda.admits(table.value_by_mask(a.with(i).mask()));
        let free = a.complement();
        let (column, rule) = if let Some(i) = free.intersection(outside).iter().find(|&i| heavy(i)) {
            (i, PathRule::Outside)
        } else if let Some(i) = free.intersection(b).iter().find(|&i| heavy(i)) {
            (i, PathRule::Block)
        } else {
            (free.first().expect("j < n leaves a free column"), PathRule::Fallback)
        };
        a = a.with(column);
        steps.push(PathStep { j, column, rule, w: outside.difference(a).len() });
    }
    let end_value = table.value(a)?;
    let covers = outside.is_subset(a);
    let result = (covers && lambda.admits(end_value)).then_some(a);
    Ok(EndgamePath { k, block: b, w_start: outside.difference(start).len(), steps, end: a, end_value, result })
}

/// Blocks `B_i = {k + 2L(i-1), .., k + 2Li - 1}` for `i = 1..=count`.
pub fn endgame_blocks(n: usize, k: usize, count: usize, l: usize) -> Result<Vec<ColumnSet>> {
    if count * 2 * l > n.saturating_sub(k) {
        return Err(Error::Precondition(format!("{count} blocks of size {} do not fit in [n] \\ [k]", 2 * l)));
    }
    (0..count).map(|i| ColumnSet::from_indices(k + 2 * l * i..k + 2 * l * (i + 1), n)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointFamily {
    pub paths: Vec<EndgamePath>,
    /// Heavy sets of order `n - L` found, one per successful block.
    pub members: Vec<ColumnSet>,
}

impl DisjointFamily {
    /// Every block produced a member.
    pub fn complete(&self) -> bool {
        self.members.len() == self.paths.len()
    }
}

/// Complements are pairwise disjoint.
pub fn complements_disjoint(family: &[ColumnSet]) -> bool {
    let mut seen = 0u64;
    for a in family {
        let c = a.complement().mask();
        if seen & c != 0 {
            return false;
        }
        seen |= c;
    }
    true
}

/// Runs one path per disjoint block on the same rows and collects the heavy
/// endpoints. Both heaviness and complement-disjointness are re-checked.
pub fn find_disjoint_heavy_family(
    table: &mut MinorTable,
    source: &mut dyn RowSource,
    k: usize,
    lambda: Threshold,
    count: usize,
    l: usize,
) -> Result<DisjointFamily> {
    let blocks = endgame_blocks(table.n(), k, count, l)?;
    let mut paths = Vec::with_capacity(count);
    for b in blocks {
        paths.push(run_endgame_path(table, source, k, b, lambda, l)?);
    }
    let members: Vec<ColumnSet> = paths.iter().filter_map(|p| p.result).collect();
    for &a in &members {
        if !lambda.admits(table.value(a)?) {
            return Err(Error::Precondition(format!("family member {a} is not heavy")));
        }
    }
    if !complements_disjoint(&members) {
        return Err(Error::Precondition("family complements overlap".into()));
    }
    Ok(DisjointFamily { paths, members })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    /// Child `A_i ∪ {h_i}` of each input member, `h_i` the smallest missing column.
    pub children: Vec<ColumnSet>,
    /// Children that are heavy at the reduced threshold.
    pub heavy: Vec<ColumnSet>,
    /// Reduced threshold `λ' / n`.
    pub threshold: Threshold,
    /// Children with at least `T` parents heavy at the reduced threshold.
    pub good: usize,
}

/// Pushes a complement-disjoint family at level `m` up to level `m + 1`,
/// exposing row `m + 1`.
pub fn propagate_down(
    table: &mut MinorTable,
    source: &mut dyn RowSource,
    family: &[ColumnSet],
    lambda: Threshold,
    t_good: usize,
) -> Result<Propagation> {
    let n = table.n() as u128;
    let threshold = lambda.divided_by(n);
    let Some(first) = family.first() else {
        return Ok(Propagation { children: vec![], heavy: vec![], threshold, good: 0 });
    };
    let m = first.len();
    if family.iter().any(|a| a.len() != m || a.n() != table.n()) {
        return Err(Error::Precondition("family members must share one level".into()));
    }
    if !complements_disjoint(family) {
        return Err(Error::Precondition("family complements overlap".into()));
    }
    expose_to(table, source, m + 1)?;
    let children: Vec<ColumnSet> =
        family.iter().map(|a| a.with(a.complement().first().expect("m < n leaves a free column"))).collect();
    if !complements_disjoint(&children) {
        return Err(Error::Precondition("child complements overlap".into()));
    }
    let heavy: Vec<ColumnSet> =
        children.iter().copied().filter(|&c| threshold.admits(table.value_by_mask(c.mask()))).collect();
    let good = children
        .iter()
        .filter(|c| c.iter().filter(|&h| threshold.admits(table.value_by_mask(c.without(h).mask()))).count() >= t_good)
        .count();
    Ok(Propagation { children, heavy, threshold, good })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalRow {
    pub per: ExactInt,
    pub heavy: bool,
    /// Family members (order `n - 1`) that are parents with nonzero permanent.
    pub nonzero_parents: usize,
}

/// Exposes the last row and expands `Per(M_n)` over level `n - 1`.
pub fn final_row_heaviness(
    table: &mut MinorTable,
    source: &mut dyn RowSource,
    family: &[ColumnSet],
    lambda_final: Threshold,
) -> Result<FinalRow> {
    let n = table.n();
    if family.iter().any(|a| a.len() + 1 != n) {
        return Err(Error::Precondition("final-row family must sit at level n - 1".into()));
    }
    expose_to(table, source, n)?;
    let full = ColumnSet::full(n)?;
    let per = table.cofactor_expansion(full)?;
    debug_assert_eq!(per, table.value(full)?);
    let nonzero_parents = family.iter().filter(|a| table.value_by_mask(a.mask()) != 0).count();
    Ok(FinalRow { per, heavy: lambda_final.admits(per), nonzero_parents })
}

/// Summary of a whole endgame run from a heavy `[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameRun {
    pub family: DisjointFamily,
    /// Sizes of the heavy families at levels `n - L, .., n - 1`.
    pub family_sizes: Vec<usize>,
    pub propagations: Vec<Propagation>,
    pub final_row: FinalRow,
    /// `λ / n^(L-1)`, the threshold reached at level `n - 1`.
    pub final_threshold: Threshold,
}

/// Disjoint family at level `n - L`, `L - 1` propagation steps, final row.
pub fn run_endgame(
    table: &mut MinorTable,
    source: &mut dyn RowSource,
    k: usize,
    lambda: Threshold,
    count: usize,
    l: usize,
    t_good: usize,
) -> Result<EndgameRun> {
    let family = find_disjoint_heavy_family(table, source, k, lambda, count, l)?;
    let mut current = family.members.clone();
    let mut family_sizes = vec![current.len()];
    let mut thr = lambda;
    let mut propagations = Vec::with_capacity(l.saturating_sub(1));
    for _ in 1..l {
        let p = propagate_down(table, source, &current, thr, t_good)?;
        thr = p.threshold;
        current = p.heavy.clone();
        family_sizes.push(current.len());
        propagations.push(p);
    }
    let final_row = final_row_heaviness(table, source, &current, thr.divided_by(table.n() as u128))?;
    Ok(EndgameRun { family, family_sizes, propagations, final_row, final_threshold: thr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::permanent_ryser;
    use crate::growth::MatrixRows;
    use crate::matrix::sample_sign_matrix;
    use crate::rng::RngStream;

    fn fresh(n: usize) -> MinorTable {
        MinorTable::new(n, 22).unwrap()
    }

    #[test]
    fn all_ones_path_takes_outside_columns_first() {
        let n = 10;
        let m = SignMatrix::all_ones(n).unwrap();
        let b = ColumnSet::from_indices([3, 4, 5, 6], n).unwrap();
        let p = run_endgame_path(&mut fresh(n), &mut MatrixRows::new(&m), 3, b, Threshold::ONE, 2).unwrap();
        assert_eq!(p.end.len(), n - 2);
        let a = p.result.unwrap();
        assert!(b.complement().is_subset(a));
        assert!(p.steps.iter().all(|s| s.rule != PathRule::Fallback));
        assert_eq!(p.potentials(), vec![3, 2, 1, 0, 0, 0]);
    }

    #[test]
    fn impossible_threshold_is_rejected_at_the_start() {
        let n = 8;
        let m = SignMatrix::all_ones(n).unwrap();
        let b = ColumnSet::from_indices([2, 3], n).unwrap();
        // Above 8!, so not even [k] is heavy.
        let r = run_endgame_path(&mut fresh(n), &mut MatrixRows::new(&m), 2, b, Threshold::from_int(40_321), 1);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn malformed_block_is_rejected() {
        let n = 8;
        let m = SignMatrix::all_ones(n).unwrap();
        let overlapping = ColumnSet::from_indices([1, 5], n).unwrap();
        let wrong_size = ColumnSet::from_indices([4, 5, 6], n).unwrap();
        for b in [overlapping, wrong_size] {
            let r = run_endgame_path(&mut fresh(n), &mut MatrixRows::new(&m), 3, b, Threshold::ONE, 1);
            assert!(r.is_err());
        }
    }

    #[test]
    fn path_potential_never_increases() {
        for seed in 0..30 {
            let n = 12;
            let m = sample_sign_matrix(n, &mut RngStream::new(seed, 4)).unwrap();
            let Some(perm) = heavy_start_permutation(&m, 4, Threshold::ONE).unwrap() else { continue };
            let m = m.permute_cols(&perm);
            let b = ColumnSet::from_indices(4..8, n).unwrap();
            let p = run_endgame_path(&mut fresh(n), &mut MatrixRows::new(&m), 4, b, Threshold::ONE, 2).unwrap();
            for w in p.potentials().windows(2) {
                assert!(w[1] == w[0] || w[1] + 1 == w[0], "{:?}", p.potentials());
            }
            if let Some(a) = p.result {
                assert!(permanent_ryser(&m.leading_minor(a)).unwrap() != 0);
            }
        }
    }

    #[test]
    fn heavy_start_moves_to_prefix() {
        let m = sample_sign_matrix(9, &mut RngStream::new(3, 0)).unwrap();
        let perm = heavy_start_permutation(&m, 4, Threshold::ONE).unwrap().unwrap();
        let moved = m.permute_cols(&perm);
        let lead = moved.leading_minor(ColumnSet::prefix(4, 9).unwrap());
        assert_ne!(permanent_ryser(&lead).unwrap(), 0);
    }

    #[test]
    fn blocks_are_consecutive_and_bounded() {
        let b = endgame_blocks(18, 6, 3, 2).unwrap();
        assert_eq!(b[0].to_vec(), vec![6, 7, 8, 9]);
        assert_eq!(b[2].to_vec(), vec![14, 15, 16, 17]);
        assert!(endgame_blocks(18, 6, 4, 2).is_err());
    }

    #[test]
    fn disjoint_family_on_all_ones() {
        let n = 12;
        let m = SignMatrix::all_ones(n).unwrap();
        let f = find_disjoint_heavy_family(&mut fresh(n), &mut MatrixRows::new(&m), 4, Threshold::ONE, 2, 2).unwrap();
        assert!(f.complete());
        assert!(complements_disjoint(&f.members));
    }

    #[test]
    fn single_block_family_is_a_path() {
        let n = 12;
        let m = sample_sign_matrix(n, &mut RngStream::new(11, 1)).unwrap();
        let m = m.permute_cols(&heavy_start_permutation(&m, 4, Threshold::ONE).unwrap().unwrap());
        let f = find_disjoint_heavy_family(&mut fresh(n), &mut MatrixRows::new(&m), 4, Threshold::ONE, 1, 2).unwrap();
        let b = ColumnSet::from_indices(4..8, n).unwrap();
        let p = run_endgame_path(&mut fresh(n), &mut MatrixRows::new(&m), 4, b, Threshold::ONE, 2).unwrap();
        assert_eq!(f.paths, vec![p]);
    }

    #[test]
    fn propagation_on_all_ones_matches_recount() {
        let n = 9;
        let m = SignMatrix::all_ones(n).unwrap();
        let family: Vec<ColumnSet> =
            [[0, 1], [2, 3], [4, 5]].iter().map(|c| ColumnSet::from_indices(c.iter().copied(), n).unwrap().complement()).collect();
        let mut t = fresh(n);
        let p = propagate_down(&mut t, &mut MatrixRows::new(&m), &family, Threshold::from_int(5040), 3).unwrap();
        assert_eq!(p.threshold, Threshold::from_int(560));
        // Children are 8x8 all-ones minors with permanent 8! >= 560.
        assert_eq!(p.heavy.len(), 3);
        assert_eq!(p.good, 3);
        for c in &p.children {
            assert_eq!(t.value(*c).unwrap(), 40_320);
        }
        assert!(complements_disjoint(&p.children));
    }

    #[test]
    fn empty_family_propagates_to_empty() {
        let m = SignMatrix::all_ones(5).unwrap();
        let p = propagate_down(&mut fresh(5), &mut MatrixRows::new(&m), &[], Threshold::ONE, 2).unwrap();
        assert!(p.children.is_empty() && p.heavy.is_empty());
    }

    #[test]
    fn overlapping_family_is_rejected() {
        let n = 6;
        let m = SignMatrix::all_ones(n).unwrap();
        let a = ColumnSet::from_indices([0], n).unwrap().complement();
        let r = propagate_down(&mut fresh(n), &mut MatrixRows::new(&m), &[a, a], Threshold::ONE, 2);
        assert!(r.is_err());
    }

    #[test]
    fn final_row_by_hand() {
        let m = SignMatrix::from_rows(vec![vec![1, 1], vec![1, -1]]).unwrap();
        let fam = [ColumnSet::from_indices([0], 2).unwrap(), ColumnSet::from_indices([1], 2).unwrap()];
        let mut t = fresh(2);
        let r = final_row_heaviness(&mut t, &mut MatrixRows::new(&m), &fam, Threshold::ONE).unwrap();
        assert_eq!(r.per, 0);
        assert!(!r.heavy);
        assert_eq!(r.nonzero_parents, 2);
    }

    #[test]
    fn final_row_matches_ryser() {
        for seed in 0..10 {
            let n = 11;
            let m = sample_sign_matrix(n, &mut RngStream::new(seed, 8)).unwrap();
            let r = final_row_heaviness(&mut fresh(n), &mut MatrixRows::new(&m), &[], Threshold::ONE).unwrap();
            assert_eq!(r.per, permanent_ryser(&m).unwrap());
        }
    }

    #[test]
    fn full_run_on_random_rows() {
        let n = 14;
        let m = sample_sign_matrix(n, &mut RngStream::new(2, 2)).unwrap();
        let m = m.permute_cols(&heavy_start_permutation(&m, 4, Threshold::ONE).unwrap().unwrap());
        let run = run_endgame(&mut fresh(n), &mut MatrixRows::new(&m), 4, Threshold::ONE, 2, 2, 2).unwrap();
        assert_eq!(run.family_sizes.len(), 2);
        assert_eq!(run.final_row.per, permanent_ryser(&m).unwrap());
    }
}
