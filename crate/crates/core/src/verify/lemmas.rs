//! One exposed row: parents, children and anti-concentration.

use std::time::Instant;

use crate::engines::{permanent_ryser, ExactInt};
use crate::error::{Error, Result};
use crate::matrix::{sample_sign_matrix, SignMatrix};
use crate::rng::RngStream;
use crate::subset::{binomial, ColumnSet};
use crate::verify::report::{CheckReport, Criterion, SampleSize};
use crate::verify::stats::proportion;
use crate::verify::{elapsed_ms, par_trials, SE_BAND};

/// Largest vector length for exact sign enumeration.
pub const LO_MAX_M: usize = 20;

/// `Per` of rows `0..rows` and the given columns.
fn minor(m: &SignMatrix, rows: usize, cols: &[usize]) -> Result<ExactInt> {
    permanent_ryser(&m.submatrix(&(0..rows).collect::<Vec<_>>(), cols)?)
}

/// The `idx`-th smallest column outside `a`.
fn nth_outside(a: ColumnSet, idx: usize) -> usize {
    a.complement().iter().nth(idx).expect("index within the complement")
}

/// A random instance: matrix, level `k`, parent `A` and a column set `I` outside it.
fn instance(n: usize, min_free: usize, seed: u64, t: u64) -> Result<(SignMatrix, usize, ColumnSet, Vec<usize>)> {
    let mut rng = RngStream::new(seed, t);
    let m = sample_sign_matrix(n, &mut rng)?;
    let k = 1 + rng.below((n - min_free) as u64) as usize;
    let a = ColumnSet::new(rng.subset_mask(n, k), n)?;
    let pick = rng.subset_mask(n - k, min_free);
    let extra = ColumnSet::new(pick, n - k)?.iter().map(|idx| nth_outside(a, idx)).collect();
    Ok((m, k, a, extra))
}

struct ParentChild {
    identity: bool,
    max_over_sign: bool,
    child_at_least_parent: bool,
}

fn parent_child_instance(n: usize, seed: u64, t: u64) -> Result<ParentChild> {
    let (m, k, a, extra) = instance(n, 1, seed, t)?;
    let i = extra[0];
    let parent = minor(&m, k, &a.to_vec())?;
    let cols = a.with(i).to_vec();
    let child_matrix = m.submatrix(&(0..=k).collect::<Vec<_>>(), &cols)?;
    let child = permanent_ryser(&child_matrix)?;
    let pos = cols.iter().position(|&c| c == i).expect("i is a child column");
    let mut flipped = child_matrix.entries().to_vec();
    flipped[k * (k + 1) + pos] *= -1;
    let flip = permanent_ryser(&SignMatrix::from_flat(k + 1, flipped)?)?;
    Ok(ParentChild {
        identity: (flip - child).abs() == 2 * parent.abs(),
        max_over_sign: child.abs().max(flip.abs()) >= parent.abs(),
        child_at_least_parent: child.abs() >= parent.abs(),
    })
}

/// Flip identity and `max_sign |child| >= |parent|` on every instance, plus
/// the frequency of `|child| >= |parent|` against `1/2`.
pub fn check_parent_child(n: usize, trials: u64, seed: u64) -> Result<Vec<CheckReport>> {
    if !(2..=22).contains(&n) || trials == 0 {
        return Err(Error::InvalidConfig(format!("parent-child check needs 2 <= n <= 22 and trials > 0 (n = {n})")));
    }
    let start = Instant::now();
    let rs = par_trials(trials, |t| parent_child_instance(n, seed, t))?;
    let ms = elapsed_ms(start);
    let exact_ok = rs.iter().filter(|r| r.identity && r.max_over_sign).count() as u64;
    let identity_fail = rs.iter().filter(|r| !r.identity).count() as u64;
    let (p, se) = proportion(rs.iter().filter(|r| r.child_at_least_parent).count() as u64, trials);
    let size = SampleSize::Trials(trials);
    Ok(vec![
        CheckReport::new(
            "parent_child.identity",
            Some(n),
            size,
            Some(seed),
            exact_ok as f64 / trials as f64,
            Criterion::AtLeast { bound: 1.0, tolerance: 0.0 },
        )
        .detail("instances_ok", exact_ok)
        .detail("identity_failures", identity_fail)
        .timed(ms),
        CheckReport::new(
            "parent_child.frequency",
            Some(n),
            size,
            Some(seed),
            p,
            Criterion::AtLeast { bound: 0.5, tolerance: SE_BAND * se },
        )
        .detail("standard_error", se)
        .timed(ms),
    ])
}

/// `(some i in I has |child| >= |parent|, at least |I|/3 do)` for one instance.
fn many_children_instance(n: usize, i_size: usize, seed: u64, t: u64) -> Result<(bool, bool)> {
    let (m, k, a, extra) = instance(n, i_size, seed, t)?;
    let parent = minor(&m, k, &a.to_vec())?.abs();
    let mut good = 0;
    for &i in &extra {
        good += (minor(&m, k + 1, &a.with(i).to_vec())?.abs() >= parent) as usize;
    }
    Ok((good >= 1, 3 * good >= i_size))
}

/// `P(some i in I) >= 1 - 2^-|I|` with an SE band, and the `|I|/3` event
/// reported descriptively.
pub fn check_many_children(n: usize, i_size: usize, trials: u64, seed: u64) -> Result<Vec<CheckReport>> {
    if i_size == 0 || i_size + 1 > n || n > 22 || trials == 0 {
        return Err(Error::InvalidConfig(format!("many-children check needs 1 <= |I| <= n - 1 and n <= 22 (n = {n}, |I| = {i_size})")));
    }
    let start = Instant::now();
    let rs = par_trials(trials, |t| many_children_instance(n, i_size, seed, t))?;
    let ms = elapsed_ms(start);
    let (p1, se1) = proportion(rs.iter().filter(|r| r.0).count() as u64, trials);
    let (p2, se2) = proportion(rs.iter().filter(|r| r.1).count() as u64, trials);
    let size = SampleSize::Trials(trials);
    let bound = 1.0 - 0.5f64.powi(i_size as i32);
    Ok(vec![
        CheckReport::new("many_children.some", Some(n), size, Some(seed), p1, Criterion::AtLeast { bound, tolerance: SE_BAND * se1 })
            .detail("set_size", i_size as u64)
            .detail("standard_error", se1)
            .timed(ms),
        CheckReport::new("many_children.third", Some(n), size, Some(seed), p2, Criterion::Descriptive { bound: Some(1.0) })
            .detail("set_size", i_size as u64)
            .detail("shortfall", 1.0 - p2)
            .detail("standard_error", se2)
            .timed(ms),
    ])
}

/// Exact distribution facts for `a_1 v_1 + .. + a_m v_m` with iid signs.
#[derive(Clone, Debug, PartialEq)]
pub struct SignSumProfile {
    /// Number of coordinates with `|v_i| >= λ`.
    pub heavy_coords: usize,
    /// Largest probability of an open interval of length `2λ`.
    pub max_interval: f64,
    /// `P(|sum| <= xλ)`.
    pub small_ball: f64,
    /// `C(k, floor(k/2)) / 2^k` for `k = heavy_coords`.
    pub interval_bound: f64,
    /// `(ceil(x) + 1)` times `interval_bound`.
    pub small_ball_bound: f64,
    /// Slack used when comparing float sums to interval ends.
    pub tolerance: f64,
}

/// Enumerates all `2^m` sign vectors.
pub fn sign_sum_profile(v: &[f64], lambda: f64, x: f64) -> Result<SignSumProfile> {
    let m = v.len();
    if m == 0 || m > LO_MAX_M {
        return Err(Error::TooLarge { what: "sign enumeration", n: m, cap: LO_MAX_M });
    }
    if !(lambda > 0.0 && x >= 0.0 && v.iter().all(|c| c.is_finite())) {
        return Err(Error::InvalidConfig(format!("need λ > 0, x >= 0 and finite v (λ = {lambda}, x = {x})")));
    }
    let heavy_coords = v.iter().filter(|c| c.abs() >= lambda).count();
    if heavy_coords == 0 {
        return Err(Error::Precondition(format!("no coordinate reaches λ = {lambda}")));
    }
    let mut sums = vec![0.0f64];
    for &c in v {
        sums = sums.iter().flat_map(|&s| [s - c, s + c]).collect();
    }
    sums.sort_by(|a, b| a.partial_cmp(b).expect("finite sums"));
    let tolerance = 1e-9 * v.iter().map(|c| c.abs()).sum::<f64>().max(lambda);
    let width = 2.0 * lambda - tolerance;
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..sums.len() {
        hi = hi.max(lo);
        while hi < sums.len() && sums[hi] < sums[lo] + width {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    let total = sums.len() as f64;
    let ball = sums.iter().filter(|s| s.abs() <= x * lambda + tolerance).count();
    let k = heavy_coords as u64;
    let interval_bound = binomial(k, k / 2) as f64 / 2f64.powi(k as i32);
    Ok(SignSumProfile {
        heavy_coords,
        max_interval: best as f64 / total,
        small_ball: ball as f64 / total,
        interval_bound,
        small_ball_bound: (x.ceil() + 1.0) * interval_bound,
        tolerance,
    })
}

/// The interval bound and the small-ball bound, exactly.
pub fn check_littlewood_offord(v: &[f64], lambda: f64, x: f64) -> Result<Vec<CheckReport>> {
    let start = Instant::now();
    let p = sign_sum_profile(v, lambda, x)?;
    let ms = elapsed_ms(start);
    let m = Some(v.len());
    Ok(vec![
        CheckReport::new(
            "littlewood_offord.interval",
            m,
            SampleSize::EXACT,
            None,
            p.max_interval,
            Criterion::AtMost { bound: p.interval_bound, tolerance: 0.0 },
        )
        .detail("heavy_coordinates", p.heavy_coords as u64)
        .detail("lambda", lambda)
        .detail("float_slack", p.tolerance)
        .timed(ms),
        CheckReport::new(
            "littlewood_offord.small_ball",
            m,
            SampleSize::EXACT,
            None,
            p.small_ball,
            Criterion::AtMost { bound: p.small_ball_bound, tolerance: 0.0 },
        )
        .detail("x", x)
        .detail("lambda", lambda)
        .timed(ms),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Verdict;

    #[test]
    fn two_ones() {
        let p = sign_sum_profile(&[1.0, 1.0], 1.0, 1.0).unwrap();
        assert_eq!(p.max_interval, 0.5);
        assert_eq!(p.interval_bound, 0.5);
        assert_eq!(p.small_ball, 0.5);
    }

    #[test]
    fn three_ones() {
        // Sums -3, -1 (x3), 1 (x3), 3: an open interval of length 2 holds one value.
        let p = sign_sum_profile(&[1.0, 1.0, 1.0], 1.0, 1.0).unwrap();
        assert_eq!(p.max_interval, 3.0 / 8.0);
        assert_eq!(p.interval_bound, 3.0 / 8.0);
        assert_eq!(p.small_ball, 6.0 / 8.0);
        assert_eq!(p.small_ball_bound, 6.0 / 8.0);
    }

    #[test]
    fn interval_scan_matches_brute_force() {
        // Brute force over interval left ends just below each sum.
        let v = [1.0, 2.0, 2.0, 3.0, 5.0, 1.5];
        let lambda = 1.5;
        let p = sign_sum_profile(&v, lambda, 1.0).unwrap();
        let sums: Vec<f64> = (0..64u32)
            .map(|s| v.iter().enumerate().map(|(i, c)| if s >> i & 1 == 1 { *c } else { -c }).sum())
            .collect();
        let best = sums
            .iter()
            .map(|&a| sums.iter().filter(|&&s| s >= a && s < a + 2.0 * lambda).count())
            .max()
            .unwrap();
        assert_eq!(p.max_interval, best as f64 / 64.0);
        assert_eq!(p.heavy_coords, 5);
    }

    #[test]
    fn bound_holds_on_mixed_vectors() {
        for v in [vec![1.0; 9], vec![1.0, 1.0, 2.0, 3.0, 4.0, 1.25], vec![4.0, -2.0, 7.0, 1.0, 1.0, 1.0, 1.0, 9.0]] {
            for r in check_littlewood_offord(&v, 1.0, 2.0).unwrap() {
                assert_eq!(r.verdict, Verdict::Pass, "{v:?}: {r:?}");
            }
        }
    }

    #[test]
    fn lo_preconditions() {
        assert!(sign_sum_profile(&[0.5, 0.5], 1.0, 1.0).is_err());
        assert!(sign_sum_profile(&[1.0; 21], 1.0, 1.0).is_err());
        assert!(sign_sum_profile(&[1.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn parent_child_identity_always_holds() {
        let r = check_parent_child(7, 2000, 4).unwrap();
        assert_eq!(r[0].statistic, 1.0);
        assert_eq!(r[1].verdict, Verdict::Pass);
    }

    #[test]
    fn many_children_single_column_matches_half() {
        let r = check_many_children(8, 1, 2000, 6).unwrap();
        assert_eq!(r[0].verdict, Verdict::Pass);
        if let Criterion::AtLeast { bound, .. } = r[0].criterion {
            assert_eq!(bound, 0.5);
        }
        let r = check_many_children(10, 4, 1000, 6).unwrap();
        assert_eq!(r[0].verdict, Verdict::Pass);
        assert!(check_many_children(5, 5, 10, 0).is_err());
    }

    #[test]
    fn all_ones_children_always_grow() {
        let m = SignMatrix::all_ones(6).unwrap();
        for k in 1..5 {
            let cols: Vec<usize> = (0..k).collect();
            let parent = minor(&m, k, &cols).unwrap();
            for i in k..6 {
                let mut c = cols.clone();
                c.push(i);
                assert!(minor(&m, k + 1, &c).unwrap() >= parent);
            }
        }
    }
}
