//! Moment identities, residues and the size of `|Per|`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engines::{permanent_mod, permanent_ryser};
use crate::error::{Error, Result};
use crate::matrix::{enumerate_all_sign_matrices, sample_sign_matrix};
use crate::rng::RngStream;
use crate::subset::factorial;
use crate::verify::report::{CheckReport, Criterion, SampleSize};
use crate::verify::stats::{ln_factorial, mean_se, median_se, proportion, quantile, sorted};
use crate::verify::{elapsed_ms, par_trials, Mode, SE_BAND};

/// Largest `n` for exhaustive enumeration.
pub const EXACT_MAX_N: usize = 4;
/// Largest `n` for sampled permanents.
pub const SAMPLED_MAX_N: usize = 22;

fn exact_guard(n: usize) -> Result<()> {
    if n == 0 || n > EXACT_MAX_N {
        return Err(Error::TooLarge { what: "exact enumeration", n, cap: EXACT_MAX_N });
    }
    Ok(())
}

fn sampled_guard(n: usize, trials: u64) -> Result<()> {
    if n == 0 || n > SAMPLED_MAX_N {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: SAMPLED_MAX_N });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    Ok(())
}

/// `E Per^2 = n!`: exact over all matrices, or sampled.
pub fn check_second_moment(n: usize, mode: Mode, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let nf = factorial(n as u64).expect("n <= 22") as f64;
    match mode {
        Mode::Exact => {
            exact_guard(n)?;
            let mut sum: u128 = 0;
            let mut total: u128 = 0;
            for m in enumerate_all_sign_matrices(n)? {
                let p = permanent_ryser(&m)?;
                sum += (p * p) as u128;
                total += 1;
            }
            let expected = factorial(n as u64).expect("n <= 4") * total;
            // `total` is a power of two and `sum < 2^53`, so the float mean is exact.
            Ok(CheckReport::new(
                "second_moment",
                Some(n),
                SampleSize::EXACT,
                None,
                sum as f64 / total as f64,
                Criterion::Equals { expected: nf, tolerance: 0.0 },
            )
            .detail("sum_per_squared", sum.to_string())
            .detail("n_factorial_times_count", expected.to_string())
            .detail("identity_holds", sum == expected)
            .timed(elapsed_ms(start)))
        }
        Mode::MonteCarlo { trials } => {
            sampled_guard(n, trials)?;
            let squares: Vec<f64> = par_trials(trials, |t| {
                let p = permanent_ryser(&sample_sign_matrix(n, &mut RngStream::new(seed, t))?)? as f64;
                Ok(p * p)
            })?;
            let (mean, se) = mean_se(&squares);
            Ok(CheckReport::new(
                "second_moment",
                Some(n),
                SampleSize::Trials(trials),
                Some(seed),
                mean,
                Criterion::Equals { expected: nf, tolerance: SE_BAND * se },
            )
            .detail("standard_error", se)
            .detail("mean_over_n_factorial", mean / nf)
            .timed(elapsed_ms(start)))
        }
    }
}

/// `log2(n + 1)` when `n + 1` is a power of two in `4..=32`.
fn alon_exponent(n: usize) -> Result<u32> {
    match n + 1 {
        4 | 8 | 16 | 32 => Ok((n + 1).trailing_zeros()),
        _ => Err(Error::Precondition(format!("n + 1 = {} must be one of 4, 8, 16, 32", n + 1))),
    }
}

/// Residues of `Per` modulo `modulus` for every matrix (`n = 3`) or a sample.
fn residues(n: usize, trials: u64, seed: u64, modulus: u64) -> Result<(SampleSize, Vec<u64>)> {
    if n <= EXACT_MAX_N {
        let all: Result<Vec<u64>> = enumerate_all_sign_matrices(n)?.map(|m| permanent_mod(&m, modulus)).collect();
        return Ok((SampleSize::EXACT, all?));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    let r = par_trials(trials, |t| permanent_mod(&sample_sign_matrix(n, &mut RngStream::new(seed, t))?, modulus))?;
    Ok((SampleSize::Trials(trials), r))
}

fn residue_report(name: &str, n: usize, seed: u64, modulus: u64, target: u64, size: SampleSize, rs: &[u64]) -> CheckReport {
    let hits = rs.iter().filter(|&&r| r == target).count();
    let first_miss = rs.iter().position(|&r| r != target);
    let mut histogram = std::collections::BTreeMap::new();
    for &r in rs {
        *histogram.entry(r.to_string()).or_insert(0u64) += 1;
    }
    let seed = (!size.is_exact()).then_some(seed);
    CheckReport::new(name, Some(n), size, seed, hits as f64 / rs.len() as f64, Criterion::AtLeast { bound: 1.0, tolerance: 0.0 })
        .detail("modulus", modulus)
        .detail("expected_residue", target)
        .detail("matches", hits as u64)
        .detail("total", rs.len() as u64)
        .detail("first_counterexample_trial", first_miss.map(|i| i as u64))
        .detail("residue_histogram", serde_json::to_value(histogram).expect("map of counts"))
}

/// `Per = (n + 1)/2 (mod n + 1)` for every matrix, taken literally.
pub fn check_alon(n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    alon_exponent(n)?;
    let modulus = n as u64 + 1;
    let (size, rs) = residues(n, trials, seed, modulus)?;
    Ok(residue_report("alon", n, seed, modulus, modulus / 2, size, &rs).timed(elapsed_ms(start)))
}

/// For `n = 2^s - 1`, `Per` is an odd multiple of `2^(n - s)`, i.e.
/// `Per = 2^(n - s) (mod 2^(n - s + 1))`.
pub fn check_alon_two_adic(n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let s = alon_exponent(n)?;
    let v = n as u32 - s;
    let modulus = 1u64 << (v + 1);
    let (size, rs) = residues(n, trials, seed, modulus)?;
    Ok(residue_report("alon_two_adic", n, seed, modulus, 1 << v, size, &rs)
        .detail("two_adic_valuation", v)
        .timed(elapsed_ms(start)))
}

/// Number of `n x n` sign matrices with zero permanent, from an independent
/// exhaustive count.
pub const ZERO_PERMANENT_COUNTS: [(usize, u64, u64); 4] = [(1, 0, 2), (2, 8, 16), (3, 0, 512), (4, 21_504, 65_536)];

/// `P(Per = 0)`: exact against the frozen counts, or sampled and descriptive.
pub fn check_singularity(n: usize, mode: Mode, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    match mode {
        Mode::Exact => {
            exact_guard(n)?;
            let mut zeros = 0u64;
            let mut total = 0u64;
            for m in enumerate_all_sign_matrices(n)? {
                zeros += (permanent_ryser(&m)? == 0) as u64;
                total += 1;
            }
            let (_, z, t) = ZERO_PERMANENT_COUNTS[n - 1];
            Ok(CheckReport::new(
                "singularity",
                Some(n),
                SampleSize::EXACT,
                None,
                zeros as f64 / total as f64,
                Criterion::Equals { expected: z as f64 / t as f64, tolerance: 0.0 },
            )
            .detail("zero_count", zeros)
            .detail("total", total)
            .timed(elapsed_ms(start)))
        }
        Mode::MonteCarlo { trials } => {
            sampled_guard(n, trials)?;
            let zero: Vec<bool> =
                par_trials(trials, |t| Ok(permanent_ryser(&sample_sign_matrix(n, &mut RngStream::new(seed, t))?)? == 0))?;
            let hits = zero.iter().filter(|&&z| z).count() as u64;
            let (p, se) = proportion(hits, trials);
            Ok(CheckReport::new("singularity", Some(n), SampleSize::Trials(trials), Some(seed), p, Criterion::Descriptive { bound: None })
                .detail("zero_count", hits)
                .detail("standard_error", se)
                .timed(elapsed_ms(start)))
        }
    }
}

/// Bounds for the growth-rate check; absent entries are reported descriptively.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GrowthRateBands {
    pub min_nonzero: Option<f64>,
    /// Band for `median(ln Per^2) / ln n!`.
    pub log_ratio: Option<(f64, f64)>,
}

/// Summary of sampled `|Per|` at one `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub n: usize,
    pub trials: u64,
    pub zero_count: u64,
    /// `ln |Per|` quartiles over nonzero samples.
    pub log_abs_quartiles: [f64; 3],
    pub mean_ratio: f64,
    pub mean_ratio_se: f64,
    /// `median(ln Per^2) / ln n!` over nonzero samples.
    pub median_log_ratio: f64,
    pub median_log_ratio_se: f64,
}

pub fn sample_growth(n: usize, trials: u64, seed: u64) -> Result<GrowthSample> {
    sampled_guard(n, trials)?;
    let pers = par_trials(trials, |t| permanent_ryser(&sample_sign_matrix(n, &mut RngStream::new(seed, t))?))?;
    let nf = factorial(n as u64).expect("n <= 22") as f64;
    let lnf = ln_factorial(n);
    let ratios: Vec<f64> = pers.iter().map(|&p| (p as f64).powi(2) / nf).collect();
    let (mean_ratio, mean_ratio_se) = mean_se(&ratios);
    let logs = sorted(&pers.iter().filter(|&&p| p != 0).map(|&p| (p.unsigned_abs() as f64).ln()).collect::<Vec<_>>());
    let zero_count = trials - logs.len() as u64;
    let q = |x| quantile(&logs, x);
    let log_ratio: Vec<f64> = logs.iter().map(|l| 2.0 * l / lnf).collect();
    let (median_log_ratio, median_log_ratio_se) = if n == 1 {
        (f64::NAN, f64::NAN)
    } else {
        (quantile(&log_ratio, 0.5), median_se(&log_ratio))
    };
    Ok(GrowthSample {
        n,
        trials,
        zero_count,
        log_abs_quartiles: [q(0.25), q(0.5), q(0.75)],
        mean_ratio,
        mean_ratio_se,
        median_log_ratio,
        median_log_ratio_se,
    })
}

/// Nonzero fraction, `E Per^2 / n! = 1` and the median log ratio at one `n`.
pub fn check_growth_rate(n: usize, trials: u64, seed: u64, bands: &GrowthRateBands) -> Result<Vec<CheckReport>> {
    let start = Instant::now();
    let g = sample_growth(n, trials, seed)?;
    let ms = elapsed_ms(start);
    let size = SampleSize::Trials(trials);
    let nonzero = 1.0 - g.zero_count as f64 / trials as f64;
    let nonzero_criterion = match bands.min_nonzero {
        Some(b) => Criterion::AtLeast { bound: b, tolerance: 0.0 },
        None => Criterion::Descriptive { bound: None },
    };
    let ratio_criterion = match bands.log_ratio {
        Some((lo, hi)) => Criterion::InBand { lo, hi },
        None => Criterion::Descriptive { bound: Some(1.0) },
    };
    Ok(vec![
        CheckReport::new("growth_rate.nonzero_fraction", Some(n), size, Some(seed), nonzero, nonzero_criterion)
            .detail("zero_count", g.zero_count)
            .timed(ms),
        CheckReport::new(
            "growth_rate.mean_square_ratio",
            Some(n),
            size,
            Some(seed),
            g.mean_ratio,
            Criterion::Equals { expected: 1.0, tolerance: SE_BAND * g.mean_ratio_se },
        )
        .detail("standard_error", g.mean_ratio_se)
        .timed(ms),
        CheckReport::new("growth_rate.median_log_ratio", Some(n), size, Some(seed), g.median_log_ratio, ratio_criterion)
            .detail("standard_error", g.median_log_ratio_se)
            .detail("log_abs_q1", g.log_abs_quartiles[0])
            .detail("log_abs_median", g.log_abs_quartiles[1])
            .detail("log_abs_q3", g.log_abs_quartiles[2])
            .detail("half_log_n_factorial", 0.5 * ln_factorial(n))
            .timed(ms),
    ])
}
