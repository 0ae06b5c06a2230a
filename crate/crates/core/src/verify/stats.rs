//! Sample summaries.

/// Mean and standard error of the mean (sample variance, `n - 1` divisor).
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Binomial proportion and its plug-in standard error.
pub fn proportion(hits: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Proportion standard error with two pseudo-successes and two
/// pseudo-failures, which stays positive at `p = 0` and `p = 1`.
pub fn adjusted_proportion_se(hits: u64, total: u64) -> f64 {
    let p = (hits as f64 + 2.0) / (total as f64 + 4.0);
    (p * (1.0 - p) / (total as f64 + 4.0)).sqrt()
}

/// Linear-interpolation quantile of an ascending slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&q));
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let h = q * (len - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(len - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

/// Ascending copy with NaNs rejected.
pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in samples"));
    v
}

/// Large-sample standard error of the median, `1.2533 σ / sqrt(n)`, with `σ`
/// estimated robustly as `IQR / 1.349`.
pub fn median_se(sorted: &[f64]) -> f64 {
    if sorted.len() < 2 {
        return 0.0;
    }
    let iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    1.2533 * (iqr / 1.349) / (sorted.len() as f64).sqrt()
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}
