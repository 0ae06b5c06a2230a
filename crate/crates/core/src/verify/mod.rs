//! Named verification checks.
//!
//! Exact checks enumerate; sampled checks run seeded trials in parallel, one
//! stream per trial index, and judge with a band of [`SE_BAND`] standard
//! errors taken from the same run.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub mod lemmas;
pub mod moments;
pub mod pilot;
pub mod process;
pub mod report;
pub mod stats;
pub mod suite;

pub use report::{CheckReport, Criterion, SampleSize, Verdict};

/// Width of statistical bands, in standard errors.
pub const SE_BAND: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo { trials: u64 },
}

/// Runs `f(0..trials)` in parallel and returns results in trial order.
pub(crate) fn par_trials<T, F>(trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

pub(crate) fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}
