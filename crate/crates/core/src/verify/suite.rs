//! Check registry and the default suite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::ProcessConfig;
use crate::rng::RngStream;
use crate::verify::lemmas::{check_littlewood_offord, check_many_children, check_parent_child};
use crate::verify::moments::{
    check_alon, check_alon_two_adic, check_growth_rate, check_second_moment, check_singularity, GrowthRateBands,
    EXACT_MAX_N,
};
use crate::verify::pilot::{endgame_setup, PilotFixture, ENDGAME_TRIALS, GROWTH_N, GROWTH_TRIALS, RATE_N, RATE_TRIALS};
use crate::verify::process::{
    endgame_ensemble, endgame_reports, event_reports, growth_ensemble, growth_structure_reports, EndgameBands,
};
use crate::verify::{CheckReport, Mode};

pub const CHECK_NAMES: [&str; 11] = [
    "second_moment",
    "alon",
    "alon_two_adic",
    "parent_child",
    "many_children",
    "littlewood_offord",
    "growth_rate",
    "singularity",
    "maintain_grow_events",
    "growth_structure",
    "endgame",
];

/// Smallest nonzero fraction accepted by the growth-rate check at the pilot size.
pub const MIN_NONZERO_FRACTION: f64 = 0.99;

/// Overrides for a single check; unset fields take the check's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub mode: Option<Mode>,
    /// Vector length for the anti-concentration check.
    pub m: Option<usize>,
    /// `|I|` for the many-children check.
    pub i_size: Option<usize>,
    pub seed: u64,
    pub pilot: Option<PilotFixture>,
}

/// `m` coordinates drawn from `±{1, 2, 3, 4}`.
pub fn seeded_integer_vector(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed, m as u64);
    (0..m).map(|_| (1 + rng.below(4)) as f64 * rng.sign() as f64).collect()
}

fn littlewood_offord_for(m: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = check_littlewood_offord(&vec![1.0; m], 1.0, 1.0)?;
    out.extend(check_littlewood_offord(&seeded_integer_vector(m, seed), 1.0, 1.0)?);
    Ok(out)
}

fn growth_bands(n: usize, pilot: Option<&PilotFixture>) -> GrowthRateBands {
    match pilot {
        Some(p) if p.growth_rate.n == n => {
            GrowthRateBands { min_nonzero: Some(MIN_NONZERO_FRACTION), log_ratio: Some(p.growth_rate.band) }
        }
        _ => GrowthRateBands::default(),
    }
}

/// Configuration for the event check: `n = 14`, `ε = 0.3`, `ε' = 0.05`, `c = 0.5`.
pub fn event_config(n: usize) -> ProcessConfig {
    ProcessConfig::with_eps(n, 0.3, 0.05, 0.5)
}

pub fn run_check(name: &str, o: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let seed = o.seed;
    match name {
        "second_moment" => {
            let n = o.n.unwrap_or(3);
            let mode = o.mode.unwrap_or(if n <= EXACT_MAX_N {
                Mode::Exact
            } else {
                Mode::MonteCarlo { trials: o.trials.unwrap_or(2000) }
            });
            Ok(vec![check_second_moment(n, mode, seed)?])
        }
        "alon" => Ok(vec![check_alon(o.n.unwrap_or(3), o.trials.unwrap_or(1000), seed)?]),
        "alon_two_adic" => Ok(vec![check_alon_two_adic(o.n.unwrap_or(7), o.trials.unwrap_or(1000), seed)?]),
        "parent_child" => check_parent_child(o.n.unwrap_or(10), o.trials.unwrap_or(10_000), seed),
        "many_children" => check_many_children(o.n.unwrap_or(14), o.i_size.unwrap_or(6), o.trials.unwrap_or(10_000), seed),
        "littlewood_offord" => match o.m {
            Some(m) => check_littlewood_offord(&vec![1.0; m], 1.0, 1.0),
            None => {
                let mut out = Vec::new();
                for m in 2..=14 {
                    out.extend(littlewood_offord_for(m, seed)?);
                }
                Ok(out)
            }
        },
        "growth_rate" => {
            let n = o.n.unwrap_or(RATE_N);
            check_growth_rate(n, o.trials.unwrap_or(RATE_TRIALS), seed, &growth_bands(n, o.pilot.as_ref()))
        }
        "singularity" => {
            let n = o.n.unwrap_or(4);
            let mode = o.mode.unwrap_or(if n <= EXACT_MAX_N {
                Mode::Exact
            } else {
                Mode::MonteCarlo { trials: o.trials.unwrap_or(1000) }
            });
            Ok(vec![check_singularity(n, mode, seed)?])
        }
        "maintain_grow_events" => {
            let cfg = event_config(o.n.unwrap_or(14));
            let runs = growth_ensemble(&cfg, o.trials.unwrap_or(200), seed)?;
            Ok(event_reports(&cfg, &runs, seed))
        }
        "growth_structure" => {
            let cfg = ProcessConfig::new(o.n.unwrap_or(GROWTH_N));
            let runs = growth_ensemble(&cfg, o.trials.unwrap_or(GROWTH_TRIALS), seed)?;
            let mut out = growth_structure_reports(&cfg, &runs, seed);
            out.extend(event_reports(&cfg, &runs, seed));
            Ok(out)
        }
        "endgame" => {
            let mut setup = endgame_setup();
            if let Some(n) = o.n {
                setup.n = n;
                setup.count = (n - setup.k) / (2 * setup.l);
            }
            let runs = endgame_ensemble(&setup, o.trials.unwrap_or(ENDGAME_TRIALS), seed)?;
            let bands = match o.pilot.as_ref() {
                Some(p) if p.endgame.setup == setup => EndgameBands {
                    path_success: Some(p.endgame.path_threshold),
                    family_complete: Some(p.endgame.family_threshold),
                    retained: Some(p.endgame.retained_threshold),
                },
                _ => EndgameBands::default(),
            };
            Ok(endgame_reports(&setup, &runs, seed, &bands))
        }
        "all" => run_default_suite(seed, o.pilot.as_ref()),
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

/// Every check at its default size. The literal residue statement is run at
/// `n = 3` only; larger sizes use the two-adic form.
pub fn run_default_suite(seed: u64, pilot: Option<&PilotFixture>) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(check_second_moment(n, Mode::Exact, seed)?);
    }
    out.push(check_second_moment(10, Mode::MonteCarlo { trials: 2000 }, seed)?);
    out.push(check_alon(3, 0, seed)?);
    for (n, trials) in [(3, 0), (7, 1000), (15, 100)] {
        out.push(check_alon_two_adic(n, trials, seed)?);
    }
    for n in 1..=4 {
        out.push(check_singularity(n, Mode::Exact, seed)?);
    }
    let base = SuiteOptions { seed, pilot: pilot.cloned(), ..Default::default() };
    for name in ["parent_child", "many_children", "littlewood_offord", "growth_rate", "maintain_grow_events", "growth_structure", "endgame"] {
        out.extend(run_check(name, &base)?);
    }
    Ok(out)
}
