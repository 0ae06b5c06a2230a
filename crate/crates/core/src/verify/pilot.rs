//! Pilot calibration.
//!
//! Bands for statistics without a closed-form target come from one pilot run
//! at [`PILOT_SEED`]. A pilot estimate `p` with standard error `s` gives the
//! band `p ± 3·sqrt(2)·s` (or the threshold `p - 3·sqrt(2)·s`): the `sqrt(2)`
//! covers the noise of the pilot and of an independent run of equal size.
//! Proportions use the standard error with two pseudo-successes and two
//! pseudo-failures so that a perfect pilot still leaves room.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::growth::ProcessConfig;
use crate::verify::moments::sample_growth;
use crate::verify::process::{endgame_ensemble, growth_ensemble, EndgameSetup, RETAINED_FRACTION};
use crate::verify::stats::adjusted_proportion_se;
use crate::verify::SE_BAND;

pub const PILOT_SEED: u64 = 0xC0FFEE;

/// Band half-width multiplier on the pilot standard error.
pub fn pilot_width() -> f64 {
    SE_BAND * std::f64::consts::SQRT_2
}

/// Lower threshold for a proportion observed as `hits / total` in the pilot.
pub fn pilot_threshold(hits: u64, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    (hits as f64 / total as f64 - pilot_width() * adjusted_proportion_se(hits, total)).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePilot {
    pub n: usize,
    pub trials: u64,
    pub nonzero_fraction: f64,
    pub mean_square_ratio: f64,
    pub median_log_ratio: f64,
    pub median_log_ratio_se: f64,
    pub band: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPilot {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub type_counts: [u64; 5],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgamePilot {
    pub setup: EndgameSetup,
    pub trials: u64,
    pub conditioned: u64,
    pub path_successes: u64,
    pub path_threshold: f64,
    pub family_complete: u64,
    pub family_threshold: f64,
    pub with_propagation: u64,
    pub retained: u64,
    pub retained_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PilotFixture {
    pub seed: u64,
    pub growth_rate: RatePilot,
    pub growth: GrowthPilot,
    pub endgame: EndgamePilot,
    pub propagation: EndgamePilot,
}

pub const RATE_N: usize = 16;
pub const RATE_TRIALS: u64 = 500;
pub const GROWTH_N: usize = 16;
pub const GROWTH_TRIALS: u64 = 200;
pub const ENDGAME_TRIALS: u64 = 200;

pub fn endgame_setup() -> EndgameSetup {
    EndgameSetup { n: 18, k: 6, l: 2, lambda: 1, count: 3, t_good: 2 }
}

pub fn propagation_setup() -> EndgameSetup {
    EndgameSetup { n: 16, k: 4, l: 2, lambda: 1, count: 3, t_good: ProcessConfig::new(16).t_good }
}

fn endgame_pilot(setup: EndgameSetup, seed: u64) -> Result<EndgamePilot> {
    let runs = endgame_ensemble(&setup, ENDGAME_TRIALS, seed)?;
    let cond = runs.iter().filter(|r| r.conditioned).count() as u64;
    let path = runs.iter().filter(|r| r.path_success).count() as u64;
    let complete = runs.iter().filter(|r| r.conditioned && r.family_complete).count() as u64;
    let props: Vec<f64> = runs.iter().filter_map(|r| r.first_retained).collect();
    let retained = props.iter().filter(|&&f| f >= RETAINED_FRACTION).count() as u64;
    Ok(EndgamePilot {
        setup,
        trials: ENDGAME_TRIALS,
        conditioned: cond,
        path_successes: path,
        path_threshold: pilot_threshold(path, cond),
        family_complete: complete,
        family_threshold: pilot_threshold(complete, cond),
        with_propagation: props.len() as u64,
        retained,
        retained_threshold: pilot_threshold(retained, props.len() as u64),
    })
}

pub fn run_pilot(seed: u64) -> Result<PilotFixture> {
    let g = sample_growth(RATE_N, RATE_TRIALS, seed)?;
    let half = pilot_width() * g.median_log_ratio_se;
    let growth_rate = RatePilot {
        n: RATE_N,
        trials: RATE_TRIALS,
        nonzero_fraction: 1.0 - g.zero_count as f64 / RATE_TRIALS as f64,
        mean_square_ratio: g.mean_ratio,
        median_log_ratio: g.median_log_ratio,
        median_log_ratio_se: g.median_log_ratio_se,
        band: (g.median_log_ratio - half, g.median_log_ratio + half),
    };
    let runs = growth_ensemble(&ProcessConfig::new(GROWTH_N), GROWTH_TRIALS, seed)?;
    let mut type_counts = [0u64; 5];
    for r in &runs {
        for (c, x) in type_counts.iter_mut().zip(r.trace.type_counts()) {
            *c += x as u64;
        }
    }
    let growth = GrowthPilot {
        n: GROWTH_N,
        trials: GROWTH_TRIALS,
        successes: runs.iter().filter(|r| r.trace.successful).count() as u64,
        type_counts,
    };
    Ok(PilotFixture {
        seed,
        growth_rate,
        growth,
        endgame: endgame_pilot(endgame_setup(), seed)?,
        propagation: endgame_pilot(propagation_setup(), seed)?,
    })
}

/// The committed pilot.
pub fn committed_pilot() -> PilotFixture {
    serde_json::from_str(include_str!("../../tests/fixtures/pilot.json")).expect("committed pilot fixture parses")
}
