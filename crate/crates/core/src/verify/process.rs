//! Ensembles of growth and endgame runs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::endgame::{complements_disjoint, heavy_start_permutation, run_endgame, EndgameRun};
use crate::engines::permanent_ryser;
use crate::error::Result;
use crate::growth::{audit_trace, count_target, replay, run_growth, MatrixRows, ProcessConfig, ProcessTrace};
use crate::lattice::{MinorTable, Split, Threshold};
use crate::matrix::{sample_sign_matrix, SignMatrix};
use crate::rng::RngStream;
use crate::verify::report::{CheckReport, Criterion, SampleSize};
use crate::verify::stats::{mean_se, proportion};
use crate::verify::{elapsed_ms, par_trials, SE_BAND};

/// Conditioning events needed before the `1/3` growth bound is enforced.
pub const EGROW_MIN_EVENTS: u64 = 500;

/// Event tallies from one growth run; each pair is `(conditioned, held)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventTally {
    /// `E_{k,N,λ}` then `E_{k+1, εN/6, λ}`.
    pub maintain: (u64, u64),
    /// `E'` then `E_{k+1, n^c N, λ}`.
    pub egrow: (u64, u64),
    /// `E''` then `E_{k+1, εN/4, n^(1/2-c) λ}`.
    pub cgrow: (u64, u64),
}

impl EventTally {
    fn add(&mut self, o: &EventTally) {
        for (a, b) in [(&mut self.maintain, o.maintain), (&mut self.egrow, o.egrow), (&mut self.cgrow, o.cgrow)] {
            a.0 += b.0;
            a.1 += b.1;
        }
    }
}

/// Tallies the three events along a trace, recounting on a lattice of `m`.
pub fn tally_events(trace: &ProcessTrace, m: &SignMatrix) -> Result<EventTally> {
    let cfg = &trace.config;
    let mut table = MinorTable::new(cfg.n, cfg.lattice_cap)?;
    for i in 0..cfg.k1 {
        table.push_row(m.row(i))?;
    }
    let nf = cfg.n as f64;
    let mut t = EventTally::default();
    for r in &trace.records {
        let Some(c) = &r.classification else { continue };
        let n_k = r.n_k as f64;
        let at = |lambda: f64| table.heavy_count(r.k + 1, Threshold::from_real(lambda)?);
        t.maintain.0 += 1;
        t.maintain.1 += (at(r.lambda_k)? >= count_target(cfg.eps * n_k / 6.0)) as u64;
        match c.split {
            Split::Prime => {
                t.egrow.0 += 1;
                t.egrow.1 += (at(r.lambda_k)? >= count_target(nf.powf(cfg.c) * n_k)) as u64;
            }
            Split::DoublePrime => {
                t.cgrow.0 += 1;
                let grown = at(nf.powf(0.5 - cfg.c) * r.lambda_k)?;
                t.cgrow.1 += (grown >= count_target(cfg.eps * n_k / 4.0)) as u64;
            }
        }
    }
    Ok(t)
}

/// One seeded growth run and everything checked about it.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRun {
    pub trace: ProcessTrace,
    /// Replays and re-verifies against a fresh lattice.
    pub sound: bool,
    pub events: EventTally,
}

pub fn growth_ensemble(cfg: &ProcessConfig, trials: u64, seed: u64) -> Result<Vec<GrowthRun>> {
    cfg.validate()?;
    par_trials(trials, |t| {
        let m = sample_sign_matrix(cfg.n, &mut RngStream::new(seed, t))?;
        let trace = run_growth(&mut MatrixRows::new(&m), cfg)?;
        let sound = replay(&trace).is_ok() && audit_trace(&trace, &m).is_ok();
        let events = tally_events(&trace, &m)?;
        Ok(GrowthRun { trace, sound, events })
    })
}

/// Soundness, per-level drift of `W` and the success fraction.
pub fn growth_structure_reports(cfg: &ProcessConfig, runs: &[GrowthRun], seed: u64) -> Vec<CheckReport> {
    let trials = runs.len() as u64;
    let size = SampleSize::Trials(trials);
    let n = Some(cfg.n);
    let sound = runs.iter().filter(|r| r.sound).count() as u64;
    let mut out = vec![CheckReport::new(
        "growth.trace_soundness",
        n,
        size,
        Some(seed),
        sound as f64 / trials as f64,
        Criterion::AtLeast { bound: 1.0, tolerance: 0.0 },
    )
    .detail("sound_runs", sound)];
    for k in cfg.k0..cfg.k1 {
        let incs: Vec<f64> = runs
            .iter()
            .map(|r| {
                let i = k - cfg.k0;
                r.trace.records[i + 1].w_k - r.trace.records[i].w_k
            })
            .collect();
        let (mean, se) = mean_se(&incs);
        out.push(
            CheckReport::new("growth.drift", n, size, Some(seed), mean, Criterion::AtMost { bound: 0.0, tolerance: SE_BAND * se })
                .detail("k", k as u64)
                .detail("standard_error", se),
        );
    }
    let successes = runs.iter().filter(|r| r.trace.successful).count() as u64;
    let mut type_counts = [0u64; 5];
    for r in runs {
        for (c, x) in type_counts.iter_mut().zip(r.trace.type_counts()) {
            *c += x as u64;
        }
    }
    out.push(
        CheckReport::new(
            "growth.success_fraction",
            n,
            size,
            Some(seed),
            successes as f64 / trials as f64,
            Criterion::Descriptive { bound: None },
        )
        .detail("successes", successes)
        .detail("type_counts", type_counts.to_vec()),
    );
    out
}

/// Conditional frequencies of the maintain and growth events.
pub fn event_reports(cfg: &ProcessConfig, runs: &[GrowthRun], seed: u64) -> Vec<CheckReport> {
    let mut total = EventTally::default();
    for r in runs {
        total.add(&r.events);
    }
    let size = SampleSize::Trials(runs.len() as u64);
    let n = Some(cfg.n);
    let report = |name: &str, (cond, held): (u64, u64), criterion: Criterion, se: f64| {
        let freq = if cond == 0 { f64::NAN } else { held as f64 / cond as f64 };
        CheckReport::new(name, n, size, Some(seed), freq, criterion)
            .detail("conditioning_events", cond)
            .detail("held", held)
            .detail("standard_error", se)
    };
    let (_, se_m) = proportion(total.maintain.1, total.maintain.0);
    let (_, se_e) = proportion(total.egrow.1, total.egrow.0);
    let (_, se_c) = proportion(total.cgrow.1, total.cgrow.0);
    let egrow_criterion = if total.egrow.0 >= EGROW_MIN_EVENTS {
        Criterion::AtLeast { bound: 1.0 / 3.0, tolerance: SE_BAND * se_e }
    } else {
        Criterion::Descriptive { bound: Some(1.0 / 3.0) }
    };
    let cgrow_shape = 1.0 - (cfg.n as f64).powf(-cfg.c / 4.0);
    vec![
        report("events.maintain", total.maintain, Criterion::Descriptive { bound: Some(1.0) }, se_m),
        report("events.egrow", total.egrow, egrow_criterion, se_e),
        report("events.cgrow", total.cgrow, Criterion::Descriptive { bound: Some(cgrow_shape) }, se_c),
    ]
}

pub fn check_maintain_grow_events(cfg: &ProcessConfig, trials: u64, seed: u64) -> Result<Vec<CheckReport>> {
    let start = Instant::now();
    let runs = growth_ensemble(cfg, trials, seed)?;
    let ms = elapsed_ms(start);
    Ok(event_reports(cfg, &runs, seed).into_iter().map(|r| r.timed(ms)).collect())
}

/// Parameters of an endgame ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameSetup {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub lambda: u128,
    /// Number of disjoint blocks.
    pub count: usize,
    pub t_good: usize,
}

/// One seeded endgame run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameOutcome {
    /// Some `k`-set of the first `k` rows was heavy, so the run started.
    pub conditioned: bool,
    /// The first block's path returned a heavy set covering `[n] \ B`.
    pub path_success: bool,
    /// Every block returned a member.
    pub family_complete: bool,
    pub family_size: usize,
    /// Members are heavy by an independent engine, contain the complement of
    /// their block and have pairwise-disjoint complements.
    pub family_verified: bool,
    /// Each path's `W` never increases and drops by at most one per step.
    pub w_dynamics_ok: bool,
    /// Fraction of the first propagation's children that stayed heavy.
    pub first_retained: Option<f64>,
    pub final_per: Option<String>,
}

fn verify_run(m: &SignMatrix, run: &EndgameRun, lambda: Threshold) -> Result<bool> {
    let mut ok = complements_disjoint(&run.family.members);
    for p in &run.family.paths {
        if let Some(a) = p.result {
            ok &= lambda.admits(permanent_ryser(&m.leading_minor(a))?);
            ok &= p.block.complement().is_subset(a);
        }
    }
    Ok(ok)
}

pub fn endgame_trial(setup: &EndgameSetup, seed: u64, t: u64) -> Result<EndgameOutcome> {
    let lambda = Threshold::from_int(setup.lambda);
    let m = sample_sign_matrix(setup.n, &mut RngStream::new(seed, t))?;
    let Some(perm) = heavy_start_permutation(&m, setup.k, lambda)? else {
        return Ok(EndgameOutcome {
            conditioned: false,
            path_success: false,
            family_complete: false,
            family_size: 0,
            family_verified: true,
            w_dynamics_ok: true,
            first_retained: None,
            final_per: None,
        });
    };
    let m = m.permute_cols(&perm);
    let mut table = MinorTable::new(setup.n, crate::lattice::DEFAULT_LATTICE_CAP)?;
    let run = run_endgame(&mut table, &mut MatrixRows::new(&m), setup.k, lambda, setup.count, setup.l, setup.t_good)?;
    let w_dynamics_ok = run
        .family
        .paths
        .iter()
        .all(|p| p.potentials().windows(2).all(|w| w[1] == w[0] || w[1] + 1 == w[0]));
    let first_retained = run
        .propagations
        .first()
        .filter(|p| !p.children.is_empty())
        .map(|p| p.heavy.len() as f64 / p.children.len() as f64);
    Ok(EndgameOutcome {
        conditioned: true,
        path_success: run.family.paths[0].result.is_some(),
        family_complete: run.family.complete(),
        family_size: run.family.members.len(),
        family_verified: verify_run(&m, &run, lambda)?,
        w_dynamics_ok,
        first_retained,
        final_per: Some(run.final_row.per.to_string()),
    })
}

pub fn endgame_ensemble(setup: &EndgameSetup, trials: u64, seed: u64) -> Result<Vec<EndgameOutcome>> {
    par_trials(trials, |t| endgame_trial(setup, seed, t))
}

/// Thresholds for the endgame reports; absent entries are descriptive.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EndgameBands {
    pub path_success: Option<f64>,
    pub family_complete: Option<f64>,
    pub retained: Option<f64>,
}

/// Minimum retained fraction per propagation step.
pub const RETAINED_FRACTION: f64 = 0.1;

pub fn endgame_reports(setup: &EndgameSetup, runs: &[EndgameOutcome], seed: u64, bands: &EndgameBands) -> Vec<CheckReport> {
    let cond: Vec<&EndgameOutcome> = runs.iter().filter(|r| r.conditioned).collect();
    let c = cond.len() as u64;
    let size = SampleSize::Trials(runs.len() as u64);
    let n = Some(setup.n);
    let frac = |hits: usize, total: u64| if total == 0 { f64::NAN } else { hits as f64 / total as f64 };
    let band = |b: Option<f64>| match b {
        Some(t) => Criterion::AtLeast { bound: t, tolerance: 0.0 },
        None => Criterion::Descriptive { bound: None },
    };
    let path = cond.iter().filter(|r| r.path_success).count();
    let complete = cond.iter().filter(|r| r.family_complete).count();
    let verified = runs.iter().filter(|r| r.family_verified).count();
    let w_ok = runs.iter().filter(|r| r.w_dynamics_ok).count();
    let with_prop: Vec<f64> = cond.iter().filter_map(|r| r.first_retained).collect();
    let retained = with_prop.iter().filter(|&&f| f >= RETAINED_FRACTION).count();
    vec![
        CheckReport::new("endgame.path_success", n, size, Some(seed), frac(path, c), band(bands.path_success))
            .detail("conditioned", c)
            .detail("successes", path as u64),
        CheckReport::new("endgame.family_complete", n, size, Some(seed), frac(complete, c), band(bands.family_complete))
            .detail("conditioned", c)
            .detail("complete", complete as u64)
            .detail("blocks", setup.count as u64),
        CheckReport::new(
            "endgame.family_verified",
            n,
            size,
            Some(seed),
            frac(verified, runs.len() as u64),
            Criterion::AtLeast { bound: 1.0, tolerance: 0.0 },
        ),
        CheckReport::new(
            "endgame.w_dynamics",
            n,
            size,
            Some(seed),
            frac(w_ok, runs.len() as u64),
            Criterion::AtLeast { bound: 1.0, tolerance: 0.0 },
        ),
        CheckReport::new(
            "endgame.propagation_retained",
            n,
            size,
            Some(seed),
            frac(retained, with_prop.len() as u64),
            band(bands.retained),
        )
        .detail("runs_with_propagation", with_prop.len() as u64),
    ]
}
