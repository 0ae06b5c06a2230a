use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;

use permlab::engines::{determinant_exact, permanent_mod, permanent_naive, permanent_ryser};
use permlab::lattice::{MinorTable, DEFAULT_LATTICE_CAP};
use permlab::verify::process::{endgame_ensemble, EndgameSetup};
use permlab::verify::suite::{run_check, SuiteOptions};
use permlab::verify::Verdict;
use permlab::{run_growth, sample_sign_matrix, ProcessConfig, RngStream, SignMatrix, StepType};

use crate::manifest::RunManifest;

/// Largest `n` for sampled ensembles.
const ENSEMBLE_MAX_N: usize = 22;

pub enum EngineChoice {
    Naive,
    Ryser,
    Lattice,
}

pub fn load_matrix(file: Option<&Path>, random: Option<usize>, seed: u64) -> Result<SignMatrix> {
    match (file, random) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SignMatrix::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
        }
        (None, Some(n)) => Ok(sample_sign_matrix(n, &mut RngStream::new(seed, 0))?),
        (None, None) => bail!("give a matrix file or --random N"),
    }
}

pub fn compute(m: &SignMatrix, engine: EngineChoice, modulus: Option<u64>, det: bool, cap: Option<usize>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if let Some(q) = modulus {
        out.push(permanent_mod(m, q)?.to_string());
    } else {
        let per = match engine {
            EngineChoice::Naive => permanent_naive(m)?,
            EngineChoice::Ryser => permanent_ryser(m)?,
            EngineChoice::Lattice => {
                let mut t = MinorTable::new(m.n(), cap.unwrap_or(DEFAULT_LATTICE_CAP))?;
                for row in m.rows() {
                    t.push_row(row)?;
                }
                t.value(permlab::ColumnSet::full(m.n())?)?
            }
        };
        out.push(per.to_string());
    }
    if det {
        out.push(determinant_exact(m)?.to_string());
    }
    Ok(out)
}

pub fn lattice_csv(m: &SignMatrix, rows: Option<usize>) -> Result<String> {
    let k = rows.unwrap_or(m.n());
    if k > m.n() {
        bail!("--rows {k} exceeds n = {}", m.n());
    }
    let mut t = MinorTable::new(m.n(), DEFAULT_LATTICE_CAP)?;
    for i in 0..k {
        t.push_row(m.row(i))?;
    }
    Ok(t.dump_csv()?)
}

pub struct GrowthSummary {
    pub successes: u64,
}

pub fn growth(cfg: &ProcessConfig, trials: u64, seed: u64, out: &Path) -> Result<GrowthSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let traces = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rows = permlab::RandomRows::new(cfg.n, RngStream::new(seed, t));
            run_growth(&mut rows, cfg)
        })
        .collect::<permlab::Result<Vec<_>>>()?;

    let mut summary = String::from("trial,successful,N_k1,W_k1,I,II,III,IV,V\n");
    let mut outputs = Vec::new();
    for (t, trace) in traces.iter().enumerate() {
        let path = out.join(format!("trace_{t:04}.jsonl"));
        let mut body = serde_json::to_string(&json!({ "header": { "config": cfg, "seed": seed, "trial": t } }))?;
        body.push('\n');
        for r in &trace.records {
            body.push_str(&serde_json::to_string(r)?);
            body.push('\n');
        }
        std::fs::write(&path, body)?;
        outputs.push(path);
        let last = trace.last();
        let c = trace.type_counts();
        writeln!(summary, "{t},{},{},{},{},{},{},{},{}", trace.successful, last.n_k, last.w_k, c[0], c[1], c[2], c[3], c[4])?;
    }
    let summary_path = out.join("summary.csv");
    std::fs::write(&summary_path, summary)?;
    outputs.push(summary_path);
    let types: Vec<String> = StepType::ALL.iter().map(|t| t.to_string()).collect();
    RunManifest::new("growth", json!({ "process": cfg, "trials": trials, "type_columns": types }), seed, outputs)
        .write(&out.join("manifest.json"))?;
    Ok(GrowthSummary { successes: traces.iter().filter(|t| t.successful).count() as u64 })
}

pub fn endgame(setup: &EndgameSetup, trials: u64, seed: u64, out: &Path) -> Result<u64> {
    let runs = endgame_ensemble(setup, trials, seed)?;
    let mut body = String::new();
    for (t, r) in runs.iter().enumerate() {
        body.push_str(&serde_json::to_string(&json!({ "trial": t, "outcome": r }))?);
        body.push('\n');
    }
    std::fs::write(out, body)?;
    let manifest = out.with_extension("manifest.json");
    RunManifest::new("endgame", json!({ "setup": setup, "trials": trials }), seed, vec![out.to_path_buf()]).write(&manifest)?;
    Ok(runs.iter().filter(|r| r.path_success).count() as u64)
}

pub fn verify(suite: &str, opts: &SuiteOptions, out: Option<&Path>) -> Result<bool> {
    let reports = run_check(suite, opts)?;
    let mut lines = String::new();
    for r in &reports {
        lines.push_str(&serde_json::to_string(r)?);
        lines.push('\n');
    }
    match out {
        Some(p) => std::fs::write(p, lines)?,
        None => std::io::stdout().write_all(lines.as_bytes())?,
    }
    let mut err = std::io::stderr().lock();
    for r in &reports {
        writeln!(err, "{}", r.summary_line())?;
    }
    let failed = reports.iter().filter(|r| r.verdict == Verdict::Fail).count();
    writeln!(err, "{} checks, {failed} failed", reports.len())?;
    Ok(failed == 0)
}

fn log_abs(v: i128) -> String {
    if v == 0 {
        "ZERO".to_string()
    } else {
        format!("{:.9}", (v.unsigned_abs() as f64).ln())
    }
}

pub fn ensemble(n_list: &[usize], trials: u64, seed: u64, out: &Path) -> Result<()> {
    if let Some(&n) = n_list.iter().find(|&&n| n == 0 || n > ENSEMBLE_MAX_N) {
        bail!("n = {n} is outside 1..={ENSEMBLE_MAX_N}");
    }
    let mut csv = String::from("n,trial,per_abs_log,det_abs_log\n");
    for &n in n_list {
        let rows = (0..trials)
            .into_par_iter()
            .map(|t| {
                let m = sample_sign_matrix(n, &mut RngStream::new(seed, (n as u64) << 32 | t))?;
                Ok((permanent_ryser(&m)?, determinant_exact(&m)?))
            })
            .collect::<permlab::Result<Vec<_>>>()?;
        for (t, (per, det)) in rows.into_iter().enumerate() {
            writeln!(csv, "{n},{t},{},{}", log_abs(per), log_abs(det))?;
        }
    }
    std::fs::write(out, csv)?;
    RunManifest::new("ensemble", json!({ "n_list": n_list, "trials": trials }), seed, vec![out.to_path_buf()])
        .write(&out.with_extension("manifest.json"))?;
    Ok(())
}
