//! Golden trace for n = 16, seed 0, default configuration.
//!
//! The reference below recomputes every minor with Ryser directly from the
//! matrix and never touches the lattice. Set `PERMLAB_REGEN_FIXTURES=1` to
//! rewrite the fixture from the reference.

use std::path::PathBuf;

use permlab::growth::count_target;
use permlab::{permanent_ryser, run_growth, MatrixRows, ProcessConfig, RandomRows, RngStream, SignMatrix, StepType};
use serde::{Deserialize, Serialize};

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct GoldenRecord {
    k: usize,
    #[serde(rename = "N_k")]
    n_k: u64,
    true_heavy_count: u64,
    lambda_k: f64,
    #[serde(rename = "W_k")]
    w_k: f64,
    step_type: Option<StepType>,
}

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/growth_n16_seed0.jsonl")
}

fn matrix() -> SignMatrix {
    permlab::sample_sign_matrix(16, &mut RngStream::new(0, 0)).unwrap()
}

/// `|Per|` of every `k`-subset of columns against the first `k` rows, in mask order.
fn level(m: &SignMatrix, k: usize) -> Vec<(u64, i128)> {
    let n = m.n();
    let rows: Vec<usize> = (0..k).collect();
    (0u64..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| {
            let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            (mask, permanent_ryser(&m.submatrix(&rows, &cols).unwrap()).unwrap().abs())
        })
        .collect()
}

fn reference(m: &SignMatrix, cfg: &ProcessConfig) -> Vec<GoldenRecord> {
    let n = cfg.n;
    let nf = n as f64;
    let big_k = ((cfg.eps / 8.0 * nf.powf(1.0 - cfg.c)).floor() as u64).max(1);
    let heavy = |lv: &[(u64, i128)], lambda: f64| lv.iter().filter(|(_, p)| *p as f64 >= lambda).count() as u64;

    let mut out = Vec::new();
    let mut current = level(m, cfg.k0);
    let mut n_k = u64::from(heavy(&current, 1.0) > 0);
    let mut lambda = 1.0;
    let mut w = 0.0;
    for k in cfg.k0..=cfg.k1 {
        let mut rec = GoldenRecord { k, n_k, true_heavy_count: heavy(&current, lambda), lambda_k: lambda, w_k: w, step_type: None };
        if k == cfg.k1 {
            out.push(rec);
            break;
        }
        let next = level(m, k + 1);
        if n_k > 0 {
            let family: Vec<u64> =
                current.iter().filter(|(_, p)| *p as f64 >= lambda).take(n_k as usize).map(|(a, _)| *a).collect();
            let parents = |child: u64| family.iter().filter(|a| *a & child == **a).count() as u64;
            let children: Vec<u64> = next.iter().map(|(b, _)| parents(*b)).collect();
            let low: u64 = children.iter().filter(|&&c| c >= 1 && c <= big_k).count() as u64;
            let high: u64 = children.iter().filter(|&&c| c > big_k).count() as u64;
            let nn = n_k as f64;
            let prime = low as f64 * 2.0 * big_k as f64 >= cfg.eps * nf * nn;
            let high_ok = high as f64 * 2.0 >= cfg.eps * nn;
            let grown = lambda * nf.powf(0.5 - cfg.eps);
            let at_lambda = heavy(&next, lambda);
            let at_grown = heavy(&next, grown.ceil());
            let grow = count_target(nf.powf(cfg.eps) / 4.0 * nn);
            let keep = count_target(cfg.eps * nn / 6.0);
            let shrink = count_target(cfg.eps_prime * nn);
            let t = if prime && at_lambda >= grow {
                StepType::I
            } else if prime && at_lambda >= keep {
                StepType::II
            } else if !prime && high_ok && at_grown >= shrink {
                StepType::III
            } else if !prime && high_ok && at_lambda >= keep {
                StepType::IV
            } else {
                StepType::V
            };
            w += (1.0 - cfg.eps / 2.0)
                - match t {
                    StepType::I => 3.0,
                    StepType::III => 1.0,
                    _ => 0.0,
                };
            (n_k, lambda) = match t {
                StepType::I => (grow, lambda),
                StepType::II | StepType::IV => (shrink, lambda),
                StepType::III => (shrink, grown),
                StepType::V => (0, lambda),
            };
            rec.step_type = Some(t);
        }
        out.push(rec);
        current = next;
    }
    out
}

fn to_jsonl(records: &[GoldenRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}

fn from_library(cfg: &ProcessConfig, source: &mut dyn permlab::RowSource) -> Vec<GoldenRecord> {
    run_growth(source, cfg)
        .unwrap()
        .records
        .into_iter()
        .map(|r| GoldenRecord {
            k: r.k,
            n_k: r.n_k,
            true_heavy_count: r.true_heavy_count,
            lambda_k: r.lambda_k,
            w_k: r.w_k,
            step_type: r.step_type,
        })
        .collect()
}

#[test]
fn growth_trace_matches_golden_fixture() {
    let cfg = ProcessConfig::new(16);
    let m = matrix();
    let expected = reference(&m, &cfg);
    if std::env::var_os("PERMLAB_REGEN_FIXTURES").is_some() {
        std::fs::write(fixture_path(), to_jsonl(&expected)).unwrap();
    }
    let committed = std::fs::read_to_string(fixture_path()).expect("fixture present");
    assert_eq!(to_jsonl(&expected), committed, "reference drifted from the committed fixture");

    assert_eq!(from_library(&cfg, &mut MatrixRows::new(&m)), expected);
    assert_eq!(from_library(&cfg, &mut RandomRows::new(16, RngStream::new(0, 0))), expected);
}

#[test]
fn golden_trace_shape() {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    let recs: Vec<GoldenRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.first().unwrap().k, 4);
    assert_eq!(recs.last().unwrap().k, 12);
    assert!(recs.last().unwrap().step_type.is_none());
    assert!(recs.iter().all(|r| r.n_k <= r.true_heavy_count));
}
