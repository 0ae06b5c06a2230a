//! Check reports and verdicts.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Recorded without a hard bound.
    Descriptive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Descriptive => "INFO",
        })
    }
}

/// How the headline statistic is judged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// `statistic >= bound - tolerance`.
    AtLeast { bound: f64, tolerance: f64 },
    /// `statistic <= bound + tolerance`.
    AtMost { bound: f64, tolerance: f64 },
    /// `|statistic - expected| <= tolerance`.
    Equals { expected: f64, tolerance: f64 },
    /// `lo <= statistic <= hi`.
    InBand { lo: f64, hi: f64 },
    /// No verdict; `bound` records the shape of the claim when there is one.
    Descriptive { bound: Option<f64> },
}

impl Criterion {
    pub fn judge(&self, statistic: f64) -> Verdict {
        let ok = match *self {
            Criterion::AtLeast { bound, tolerance } => statistic >= bound - tolerance,
            Criterion::AtMost { bound, tolerance } => statistic <= bound + tolerance,
            Criterion::Equals { expected, tolerance } => (statistic - expected).abs() <= tolerance,
            Criterion::InBand { lo, hi } => lo <= statistic && statistic <= hi,
            Criterion::Descriptive { .. } => return Verdict::Descriptive,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn tolerance(&self) -> f64 {
        match *self {
            Criterion::AtLeast { tolerance, .. }
            | Criterion::AtMost { tolerance, .. }
            | Criterion::Equals { tolerance, .. } => tolerance,
            Criterion::InBand { .. } | Criterion::Descriptive { .. } => 0.0,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Criterion::AtLeast { bound, tolerance } => write!(f, ">= {bound:.6} - {tolerance:.3e}"),
            Criterion::AtMost { bound, tolerance } => write!(f, "<= {bound:.6} + {tolerance:.3e}"),
            Criterion::Equals { expected, tolerance } => write!(f, "= {expected:.6} ± {tolerance:.3e}"),
            Criterion::InBand { lo, hi } => write!(f, "in [{lo:.6}, {hi:.6}]"),
            Criterion::Descriptive { bound: Some(b) } => write!(f, "(bound shape {b:.6})"),
            Criterion::Descriptive { bound: None } => f.write_str("(descriptive)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSize {
    Trials(u64),
    Exact(ExactTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactTag {
    Exact,
}

impl SampleSize {
    pub const EXACT: SampleSize = SampleSize::Exact(ExactTag::Exact);

    pub fn is_exact(self) -> bool {
        matches!(self, SampleSize::Exact(_))
    }
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSize::Trials(t) => write!(f, "{t}"),
            SampleSize::Exact(_) => f.write_str("exact"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub n: Option<usize>,
    pub sample_size: SampleSize,
    pub seed: Option<u64>,
    pub statistic: f64,
    pub criterion: Criterion,
    pub verdict: Verdict,
    #[serde(default)]
    pub details: BTreeMap<String, Value>,
    pub runtime_ms: u64,
}

impl CheckReport {
    /// Builds a report; the verdict is derived from the statistic and criterion.
    pub fn new(name: impl Into<String>, n: Option<usize>, sample_size: SampleSize, seed: Option<u64>, statistic: f64, criterion: Criterion) -> Self {
        let criterion = if sample_size.is_exact() { exact_criterion(criterion) } else { criterion };
        let verdict = criterion.judge(statistic);
        Self { name: name.into(), n, sample_size, seed, statistic, criterion, verdict, details: BTreeMap::new(), runtime_ms: 0 }
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn timed(mut self, ms: u64) -> Self {
        self.runtime_ms = ms;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// One line for the summary table.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<5} {:<34} n={:<3} {:>8}  stat={:.6}  {}",
            self.verdict,
            self.name,
            self.n.map_or("-".to_string(), |n| n.to_string()),
            self.sample_size.to_string(),
            self.statistic,
            self.criterion
        )
    }
}

/// Exact reports carry no statistical slack.
fn exact_criterion(c: Criterion) -> Criterion {
    match c {
        Criterion::AtLeast { bound, .. } => Criterion::AtLeast { bound, tolerance: 0.0 },
        Criterion::AtMost { bound, .. } => Criterion::AtMost { bound, tolerance: 0.0 },
        Criterion::Equals { expected, .. } => Criterion::Equals { expected, tolerance: 0.0 },
        other => other,
    }
}
