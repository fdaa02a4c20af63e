//! Check records and the JSON report.

use std::time::Instant;

use polycone::{Error, C64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigEcho, SuiteConfig};

/// Outcome of a single named check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One check inside a suite report.  `worst_value` is the extremal
/// statistic the check gates on (maximal residual, minimal margin, ...)
/// and `worst_witness` reproduces the inputs that attained it.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub worst_value: Option<f64>,
    pub worst_witness: Option<Value>,
    pub elapsed_ms: u64,
}

/// Full report of a run; schema version 1.
#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub tool_version: String,
    pub suite: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    /// Sorts the checks by name and derives the overall verdict (skipped
    /// checks do not fail the run).
    pub fn new(cfg: &SuiteConfig, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = checks.iter().all(|c| c.status != Status::Fail);
        SuiteReport {
            schema: 1,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            suite: cfg.suite.as_str().to_string(),
            seed: cfg.seed,
            config: cfg.echo(),
            pass,
            checks,
        }
    }
}

/// Body of a check before timing is attached.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub status: Status,
    pub worst_value: Option<f64>,
    pub worst_witness: Option<Value>,
}

impl CheckOutcome {
    /// Pass/fail on `ok`, keeping the extremal value and its witness
    /// either way.
    pub fn gate(ok: bool, worst: f64, witness: Value) -> Self {
        CheckOutcome {
            status: if ok { Status::Pass } else { Status::Fail },
            worst_value: Some(worst),
            worst_witness: Some(witness),
        }
    }

    /// Pass/fail on `ok` with no sampled witness (exact checks).
    pub fn gate_exact(ok: bool) -> Self {
        CheckOutcome {
            status: if ok { Status::Pass } else { Status::Fail },
            worst_value: None,
            worst_witness: None,
        }
    }

    pub fn skip(reason: &str) -> Self {
        CheckOutcome {
            status: Status::Skip,
            worst_value: None,
            worst_witness: Some(json!({ "reason": reason })),
        }
    }
}

/// Finalizes a check whose work started at `start`, converting library
/// errors into failing records.
pub fn finish_check(
    name: &str,
    start: Instant,
    outcome: Result<CheckOutcome, Error>,
) -> CheckRecord {
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => CheckOutcome {
            status: Status::Fail,
            worst_value: None,
            worst_witness: Some(json!({ "error": e.to_string() })),
        },
    };
    CheckRecord {
        name: name.to_string(),
        status: outcome.status,
        worst_value: outcome.worst_value,
        worst_witness: outcome.worst_witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Runs one check body, timing it and converting library errors into
/// failing records.
pub fn run_check<F>(name: &str, body: F) -> CheckRecord
where
    F: FnOnce() -> Result<CheckOutcome, Error>,
{
    let start = Instant::now();
    let outcome = body();
    finish_check(name, start, outcome)
}

/// JSON view of a complex vector as parallel re/im arrays.
pub fn cvec_json(v: &[C64]) -> Value {
    json!({
        "re": v.iter().map(|c| c.re).collect::<Vec<_>>(),
        "im": v.iter().map(|c| c.im).collect::<Vec<_>>(),
    })
}
