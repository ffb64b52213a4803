//! Verification report structures: one record per checked case, plus a
//! summary. Reports are plain serde data with a stable JSON schema and no
//! timestamps, so a suite run is reproducible byte for byte at a fixed
//! seed and config.

use serde::{Deserialize, Serialize};

use crate::atoms::BoundCheck;
use crate::error::{Error, Result};

/// One checked inequality `lhs <= rhs (+ slack)`. Expected-error cases are
/// encoded with `lhs = 0, rhs = 0, pass` set by whether the expected error
/// arrived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    /// Unique within the report: `op/index`.
    pub id: String,
    /// The operation or property the case exercises.
    pub op: String,
    /// Measured left side.
    pub lhs: f64,
    /// Bounding right side (before slack).
    pub rhs: f64,
    /// Distance from the left side to the pass boundary; negative when the
    /// case failed.
    pub margin: f64,
    pub pass: bool,
    /// Seed of this case's private RNG stream.
    pub seed: u64,
    /// Per-axis grid resolution the case ran at; empty for gridless cases.
    pub resolution: Vec<usize>,
}

impl CaseRecord {
    /// Builds a record, replacing non-finite measurements with `f64::MAX`
    /// and a failed status so the report stays serializable as JSON.
    pub fn new(
        id: String,
        op: &str,
        lhs: f64,
        rhs: f64,
        margin: f64,
        pass: bool,
        seed: u64,
        resolution: Vec<usize>,
    ) -> CaseRecord {
        let finite = lhs.is_finite() && rhs.is_finite() && margin.is_finite();
        CaseRecord {
            id,
            op: op.to_string(),
            lhs: if lhs.is_finite() { lhs } else { f64::MAX },
            rhs: if rhs.is_finite() { rhs } else { f64::MAX },
            margin: if margin.is_finite() { margin } else { -f64::MAX },
            pass: pass && finite,
            seed,
            resolution,
        }
    }

    /// Record of an already-evaluated bound check.
    pub fn from_check(
        id: String,
        op: &str,
        check: &BoundCheck,
        seed: u64,
        resolution: Vec<usize>,
    ) -> CaseRecord {
        CaseRecord::new(
            id,
            op,
            check.lhs,
            check.rhs,
            check.margin(),
            check.pass,
            seed,
            resolution,
        )
    }

    /// Record of a case that must produce a specific error to pass.
    pub fn from_expected_error(
        id: String,
        op: &str,
        arrived: bool,
        seed: u64,
        resolution: Vec<usize>,
    ) -> CaseRecord {
        CaseRecord::new(id, op, 0.0, 0.0, 0.0, arrived, seed, resolution)
    }

    /// Scale-free violation size: zero when passing, otherwise the excess
    /// of `lhs` over `rhs` relative to the larger of the two.
    pub fn violation(&self) -> f64 {
        if self.pass {
            return 0.0;
        }
        let scale = self.lhs.abs().max(self.rhs.abs()).max(f64::MIN_POSITIVE);
        ((self.lhs - self.rhs) / scale).max(0.0)
    }
}

/// Aggregate over all cases of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub failed: usize,
    /// Largest [`CaseRecord::violation`] across the cases.
    pub max_violation: f64,
}

/// A full suite run: which suite, under which seed and config, and every
/// case it checked, ordered by case id construction order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub config_digest: String,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: &str, seed: u64, config_digest: String, cases: Vec<CaseRecord>) -> Report {
        let failed = cases.iter().filter(|c| !c.pass).count();
        let max_violation = cases.iter().map(|c| c.violation()).fold(0.0, f64::max);
        Report {
            suite: suite.to_string(),
            seed,
            config_digest,
            cases: cases.clone(),
            summary: Summary {
                total: cases.len(),
                failed,
                max_violation,
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Number of distinct operations covered.
    pub fn op_count(&self) -> usize {
        let mut ops: Vec<&str> = self.cases.iter().map(|c| c.op.as_str()).collect();
        ops.sort_unstable();
        ops.dedup();
        ops.len()
    }

    /// Stable pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("report: {e}")))
    }
}
