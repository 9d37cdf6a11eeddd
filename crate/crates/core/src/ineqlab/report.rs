//! Report types emitted by the check runner.

use serde::Serialize;

/// One CSV row: a single (family member, parameter tuple) evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub check_id: String,
    pub space: String,
    pub family: String,
    pub member: String,
    pub param: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Outcome of one check: the summary over its sweep.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub space: String,
    pub family: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub constant_estimate: f64,
    pub pass: bool,
    /// Relative change of the constant under 2x grid refinement
    /// (constant-bearing checks; 0 for constant-free ones).
    pub refinement_drift: f64,
}

/// Full result of a check run: summary plus per-tuple rows.
#[derive(Debug, Clone)]
pub struct CheckRun {
    pub report: CheckReport,
    pub rows: Vec<CheckRow>,
}

pub(crate) const CSV_HEADER: &str = "check_id,space,family,member,param,lhs,rhs,ratio";

pub fn rows_to_csv(rows: &[CheckRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.12e},{:.12e},{:.12e}\n",
            r.check_id, r.space, r.family, r.member, r.param, r.lhs, r.rhs, r.ratio
        ));
    }
    out
}

/// JSON summary document keyed by check id.
#[derive(Debug, Clone, Serialize)]
pub struct LabSummary {
    pub schema_version: u32,
    pub space: String,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl LabSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
