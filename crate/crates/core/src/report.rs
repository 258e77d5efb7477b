//! Verification reports: one record per check, serializable to JSON.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A search budget or size cap was hit before an answer.
    Exhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Exhausted => "EXHAUSTED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub expected: String,
    pub observed: String,
    pub status: Status,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    pub records: Vec<CheckRecord>,
    pub status: Status,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        VerificationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            suite: suite.to_string(),
            seed,
            params: BTreeMap::new(),
            records: vec![],
            status: Status::Pass,
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    /// Sorts records by id and recomputes the overall status: any failure
    /// fails the report, otherwise any exhausted check marks it exhausted.
    pub fn finish(mut self) -> Self {
        self.records.sort_by(|a, b| a.id.cmp(&b.id));
        self.status = overall(self.records.iter().map(|r| r.status));
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status != Status::Pass)
    }

    /// 0 pass, 1 failed check, 3 exhausted budget or cap.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Exhausted => 3,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// One line per record and a closing status line.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "{:<9} {}  expected {}  observed {}  ({:.1} ms)\n",
                r.status.to_string(),
                r.id,
                r.expected,
                r.observed,
                r.wall_ms
            ));
        }
        out.push_str(&format!(
            "suite {}: {} ({} checks, {} not passing)\n",
            self.suite,
            self.status,
            self.records.len(),
            self.failures().count()
        ));
        out
    }
}

pub fn overall(statuses: impl IntoIterator<Item = Status>) -> Status {
    let mut out = Status::Pass;
    for s in statuses {
        match s {
            Status::Fail => return Status::Fail,
            Status::Exhausted => out = Status::Exhausted,
            Status::Pass => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, status: Status) -> CheckRecord {
        CheckRecord {
            id: id.into(),
            params: BTreeMap::new(),
            expected: "x".into(),
            observed: "x".into(),
            status,
            wall_ms: 0.0,
        }
    }

    #[test]
    fn status_and_order() {
        let mut r = VerificationReport::new("demo", 1);
        r.push(rec("b", Status::Pass));
        r.push(rec("a", Status::Exhausted));
        let r = r.finish();
        assert_eq!(r.records[0].id, "a");
        assert_eq!(r.status, Status::Exhausted);
        assert_eq!(r.exit_code(), 3);
        let mut r2 = r.clone();
        r2.push(rec("c", Status::Fail));
        assert_eq!(r2.finish().exit_code(), 1);
        assert_eq!(VerificationReport::from_json_str(&r.to_json_string()).unwrap(), r);
    }
}
