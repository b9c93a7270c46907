//! Verification reports shared by every suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub detail: String,
    /// Set for properties whose truth depends on a sign convention we chose
    /// rather than on the structure itself.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub convention_dependent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub space: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, space: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            space: space.into(),
            status: Status::Pass,
            checks: Vec::new(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, id: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.push_check(Check {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            convention_dependent: false,
        });
    }

    pub fn push_check(&mut self, check: Check) {
        if check.status == Status::Fail {
            self.status = Status::Fail;
        }
        self.checks.push(check);
    }

    /// Appends another report's checks, prefixing their ids with its suite.
    pub fn absorb(&mut self, other: VerificationReport) {
        for mut c in other.checks {
            c.id = format!("{}.{}", other.suite, c.id);
            self.push_check(c);
        }
        for (k, v) in other.parameters {
            self.parameters.entry(k).or_insert(v);
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// True when `status` agrees with the individual checks (relevant for
    /// reports read back from JSON).
    pub fn is_consistent(&self) -> bool {
        let any_failed = self.checks.iter().any(|c| c.status == Status::Fail);
        any_failed == (self.status == Status::Fail)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} on {}", self.suite, self.space)?;
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            let conv = if c.convention_dependent {
                " [convention]"
            } else {
                ""
            };
            writeln!(f, "  {tag} {}{conv}: {}", c.id, c.detail)?;
        }
        let overall = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{overall} ({} checks)", self.checks.len())
    }
}
