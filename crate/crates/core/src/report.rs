//! Structured pass/fail records for the verification suites.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub entries: Vec<ReportEntry>,
    /// Discrepancies surfaced without being counted as failures.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport { suite: suite.into(), params: BTreeMap::new(), entries: Vec::new(), notes: Vec::new() }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Records an outcome; `witness` must be `Some` exactly when `ok` is false.
    pub fn record(&mut self, id: impl Into<String>, anchor: &str, ok: bool, witness: Option<String>, started: Instant) {
        let witness = if ok { None } else { Some(witness.unwrap_or_else(|| "no witness recorded".into())) };
        self.entries.push(ReportEntry {
            id: id.into(),
            anchor: anchor.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness,
            wall_ms: started.elapsed().as_millis() as u64,
        });
    }

    /// Runs `f`, which yields `Ok(())` or `Err(witness)`, and records it.
    pub fn check(&mut self, id: impl Into<String>, anchor: &str, f: impl FnOnce() -> Result<(), String>) -> bool {
        let t = Instant::now();
        let r = f();
        let ok = r.is_ok();
        self.record(id, anchor, ok, r.err(), t);
        ok
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for n in &other.notes {
            self.notes.push(format!("{}: {}", other.suite, n));
        }
        for mut e in other.entries {
            e.id = format!("{}/{}", other.suite, e.id);
            self.entries.push(e);
        }
    }

    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.status == Status::Pass).count()
    }

    pub fn failed(&self) -> usize {
        self.entries.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    /// Canonical JSON: sorted keys, summary counts included.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("schema_version".into(), REPORT_SCHEMA_VERSION.into());
            map.insert(
                "summary".into(),
                serde_json::json!({ "passed": self.passed(), "failed": self.failed(), "total": self.entries.len() }),
            );
        }
        sort_keys(v)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} ", self.suite);
        let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        out.push_str(&ps.join(" "));
        out.push('\n');
        for e in &self.entries {
            let s = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            out.push_str(&format!("  {} {} [{}]", s, e.id, e.anchor));
            if let Some(w) = &e.witness {
                out.push_str(&format!(" witness: {}", w));
            }
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&format!("  NOTE {}\n", n));
        }
        out.push_str(&format!("  {} passed, {} failed\n", self.passed(), self.failed()));
        out
    }
}

/// Recursively rebuilds objects with keys in sorted order.
pub fn sort_keys(v: serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(map) => {
            let sorted: BTreeMap<String, serde_json::Value> = map.into_iter().map(|(k, v)| (k, sort_keys(v))).collect();
            serde_json::Value::Object(sorted.into_iter().collect())
        }
        serde_json::Value::Array(a) => serde_json::Value::Array(a.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_iff_fail() {
        let mut r = VerificationReport::new("t");
        r.check("a", "anchor", || Ok(()));
        r.check("b", "anchor", || Err("x != y".into()));
        assert!(r.entries[0].witness.is_none());
        assert_eq!(r.entries[1].witness.as_deref(), Some("x != y"));
        assert_eq!((r.passed(), r.failed()), (1, 1));
        let j = r.to_json();
        assert_eq!(j["summary"]["failed"], 1);
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
