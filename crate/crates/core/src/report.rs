//! Structured check records and the report envelope serialised by the CLI.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Outcome of one check. Estimates never fail a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Estimate,
}

/// One named check with its values, slacks and witnesses. Maps are ordered
/// so serialisation is byte-stable for a fixed seed and config.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    pub values: BTreeMap<String, Value>,
    pub slacks: BTreeMap<String, Value>,
    pub witnesses: BTreeMap<String, Value>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, status: CheckStatus) -> Self {
        CheckRecord {
            name: name.into(),
            status,
            values: BTreeMap::new(),
            slacks: BTreeMap::new(),
            witnesses: BTreeMap::new(),
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        CheckRecord::new(name, CheckStatus::Pass)
    }

    pub fn fail(name: impl Into<String>) -> Self {
        CheckRecord::new(name, CheckStatus::Fail)
    }

    pub fn estimate(name: impl Into<String>) -> Self {
        CheckRecord::new(name, CheckStatus::Estimate)
    }

    pub fn from_bool(name: impl Into<String>, ok: bool) -> Self {
        if ok {
            CheckRecord::pass(name)
        } else {
            CheckRecord::fail(name)
        }
    }

    pub fn value(mut self, key: impl Into<String>, v: f64) -> Self {
        self.values.insert(key.into(), number(v));
        self
    }

    pub fn value_json(mut self, key: impl Into<String>, v: Value) -> Self {
        self.values.insert(key.into(), v);
        self
    }

    pub fn slack(mut self, key: impl Into<String>, v: f64) -> Self {
        self.slacks.insert(key.into(), number(v));
        self
    }

    pub fn witness(mut self, key: impl Into<String>, v: Value) -> Self {
        self.witnesses.insert(key.into(), v);
        self
    }
}

/// JSON cannot carry IEEE infinities in numbers; report values fall back to
/// the strings `"inf"` / `"-inf"` so nothing is silently dropped.
pub fn number(v: f64) -> Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// Top-level report document.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub tool_version: String,
    /// Echo of the resolved run configuration.
    pub config: Value,
    /// Populated only on request; omitted by default so identical
    /// `(config, seed)` runs are byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    pub checks: Vec<CheckRecord>,
}

impl ReportEnvelope {
    pub fn new(config: Value) -> Self {
        ReportEnvelope {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            wall_time_ms: None,
            checks: Vec::new(),
        }
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_serialise_as_strings() {
        let r = CheckRecord::pass("c").value("v", f64::INFINITY);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"inf\""));
    }

    #[test]
    fn envelope_flags_failures() {
        let mut env = ReportEnvelope::new(serde_json::json!({}));
        env.checks.push(CheckRecord::pass("a"));
        assert!(!env.any_failed());
        env.checks.push(CheckRecord::fail("b"));
        assert!(env.any_failed());
    }
}
