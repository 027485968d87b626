//! Machine-readable verdicts. The JSON layout is fixed: top-level keys
//! version / environment / checks / totals in that order, map-valued fields
//! serialized with sorted keys, and `duration_ms` zeroed unless timings were
//! requested — so two runs of the same config are byte-identical.

use serde::Serialize;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub p: Vec<u64>,
    pub truncation: u32,
    pub budget: u64,
    pub workers: u64,
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SkippedBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: serde_json::Value,
    pub verdict: Verdict,
    pub observed: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub pass: u64,
    pub fail: u64,
    pub skipped: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub environment: Environment,
    pub checks: Vec<CheckReport>,
    pub totals: Totals,
}

impl RunReport {
    pub fn new(environment: Environment, checks: Vec<CheckReport>) -> Self {
        let totals = Totals {
            pass: checks.iter().filter(|c| c.verdict == Verdict::Pass).count() as u64,
            fail: checks.iter().filter(|c| c.verdict == Verdict::Fail).count() as u64,
            skipped: checks
                .iter()
                .filter(|c| c.verdict == Verdict::SkippedBudget)
                .count() as u64,
        };
        RunReport {
            version: REPORT_VERSION,
            environment,
            checks,
            totals,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.totals.fail == 0 && self.totals.skipped == 0
    }

    /// Stable pretty JSON (struct fields in declaration order, maps sorted).
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Helper for building `observed` objects with deterministic key order.
pub fn observed(pairs: &[(&str, serde_json::Value)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    let mut sorted: Vec<_> = pairs.to_vec();
    sorted.sort_by_key(|(k, _)| k.to_string());
    for (k, v) in sorted {
        map.insert(k.to_string(), v);
    }
    serde_json::Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_deterministic() {
        let env = Environment {
            p: vec![3],
            truncation: 2,
            budget: 10_000_000,
            workers: 0,
            timings: false,
        };
        let mk = || {
            RunReport::new(
                env.clone(),
                vec![CheckReport {
                    name: "x".into(),
                    params: observed(&[("p", 3.into()), ("m", 1.into())]),
                    verdict: Verdict::Pass,
                    observed: observed(&[("b", 1.into()), ("a", 2.into())]),
                    witness: None,
                    duration_ms: 0,
                }],
            )
            .to_json()
        };
        assert_eq!(mk(), mk());
        assert!(mk().contains("\"verdict\": \"pass\""));
        // sorted map keys
        let j = mk();
        assert!(j.find("\"a\"").unwrap() < j.find("\"b\"").unwrap());
    }
}
