//! Machine-readable run reports.
//!
//! A report splits into a deterministic `body` (config echo, verdict,
//! counterexamples, counters) and a volatile `meta` section (wall time,
//! worker count). Reruns with the same config and seed reproduce the body
//! byte for byte at any worker count; everything volatile lives in `meta`.
//! The shipped JSON schema is `schema/report.schema.json`.

use serde::Serialize;

pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Echo of the effective configuration, excluding anything volatile.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct ConfigEcho {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
}

/// Counters; commands fill what applies to them.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Statistics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups_checked: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements_scanned: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_checked: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutators: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses_found: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas_visited: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard_true_alphas: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_member_sets: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_groups: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triples_checked: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disagreements: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_sizes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift_targets: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifts_succeeded: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backtracks: Option<u64>,
}

/// A concrete, re-verifiable falsifying datum.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// A commutator `gamma` with a cyclic generator `delta` that is not a
    /// commutator (matrices as row-major entries).
    HondaPair {
        group: String,
        gamma: Vec<u64>,
        delta: Vec<u64>,
    },
    StrongHondaPair {
        group: String,
        a: Vec<u64>,
        b: Vec<u64>,
        delta: Vec<u64>,
    },
    /// A parameter tuple plus the commutator power missing a witness.
    Alpha {
        alpha: Vec<u64>,
        gamma: Vec<u64>,
        delta: Vec<u64>,
    },
    /// The two guard evaluators disagreed on one tuple.
    GuardDisagreement {
        alpha: Vec<u64>,
        formula_verdict: bool,
        semantic_verdict: bool,
    },
    /// A lift target with no full trace.
    LiftFailure { delta_index: u64, level: u64 },
    /// A report-level consistency violation, described in text.
    Inconsistency { detail: String },
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportBody {
    pub tool_version: String,
    pub config: ConfigEcho,
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
    pub statistics: Statistics,
    /// Per-item results for multi-target commands (corpus sweeps, lifts).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<ReportItem>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportItem {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportMeta {
    pub wall_time_ms: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub body: ReportBody,
    pub meta: ReportMeta,
}

impl Report {
    pub fn new(body: ReportBody, wall_time_ms: u64, workers: usize) -> Report {
        Report {
            body,
            meta: ReportMeta {
                wall_time_ms,
                workers,
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.body.verdict == Verdict::Pass
    }

    /// Canonical JSON of the deterministic part.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report bodies serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Two-column summary table: key,value per statistic, then one row per
    /// item.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        out.push_str(&format!("command,{}\n", self.body.config.command));
        out.push_str(&format!(
            "verdict,{}\n",
            match self.body.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            }
        ));
        let stats = serde_json::to_value(&self.body.statistics).expect("stats serialize");
        if let serde_json::Value::Object(map) = stats {
            for (k, v) in map {
                out.push_str(&format!("{k},{v}\n"));
            }
        }
        out.push_str(&format!("counterexamples,{}\n", self.body.counterexamples.len()));
        for item in &self.body.items {
            out.push_str(&format!(
                "item:{},{}\n",
                item.name,
                match item.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "fail",
                }
            ));
        }
        out
    }
}

pub fn body(command: &str) -> ReportBody {
    ReportBody {
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        config: ConfigEcho {
            command: command.to_owned(),
            ..ConfigEcho::default()
        },
        verdict: Verdict::Pass,
        counterexamples: Vec::new(),
        statistics: Statistics::default(),
        items: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_serialization_is_deterministic() {
        let mut b = body("honda");
        b.statistics.groups_checked = Some(3);
        let r1 = Report::new(b.clone(), 10, 1);
        let r2 = Report::new(b, 99, 8);
        assert_eq!(r1.body_json(), r2.body_json());
        assert_ne!(r1.to_json(), r2.to_json()); // meta differs
    }

    #[test]
    fn csv_summary_has_verdict() {
        let b = body("lift");
        let r = Report::new(b, 1, 1);
        let csv = r.to_csv();
        assert!(csv.contains("verdict,pass"));
        assert!(csv.starts_with("key,value\n"));
    }
}
