//! JSON report assembly.
//!
//! Every command emits a single report object with a stable schema:
//! `schema_version`, `tool_version`, `command`, the echoed `config`,
//! command-specific `results`, and `timings_ms`. Identical configs produce
//! byte-identical reports apart from the timings block.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use opb::instance::{OpbVerdict, ParamAssignment};
use opb::locc::Transcript;
use opb::structure::{Distinguishability, MultiplicityVerdict, ReducibilityReport, SplitTree};
use opb::teleport::MergePlan;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, config: Value, results: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            config,
            results,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn timing(&mut self, phase: &str, millis: f64) {
        self.timings_ms.insert(phase.to_owned(), millis);
    }

    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

pub fn verdict_json(v: &OpbVerdict, expected_rank: usize) -> Value {
    json!({
        "orthogonal": v.orthogonal,
        "complete": v.complete,
        "max_offdiag": v.max_offdiag,
        "rank": v.rank,
        "expected_rank": expected_rank,
        "passed": v.passed(),
    })
}

pub fn params_json(params: &ParamAssignment) -> Value {
    serde_json::to_value(&params.families).expect("params serialization")
}

pub fn reducibility_json(reports: &[ReducibilityReport]) -> Value {
    serde_json::to_value(reports).expect("reducibility serialization")
}

pub fn distinguishability_str(d: Distinguishability) -> &'static str {
    match d {
        Distinguishability::Distinguishable => "distinguishable",
        Distinguishability::Indistinguishable => "indistinguishable",
        Distinguishability::Unknown => "unknown",
    }
}

pub fn certificate_json(cert: &SplitTree) -> Value {
    serde_json::to_value(cert).expect("certificate serialization")
}

pub fn multiplicity_json(verdicts: &[MultiplicityVerdict]) -> Value {
    serde_json::to_value(verdicts).expect("multiplicity serialization")
}

pub fn transcript_json(t: &Transcript) -> Value {
    serde_json::to_value(t).expect("transcript serialization")
}

pub fn plan_json(plan: &MergePlan) -> Value {
    json!({
        "pairs": plan.pairs,
        "ebits": plan.ebit_cost(),
    })
}
