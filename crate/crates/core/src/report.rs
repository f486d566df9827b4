//! Inequality check records shared by every verification routine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::graph::WeightedGraph;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// A deliberate tightness probe that failed, as it should.
    ExpectedFail,
    /// A tightness probe that did not fail.
    UnexpectedPass,
}

impl Status {
    /// Whether this entry makes a suite fail.
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::UnexpectedPass)
    }
}

/// One evaluated inequality `lhs ≤ rhs` (or `lhs ≥ rhs`).
///
/// `margin` is the signed slack in the direction of the inequality, so a
/// check passes exactly when `margin ≥ −tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub graph: String,
    pub digest: String,
    pub params: BTreeMap<String, Value>,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    pub anchor: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl CheckReport {
    pub fn new(
        check: &str,
        g: &WeightedGraph,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        anchor: &str,
    ) -> Self {
        let margin = match relation {
            Relation::AtMost => rhs - lhs,
            Relation::AtLeast => lhs - rhs,
        };
        let pass = margin >= -tolerance;
        CheckReport {
            check: check.to_string(),
            graph: String::new(),
            digest: g.digest(),
            params: BTreeMap::new(),
            relation,
            lhs,
            rhs,
            margin,
            tolerance,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            anchor: anchor.to_string(),
            extra: BTreeMap::new(),
            elapsed_ms: None,
        }
    }

    pub fn skipped(check: &str, g: &WeightedGraph, reason: &str, anchor: &str) -> Self {
        let mut r = CheckReport::new(
            check,
            g,
            Relation::AtMost,
            f64::NAN,
            f64::NAN,
            DEFAULT_TOL,
            anchor,
        );
        r.margin = f64::NAN;
        r.pass = false;
        r.status = Status::Skipped;
        r.extra.insert("reason".into(), Value::from(reason));
        r
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_extra(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.extra.insert(key.to_string(), value.into());
        self
    }

    pub fn on_graph(mut self, name: impl Into<String>) -> Self {
        self.graph = name.into();
        self
    }

    /// Marks this report as a tightness probe, which is meant to fail.
    pub fn as_probe(mut self) -> Self {
        if self.status != Status::Skipped {
            self.status = if self.pass {
                Status::UnexpectedPass
            } else {
                Status::ExpectedFail
            };
        }
        self
    }
}

/// Non-finite floats serialize as strings so reports stay valid JSON.
pub fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}
