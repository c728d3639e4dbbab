//! Check results and suite summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// What a report asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `slack ≥ −tol·scale`.
    Inequality,
    /// `residual ≤ tol`.
    Identity,
    /// `|slack| ≤ tol·scale`.
    Equality,
}

/// Outcome of one inequality or identity check.
///
/// `slack` is oriented so that nonnegative values mean the inequality holds;
/// it is `None` when the check's precondition is not met. `residual` is
/// `|a − b| / max(|a|, |b|, 1)` for identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub name: String,
    pub kind: CheckKind,
    pub k: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: Option<f64>,
    pub residual: Option<f64>,
    pub body_hash: String,
    pub grid: String,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

impl SlackReport {
    pub fn new(name: impl Into<String>, kind: CheckKind, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            kind,
            k: None,
            lhs,
            rhs,
            slack: None,
            residual: None,
            body_hash: String::new(),
            grid: String::new(),
            tol: 0.0,
            extras: BTreeMap::new(),
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = Some(slack);
        self
    }

    pub fn with_residual(mut self, r: f64) -> Self {
        self.residual = Some(r);
        self
    }

    pub fn with_body(mut self, hash: &str, grid: impl ToString) -> Self {
        self.body_hash = hash.to_string();
        self.grid = grid.to_string();
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn extra(mut self, key: &str, v: f64) -> Self {
        self.extras.insert(key.to_string(), v);
        self
    }

    /// `max(|lhs|, |rhs|, 1)`, the scale slacks are measured against.
    pub fn scale(&self) -> f64 {
        self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }

    /// Slack divided by [`SlackReport::scale`].
    pub fn relative_slack(&self) -> Option<f64> {
        self.slack.map(|s| s / self.scale())
    }

    pub fn passed(&self) -> bool {
        let slack_ok = match (self.kind, self.relative_slack()) {
            (_, None) => true,
            (CheckKind::Equality, Some(s)) => s.abs() <= self.tol,
            (_, Some(s)) => s >= -self.tol,
        };
        let residual_ok = self.residual.is_none_or(|r| r <= self.tol);
        let finite = self.slack.is_none_or(f64::is_finite) && self.residual.is_none_or(f64::is_finite);
        slack_ok && residual_ok && finite
    }
}

/// Worst values seen for one check family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub count: usize,
    pub failures: usize,
    pub worst_relative_slack: Option<f64>,
    pub worst_residual: Option<f64>,
}

/// All reports of a suite run, with per-family worst cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub grid: String,
    pub body_hash: String,
    pub threads: usize,
    pub all_passed: bool,
    pub families: BTreeMap<String, FamilySummary>,
    pub reports: Vec<SlackReport>,
}

impl SuiteSummary {
    pub fn from_reports(grid: &str, body_hash: &str, threads: usize, reports: Vec<SlackReport>) -> Self {
        let mut families: BTreeMap<String, FamilySummary> = BTreeMap::new();
        for r in &reports {
            let fam = r.name.split('.').next().unwrap_or(&r.name).to_string();
            let e = families.entry(fam).or_insert(FamilySummary {
                count: 0,
                failures: 0,
                worst_relative_slack: None,
                worst_residual: None,
            });
            e.count += 1;
            if !r.passed() {
                e.failures += 1;
            }
            if let Some(s) = r.relative_slack() {
                // equality witnesses are judged by magnitude
                let s = if r.kind == CheckKind::Equality { -s.abs() } else { s };
                e.worst_relative_slack = Some(e.worst_relative_slack.map_or(s, |w: f64| w.min(s)));
            }
            if let Some(res) = r.residual {
                e.worst_residual = Some(e.worst_residual.map_or(res, |w: f64| w.max(res)));
            }
        }
        let all_passed = reports.iter().all(SlackReport::passed);
        Self { grid: grid.to_string(), body_hash: body_hash.to_string(), threads, all_passed, families, reports }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }
}
