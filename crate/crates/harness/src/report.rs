//! Machine-readable experiment reports.
//!
//! Cell reports are JSON Lines, one [`Row`] per line, with a CSV summary
//! alongside. Rows are sorted by sentence id and then group name, so the
//! bytes do not depend on evaluation order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use grouplog_core::EvalStats;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Soundness,
    Uniqueness,
    Lengths,
    Eval,
}

impl ReportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::Soundness => "soundness",
            ReportKind::Uniqueness => "uniqueness",
            ReportKind::Lengths => "lengths",
            ReportKind::Eval => "eval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    BudgetExceeded,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::BudgetExceeded => "budget_exceeded",
            Status::Error => "error",
        }
    }
}

/// One (sentence, group) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub schema_version: u32,
    pub kind: ReportKind,
    pub sentence: String,
    pub group: String,
    pub satisfied: Option<bool>,
    /// Iso-oracle verdict against the sentence's target, for uniqueness rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isomorphic: Option<bool>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(String, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<EvalStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: ReportKind,
    pub rows: Vec<Row>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

impl Report {
    /// Sorts rows into canonical order.
    pub fn new(kind: ReportKind, mut rows: Vec<Row>) -> Self {
        rows.sort_by(|a, b| (&a.sentence, &a.group).cmp(&(&b.sentence, &b.group)));
        Report { kind, rows }
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == Status::Pass)
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("rows serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let rows: Vec<Row> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        let kind = rows.first().map_or(ReportKind::Eval, |r| r.kind);
        Ok(Report::new(kind, rows))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("sentence,group,satisfied,isomorphic,status,mode,estimate,nodes_visited\n");
        for r in &self.rows {
            let (mode, est, nodes) = match &r.stats {
                Some(s) => (
                    serde_json::to_value(s.mode)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                    format!("{:.3e}", s.estimate),
                    s.nodes_visited.to_string(),
                ),
                None => Default::default(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&r.sentence),
                csv_field(&r.group),
                opt_bool(r.satisfied),
                opt_bool(r.isomorphic),
                r.status.as_str(),
                mode,
                est,
                nodes
            );
        }
        out
    }

    /// One-line summary such as `uniqueness: 400 rows, 400 pass`.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} rows, {} pass",
            self.kind.as_str(),
            self.rows.len(),
            self.count(Status::Pass)
        );
        for st in [Status::Fail, Status::BudgetExceeded, Status::Error] {
            let n = self.count(st);
            if n > 0 {
                let _ = write!(s, ", {n} {}", st.as_str());
            }
        }
        s
    }

    /// Writes the JSONL report to `path` and the CSV summary next to it.
    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
        fs::write(path, self.to_jsonl()).map_err(|e| HarnessError::io(path, e))?;
        let csv = path.with_extension("csv");
        fs::write(&csv, self.to_csv()).map_err(|e| HarnessError::io(&csv, e))
    }
}
