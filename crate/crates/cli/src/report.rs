//! Report schema and output formats.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "ss3/1";

/// One row of the check ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub claim: String,
    pub expected: String,
    pub observed: String,
    #[serde(rename = "match")]
    pub matched: bool,
    /// Known discrepancies are reported but do not affect the exit status.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flagged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Matches when the two values render identically.
    pub fn eq(claim: impl Into<String>, expected: impl Display, observed: impl Display) -> Self {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        Check { claim: claim.into(), matched: expected == observed, expected, observed, flagged: false, note: None }
    }

    pub fn holds(claim: impl Into<String>, expected: impl Display, observed: impl Display, ok: bool) -> Self {
        Check {
            claim: claim.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            matched: ok,
            flagged: false,
            note: None,
        }
    }

    pub fn flagged(mut self, note: impl Into<String>) -> Self {
        self.flagged = true;
        self.note = Some(note.into());
        self
    }

    pub fn counts_toward_exit(&self) -> bool {
        !self.flagged
    }
}

/// Rows for CSV and table output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn ledger(checks: &[Check]) -> Self {
        let mut t = Table::new(&["claim", "expected", "observed", "match", "flagged"]);
        for c in checks {
            t.push(vec![
                c.claim.clone(),
                c.expected.clone(),
                c.observed.clone(),
                c.matched.to_string(),
                c.flagged.to_string(),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: Vec<String>,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub versions: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Value>,
}

impl Report {
    pub fn new(command: Vec<String>, inputs: Value, results: Value, checks: Vec<Check>) -> Self {
        let versions = BTreeMap::from([
            ("ss3-core".to_string(), ss3_core::VERSION.to_string()),
            ("ss3-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ]);
        Report { schema: SCHEMA.into(), command, inputs, results, checks, versions, timing: None }
    }

    /// Every unflagged ledger row matched.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.counts_toward_exit()).all(|c| c.matched)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.counts_toward_exit() && !c.matched).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise") + "\n"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Writes the report in the requested format. CSV and table output use the
/// command's own table when it has one and the check ledger otherwise.
pub fn emit(out: &mut dyn Write, report: &Report, table: Option<&Table>, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => out.write_all(report.to_json().as_bytes()),
        Format::Csv => {
            let ledger;
            let t = match table {
                Some(t) => t,
                None => {
                    ledger = Table::ledger(&report.checks);
                    &ledger
                }
            };
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&t.headers)?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            w.flush()
        }
        Format::Table => {
            if let Some(t) = table {
                write_aligned(out, t)?;
                writeln!(out)?;
            }
            if !report.checks.is_empty() {
                write_aligned(out, &Table::ledger(&report.checks))?;
            }
            let n = report.checks.len();
            let bad = report.failures().len();
            writeln!(out, "{} checks, {} failed", n, bad)
        }
    }
}

fn write_aligned(out: &mut dyn Write, t: &Table) -> std::io::Result<()> {
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
    for r in &t.rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(&t.headers))?;
    for r in &t.rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}
