//! Experiment reports and valuation tables.

use std::fmt::Write;

use serde::Serialize;

/// Six decimals, with negative zero printed as zero.
pub fn bits(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn opt_bits(v: Option<f64>) -> String {
    v.map(bits).unwrap_or_default()
}

/// One lattice node of a valuation; unevaluated nodes have no values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValuationRow {
    pub node: String,
    pub cumulative: Option<f64>,
    pub partial: Option<f64>,
}

impl ValuationRow {
    pub fn csv(&self) -> String {
        format!("{},{},{}", self.node, opt_bits(self.cumulative), opt_bits(self.partial))
    }
}

pub const VALUATION_HEADER: &str = "node,cumulative_bits,partial_bits";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    /// The measured deviation, compared against `tolerance`.
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Verdict {
    pub fn within(check: impl Into<String>, deviation: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            pass: deviation.is_finite() && deviation <= tolerance,
            deviation,
            tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub rows: Vec<ValuationRow>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parameters: Vec::new(),
            notes: Vec::new(),
            rows: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn parameter(&mut self, key: impl Into<String>, value: impl ToString) {
        self.parameters.push((key.into(), value.to_string()));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn row(&self, node: &str) -> Option<&ValuationRow> {
        self.rows.iter().find(|r| r.node == node)
    }

    /// Header comments, the valuation table as CSV, then one verdict per line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# experiment: {}", self.name).unwrap();
        for (k, v) in &self.parameters {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        for n in &self.notes {
            writeln!(out, "# note: {n}").unwrap();
        }
        if !self.rows.is_empty() {
            writeln!(out, "{VALUATION_HEADER}").unwrap();
            for r in &self.rows {
                writeln!(out, "{}", r.csv()).unwrap();
            }
        }
        for v in &self.verdicts {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            write!(out, "{tag} {}: deviation {:.3e} (tolerance {:.0e})", v.check, v.deviation, v.tolerance).unwrap();
            if !v.detail.is_empty() {
                write!(out, "; {}", v.detail).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}
