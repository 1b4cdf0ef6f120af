//! Result documents: JSON for machines, aligned text for people.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{FrobError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub entries: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    pub passed: bool,
    pub residuals: Vec<Residual>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: &str, category: &str, algebra: Option<&str>) -> Self {
        ReportDocument {
            command: command.into(),
            category: category.into(),
            algebra: algebra.map(str::to_string),
            passed: true,
            residuals: Vec::new(),
            tables: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a residual; non-finite values are stored as `f64::MAX` so the
    /// document stays valid JSON.
    pub fn residual(&mut self, name: &str, value: f64, threshold: f64) -> &mut Residual {
        let value = if value.is_finite() { value } else { f64::MAX };
        self.push_residual(Residual { name: name.into(), value, threshold, passed: value <= threshold, details: Vec::new() })
    }

    /// Records a check with an explicit verdict and optional details.
    pub fn check(&mut self, name: &str, value: f64, threshold: f64, passed: bool, details: Vec<String>) {
        let value = if value.is_finite() { value } else { f64::MAX };
        self.push_residual(Residual { name: name.into(), value, threshold, passed, details });
    }

    fn push_residual(&mut self, r: Residual) -> &mut Residual {
        self.passed &= r.passed;
        self.residuals.push(r);
        self.residuals.last_mut().unwrap()
    }

    pub fn table(&mut self, name: &str, rows: Vec<String>, cols: Vec<String>, entries: Vec<Vec<usize>>) {
        self.tables.push(Table { name: name.into(), row_labels: rows, col_labels: cols, entries });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| FrobError::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| FrobError::Parse(e.to_string()))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{} on {}", self.command, self.category);
        if let Some(a) = &self.algebra {
            let _ = write!(out, " with {a}");
        }
        let _ = writeln!(out, ": {}", if self.passed { "PASS" } else { "FAIL" });
        if !self.residuals.is_empty() {
            let w = self.residuals.iter().map(|r| r.name.len()).max().unwrap_or(0);
            for r in &self.residuals {
                let mark = if r.passed { "ok  " } else { "FAIL" };
                let _ = writeln!(out, "  {mark} {:<w$}  {:.3e}  (≤ {:.1e})", r.name, r.value, r.threshold);
                for d in &r.details {
                    let _ = writeln!(out, "         {d}");
                }
            }
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n{}", t.name);
            out.push_str(&render_table(t));
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

fn render_table(t: &Table) -> String {
    let rw = t.row_labels.iter().map(|s| s.chars().count()).max().unwrap_or(0);
    let cw = t
        .col_labels
        .iter()
        .map(|s| s.chars().count())
        .chain(t.entries.iter().flatten().map(|v| v.to_string().len()))
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    let _ = write!(out, "  {:rw$} ", "");
    for c in &t.col_labels {
        let _ = write!(out, " {c:>cw$}");
    }
    out.push('\n');
    for (r, row) in t.row_labels.iter().zip(&t.entries) {
        let _ = write!(out, "  {r:>rw$} ");
        for v in row {
            let _ = write!(out, " {v:>cw$}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportDocument {
        let mut d = ReportDocument::new("torus", "ising", Some("cardy"));
        d.residual("s_commutator", 1.234_567_890_123e-15, 1e-8);
        d.check("t_condition", 0.0, 1e-9, true, Vec::new());
        d.residual("nan", f64::NAN, 1.0);
        let names: Vec<String> = ["1", "sigma", "psi"].iter().map(|s| s.to_string()).collect();
        d.table("Z", names.clone(), names, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        d.note("twist condition on defect tables is convention-dependent");
        d
    }

    #[test]
    fn json_round_trip() {
        let d = sample();
        assert!(!d.passed);
        assert_eq!(ReportDocument::from_json(&d.to_json().unwrap()).unwrap(), d);
    }

    #[test]
    fn rendering_lists_everything() {
        let s = sample().render();
        assert!(s.starts_with("torus on ising with cardy: FAIL"));
        assert!(s.contains("sigma"));
        assert!(s.contains("FAIL nan"));
        assert!(s.contains("note:"));
    }
}
