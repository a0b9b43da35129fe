use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rvb_core::{LatticeSpec, Variant};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const PLOT_FILE: &str = "pairs_by_distance.csv";
pub const PLOT_HEADER: &str = "distance,p,monogamy_bound,telecloning_bound,partners";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|measured − expected| ≤ tolerance`.
    Within,
    /// `measured ≤ expected + tolerance`.
    AtMost,
    /// `measured ≥ expected − tolerance`.
    AtLeast,
}

/// One assertion with its pinned tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        kind: CheckKind,
        measured: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        let passed = match kind {
            CheckKind::Within => (measured - expected).abs() <= tolerance,
            CheckKind::AtMost => measured <= expected + tolerance,
            CheckKind::AtLeast => measured >= expected - tolerance,
        };
        Check {
            name: name.into(),
            kind,
            measured,
            expected,
            tolerance,
            passed,
            note: None,
        }
    }

    pub fn within(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, CheckKind::Within, measured, expected, tolerance)
    }

    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64, tolerance: f64) -> Self {
        Self::new(name, CheckKind::AtMost, measured, limit, tolerance)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64, tolerance: f64) -> Self {
        Self::new(name, CheckKind::AtLeast, measured, limit, tolerance)
    }

    /// A yes/no fact recorded as `measured ∈ {0, 1}` against `1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::within(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn describe(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let (e, t) = (num(self.expected), num(self.tolerance));
        let rel = match self.kind {
            CheckKind::Within => format!("{e} ± {t}"),
            CheckKind::AtMost => format!("≤ {e} (+{t})"),
            CheckKind::AtLeast => format!("≥ {e} (−{t})"),
        };
        let mut s = format!(
            "[{verdict}] {}: measured {} expected {rel}",
            self.name,
            num(self.measured)
        );
        if let Some(n) = &self.note {
            let _ = write!(s, " ({n})");
        }
        s
    }
}

fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    pub distance: usize,
    pub p: f64,
    pub monogamy_bound: f64,
    pub telecloning_bound: f64,
    pub partners: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskReport {
    pub task: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl TaskReport {
    pub fn new(task: &str, checks: Vec<Check>, data: Value) -> Self {
        TaskReport {
            task: task.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            data,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub lattice: LatticeSpec,
    pub variant: Variant,
    pub tasks: Vec<String>,
    pub tol: f64,
    pub seed: u64,
    pub passed: bool,
    pub error: Option<String>,
    pub results: Vec<TaskReport>,
    pub plot: Vec<PlotRow>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "lattice: {}  variant: {:?}", self.lattice, self.variant);
        for t in &self.results {
            let _ = writeln!(s, "{}: {}", t.task, if t.passed { "PASS" } else { "FAIL" });
            for c in &t.checks {
                let _ = writeln!(s, "  {}", c.describe());
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error: {e}");
        }
        let _ = writeln!(s, "overall: {}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

/// CSV of `(distance, p, monogamy bound, telecloning bound)` rows. An empty
/// report yields the header alone.
pub fn plot_csv(report: &Report) -> String {
    let mut s = String::from(PLOT_HEADER);
    s.push('\n');
    for r in &report.plot {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.distance, r.p, r.monogamy_bound, r.telecloning_bound, r.partners
        );
    }
    s
}

pub fn emit_plot_data(report: &Report, dir: &Path) -> io::Result<PathBuf> {
    let path = dir.join(PLOT_FILE);
    std::fs::File::create(&path)?.write_all(plot_csv(report).as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_kinds() {
        assert!(Check::within("a", 1.0, 1.05, 0.1).passed);
        assert!(!Check::within("a", 1.0, 1.2, 0.1).passed);
        assert!(Check::at_most("b", 0.5, 0.5, 0.0).passed);
        assert!(!Check::at_most("b", 0.6, 0.5, 1e-9).passed);
        assert!(Check::at_least("c", 0.4, 0.5, 0.2).passed);
        assert!(!Check::holds("d", false).passed);
    }

    #[test]
    fn empty_csv_is_header_only() {
        let r = Report {
            schema: SCHEMA_VERSION,
            lattice: LatticeSpec::complete_bipartite(2).unwrap(),
            variant: Variant::Gas,
            tasks: vec![],
            tol: 1e-9,
            seed: 0,
            passed: true,
            error: None,
            results: vec![],
            plot: vec![],
        };
        assert_eq!(plot_csv(&r), format!("{PLOT_HEADER}\n"));
    }
}
