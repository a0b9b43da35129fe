//! Driver for RVB entanglement runs: parses a run configuration, executes the
//! requested tasks in order and writes `report.json`, `summary.txt` and a
//! plot-ready CSV.

pub mod checks;
pub mod config;
pub mod report;
pub mod tasks;

use std::io;
use std::path::Path;

pub use config::{ConfigError, RunConfig, Settings, Task};
pub use report::{emit_plot_data, Check, Report, TaskReport};

use report::SCHEMA_VERSION;
use tasks::{Context, TaskError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    AssertionFailed = 1,
    Config = 2,
    Cap = 3,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// Extra files produced by tasks, as `(file name, bytes)`.
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub exit: Exit,
    pub diagnostic: Option<String>,
}

/// Run every task in order. Stops at the first task that errors; assertion
/// failures do not stop later tasks.
pub fn execute(cfg: &RunConfig) -> Outcome {
    let mut ctx = Context::new(cfg);
    let mut results = Vec::new();
    let mut failure = None;
    for &task in &cfg.tasks {
        match ctx.run(task) {
            Ok(r) => results.push(r),
            Err(e) => {
                failure = Some((task, e));
                break;
            }
        }
    }
    let all_passed = results.iter().all(|r| r.passed);
    let (exit, diagnostic) = match &failure {
        Some((t, TaskError::Cap(m))) => (Exit::Cap, Some(format!("{t}: resource cap: {m}"))),
        Some((t, TaskError::Config(m))) => (Exit::Config, Some(format!("{t}: {m}"))),
        None if all_passed => (Exit::Ok, None),
        None => {
            let failed: Vec<&str> = results
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.task.as_str())
                .collect();
            (
                Exit::AssertionFailed,
                Some(format!("assertions failed in: {}", failed.join(", "))),
            )
        }
    };
    let report = Report {
        schema: SCHEMA_VERSION,
        lattice: cfg.lattice,
        variant: cfg.variant,
        tasks: cfg.tasks.iter().map(|t| t.name().to_string()).collect(),
        tol: cfg.tol,
        seed: cfg.seed,
        passed: exit == Exit::Ok,
        error: failure.map(|_| diagnostic.clone().unwrap_or_default()),
        results,
        plot: std::mem::take(&mut ctx.plot),
    };
    Outcome {
        report,
        artifacts: std::mem::take(&mut ctx.artifacts),
        exit,
        diagnostic,
    }
}

pub fn write_outputs(outcome: &Outcome, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), outcome.report.to_json())?;
    std::fs::write(dir.join("summary.txt"), outcome.report.summary())?;
    emit_plot_data(&outcome.report, dir)?;
    for (name, bytes) in &outcome.artifacts {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// Execute and write everything to `cfg.out`.
pub fn run(cfg: &RunConfig) -> io::Result<Outcome> {
    let outcome = execute(cfg);
    write_outputs(&outcome, &cfg.out)?;
    Ok(outcome)
}
