use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rvb_cli::{run, Exit, RunConfig, Settings};

/// Entanglement scans of resonating-valence-bond states.
#[derive(Debug, Parser)]
#[command(name = "rvb", version)]
struct Args {
    /// `grid` or `complete-bipartite`.
    #[arg(long)]
    lattice: Option<String>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// `open` or `periodic`.
    #[arg(long)]
    boundary: Option<String>,
    /// `gas`, `liquid` or `custom`.
    #[arg(long)]
    variant: Option<String>,
    /// Sites per sublattice of the complete bipartite lattice.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated: enumerate, assemble, rdm, werner-scan, bounds,
    /// loop-cf, multipartite, reproduce-paper.
    #[arg(long)]
    tasks: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON ensemble for the custom variant.
    #[arg(long)]
    coverings: Option<PathBuf>,
    /// Flat key=value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn settings(args: Args) -> Result<Settings, String> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Settings::from_config_text(&text).map_err(|e| e.to_string())?
        }
        None => Settings::default(),
    };
    Ok(base.overlay(Settings {
        lattice: args.lattice,
        rows: args.rows,
        cols: args.cols,
        boundary: args.boundary,
        variant: args.variant,
        n: args.n,
        tasks: args.tasks,
        out: args.out,
        tol: args.tol,
        seed: args.seed,
        coverings: args.coverings,
    }))
}

fn main() -> ExitCode {
    let cfg =
        match settings(Args::parse()).and_then(|s| RunConfig::from_settings(&s).map_err(|e| e.to_string())) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("rvb: {e}");
                return ExitCode::from(Exit::Config.code());
            }
        };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("rvb: writing {}: {e}", cfg.out.display());
            return ExitCode::from(Exit::Config.code());
        }
    };
    print!("{}", outcome.report.summary());
    if let Some(d) = &outcome.diagnostic {
        eprintln!("rvb: {d}");
    }
    ExitCode::from(outcome.exit.code())
}
