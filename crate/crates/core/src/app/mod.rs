//! The `dlpp` experiment driver.
//!
//! A run resolves its configuration, executes one subcommand, and writes
//! `results.csv`, `report.json` and, where there is something to draw,
//! `plot.svg`. Exit status is 0 when no check fails, 1 when one does, and 2
//! for configuration or parameter errors.

mod cli;
mod commands;
mod config;
mod grid;
mod plot;

use std::path::Path;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

pub use cli::Cli;
pub use commands::{execute, Output, EXACT_TOL};
pub use config::{
    Command, ExcursionConfig, RunConfig, StabilityConfig, StabilityMode, TwinPeaksConfig,
    DEFAULT_SEED,
};
pub use grid::{parse_grid, parse_lattice, parse_pair, parse_usize_list};
pub use plot::{Plot, Series};

use crate::error::{Error, Result};
use crate::harness::{CheckReport, Row, Verdict};

pub const VERSION: &str = env!("DLPP_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: [&str; 10] = [
    "model", "n", "m", "param", "t", "tau", "estimate", "sem", "samples", "seed",
];

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub csv: String,
    pub report: Value,
    pub svg: Option<String>,
    pub checks: Vec<CheckReport>,
    pub exit_code: i32,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.param.clone(),
            float(r.t),
            float(r.tau),
            float(r.estimate),
            float(r.sem),
            r.samples.to_string(),
            r.seed.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// 1 if any check failed, else 0. Inconclusive checks and measurements do not fail a run.
pub fn exit_code(checks: &[CheckReport]) -> i32 {
    if checks.iter().any(|c| c.verdict == Verdict::Fail) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

fn configure_threads(threads: Option<usize>) {
    if let Some(k) = threads {
        // the global pool can be built once per process; later requests keep the first size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
}

/// Resolve and execute a configuration without touching the filesystem.
pub fn run(config: RunConfig) -> Result<RunOutcome> {
    let env_seed = std::env::var("DLPP_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok());
    let config = config.resolve(env_seed)?;
    configure_threads(config.threads);
    let start = Instant::now();
    let output = execute(&config)?;
    let wall = start.elapsed().as_secs_f64();
    let csv = render_csv(&output.rows)?;
    let exit_code = exit_code(&output.checks);
    let verdicts: Vec<Value> = output
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "verdict": c.verdict }))
        .collect();
    let report = json!({
        "command": config.command().name(),
        "version": VERSION,
        "config": config,
        "wall_time_seconds": wall,
        "verdicts": verdicts,
        "checks": output.checks,
        "summary": output.summary,
        "exit_code": exit_code,
    });
    Ok(RunOutcome {
        config,
        csv,
        report,
        svg: output.plot.map(|p| p.render()),
        checks: output.checks,
        exit_code,
    })
}

pub fn write_outcome(outcome: &RunOutcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("results.csv"), &outcome.csv)?;
    let report = serde_json::to_string_pretty(&outcome.report).expect("report serialises");
    std::fs::write(dir.join("report.json"), report + "\n")?;
    if let Some(svg) = &outcome.svg {
        std::fs::write(dir.join("plot.svg"), svg)?;
    }
    Ok(())
}

/// Entry point for the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let config = match cli.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("dlpp: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = match run(config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("dlpp: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = write_outcome(&outcome, &outcome.config.out) {
        eprintln!(
            "dlpp: cannot write to {}: {e}",
            outcome.config.out.display()
        );
        return EXIT_USAGE;
    }
    for c in &outcome.checks {
        eprintln!("{:?}: {}", c.verdict, c.name);
    }
    outcome.exit_code
}
