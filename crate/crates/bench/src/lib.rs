//! Benchmark harness for `minimax_core`.
//!
//! Three commands share this library:
//!
//! * `solve <config.json>` runs one configured solve and prints a JSON record.
//! * `sweep <config.json>` runs a grid of solves and prints one CSV row per cell.
//! * `verify <suite>` runs a named invariant suite.
//!
//! Exit codes: 0 on success, 1 when a run or check fails, 2 for invalid input.

pub mod config;
pub mod run;
pub mod sweep;
pub mod verify;

use std::io::Write;
use std::path::Path;

use config::{load, ConfigError, RunConfig, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

fn report_invalid(err: &mut dyn Write, e: &ConfigError) -> i32 {
    let _ = writeln!(err, "invalid config: {e}");
    EXIT_INVALID
}

/// Writes `text` to `path`, or to `out` when no path is configured.
fn emit(path: Option<&str>, text: &str, out: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{p}: {e}")),
        None => out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| format!("stdout: {e}")),
    }
}

/// Writes the JSON record; exit 0 iff the run status is ok.
pub fn cmd_solve(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config: RunConfig = match load(path) {
        Ok(c) => c,
        Err(e) => return report_invalid(err, &e),
    };
    let record = match run::execute(&config.problem, &config.solver, &config.caps, config.timing) {
        Ok(r) => r,
        Err(e) => return report_invalid(err, &e),
    };
    let text = serde_json::to_string_pretty(&record).expect("records always serialize") + "\n";
    if let Err(msg) = emit(config.output.as_deref(), &text, out) {
        let _ = writeln!(err, "{msg}");
        return EXIT_FAILURE;
    }
    run::exit_code(&record)
}

/// Writes the CSV to the configured path or `out`; exit 0 iff every cell is ok.
pub fn cmd_sweep(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config: SweepConfig = match load(path) {
        Ok(c) => c,
        Err(e) => return report_invalid(err, &e),
    };
    let rows = match sweep::run_sweep(&config) {
        Ok(r) => r,
        Err(e) => return report_invalid(err, &e),
    };
    let csv = sweep::to_csv(&rows);
    if let Err(msg) = emit(config.output.as_deref(), &csv, out) {
        let _ = writeln!(err, "{msg}");
        return EXIT_FAILURE;
    }
    if rows.iter().all(|r| r.status == run::RunStatus::Ok) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

pub fn cmd_verify(suite: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(checks) = verify::run_suite(suite) else {
        let _ = writeln!(err, "unknown suite {suite:?}; available: {}", verify::SUITES.join(", "));
        return EXIT_INVALID;
    };
    for c in &checks {
        let _ = writeln!(out, "{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}
