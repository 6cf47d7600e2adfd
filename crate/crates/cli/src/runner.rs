//! `run` and `refine` plus report persistence.

use std::path::{Path, PathBuf};

use bfslab::ExperimentReport;

use crate::config::SuiteConfig;
use crate::error::CliError;
use crate::suites::run_suite;

/// Largest refinement change for `refine` to pass.
pub const REFINEMENT_LIMIT: f64 = 0.05;

/// Memory budget for one run, checked against the refined sizes before `refine`
/// starts.
pub const RESOURCE_LIMIT_BYTES: f64 = 4.0 * 1024.0 * 1024.0 * 1024.0;

/// Rough peak memory of a run: a handful of complex space-time fields.
pub fn estimated_bytes(config: &SuiteConfig) -> f64 {
    let points = (config.grid.n as f64).powi(config.grid.dim as i32);
    const FIELDS: f64 = 6.0;
    FIELDS * 16.0 * points * (config.time.cells as f64 + 1.0)
}

pub fn run(config: &SuiteConfig) -> Result<ExperimentReport, CliError> {
    let resolved = config.resolve()?;
    run_suite(config.suite, &resolved)
}

/// Runs at `(N, cells)` and `(2N, 2 cells)` and compares the empirical suprema.
pub fn refine(config: &SuiteConfig) -> Result<ExperimentReport, CliError> {
    let fine_config = config.refined();
    let need = estimated_bytes(&fine_config);
    if need > RESOURCE_LIMIT_BYTES {
        return Err(CliError::Resource(format!(
            "N = {}, {} time cells needs about {:.1} GiB (limit {:.1} GiB)",
            fine_config.grid.n,
            fine_config.time.cells,
            need / 1024f64.powi(3),
            RESOURCE_LIMIT_BYTES / 1024f64.powi(3)
        )));
    }
    // validate both sizes before computing anything
    let coarse_resolved = config.resolve()?;
    let fine_resolved = fine_config.resolve()?;
    let coarse = run_suite(config.suite, &coarse_resolved)?;
    let fine = run_suite(config.suite, &fine_resolved)?;
    let (a, b) = (coarse.aggregate.empirical_sup, fine.aggregate.empirical_sup);
    let delta = if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs().max(b.abs())
    };
    let mut report = fine.with_refinement_delta(delta, REFINEMENT_LIMIT);
    report.passed &= coarse.passed;
    report.note(format!(
        "refinement N {} -> {}, cells {} -> {}: empirical sup {a:.6e} -> {b:.6e}",
        config.grid.n, fine_config.grid.n, config.time.cells, fine_config.time.cells
    ));
    Ok(report)
}

/// `<prefix>.report.json` and `<prefix>.cases.csv`.
pub fn output_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".report.json"), with(".cases.csv"))
}

pub fn write_outputs(report: &ExperimentReport, prefix: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    let (json_path, csv_path) = output_paths(prefix);
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    let write = |path: &Path, text: &str| {
        std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    };
    write(&json_path, &json)?;
    write(&csv_path, &report.to_csv())?;
    Ok((json_path, csv_path))
}
