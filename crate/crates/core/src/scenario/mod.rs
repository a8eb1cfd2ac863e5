// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Config-driven scenario runs with JSON reports and CSV curves.
//!
//! A run computes everything in memory ([`run`]) and then writes
//! `report.json`, `metadata.json` and one CSV per curve ([`write_outputs`]).
//! `report.json` depends only on the config; wall-clock data goes to
//! `metadata.json`.

mod config;
mod runners;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub use config::{
    default_table, defaults_toml, BoxConfig, HbarSpec, MoyalConfig, Overrides, PacketConfig, PhaseGridConfig,
    ProfileConfig, RandomConfig, ScenarioConfig, ScenarioName, SpectralConfig, TimeUnit,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => 1,
            Self::Validation(_) => 2,
            Self::Io(_) => 4,
        }
    }
}

/// Exit status for a run whose assertions did not all pass.
pub const ASSERTION_FAILURE: i32 = 3;

impl From<crate::Error> for RunError {
    fn from(e: crate::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

/// Plain decimal for moderate magnitudes, scientific otherwise.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-3..1e4).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One checked claim of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub expected: String,
    pub passed: bool,
}

impl Assertion {
    pub fn within(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("{} ± {}", format_number(target), format_number(tol)),
            passed: (value - target).abs() <= tol,
        }
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, expected: format!("≤ {}", format_number(bound)), passed: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, expected: format!("≥ {}", format_number(bound)), passed: value >= bound }
    }

    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, expected: format!("< {}", format_number(bound)), passed: value < bound }
    }

    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, expected: format!("> {}", format_number(bound)), passed: value > bound }
    }

    pub fn holds(name: &str, condition: bool) -> Self {
        Self {
            name: name.into(),
            value: if condition { 1.0 } else { 0.0 },
            expected: "true".into(),
            passed: condition,
        }
    }
}

/// A table of numbers destined for one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub file_name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(file_name: impl Into<String>, header: &[&str]) -> Self {
        Self { file_name: file_name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: ScenarioName,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub results: serde_json::Value,
    pub curves: Vec<String>,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub curves: Vec<Curve>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.passed
    }
}

/// What a scenario computes before it is wrapped into a [`Report`].
pub(crate) struct Findings {
    pub assertions: Vec<Assertion>,
    pub results: serde_json::Value,
    pub curves: Vec<Curve>,
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    cfg.validate()?;
    log::info!("running scenario {}", cfg.scenario);
    let findings = match cfg.scenario {
        ScenarioName::MoyalConvergence => runners::moyal_convergence(cfg)?,
        ScenarioName::WignerNegativity => runners::wigner_negativity(cfg)?,
        ScenarioName::PairingEquivalence => runners::pairing_equivalence(cfg)?,
        ScenarioName::DecoherenceLorentzian => runners::decoherence_lorentzian(cfg)?,
        ScenarioName::DecoherencePolefree => runners::decoherence_polefree(cfg)?,
        ScenarioName::LimitPositivity => runners::limit_positivity(cfg)?,
    };
    for a in &findings.assertions {
        log::info!(
            "{} {}: {} (expected {})",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            format_number(a.value),
            a.expected
        );
    }
    let report = Report {
        scenario: cfg.scenario,
        passed: findings.assertions.iter().all(|a| a.passed),
        assertions: findings.assertions,
        results: findings.results,
        curves: findings.curves.iter().map(|c| c.file_name.clone()).collect(),
        config: cfg.clone(),
    };
    Ok(Outcome { report, curves: findings.curves })
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

#[derive(Serialize)]
struct Metadata<'a> {
    scenario: ScenarioName,
    version: &'a str,
    output_dir: &'a Path,
    unix_time_seconds: u64,
}

/// Write the report, metadata and curves into `dir`, creating it if needed.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = Vec::new();

    let report_path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&outcome.report).map_err(|e| io_error(&report_path, e))?;
    text.push('\n');
    fs::write(&report_path, text).map_err(|e| io_error(&report_path, e))?;
    written.push(report_path);

    let meta_path = dir.join("metadata.json");
    let meta = Metadata {
        scenario: outcome.report.scenario,
        version: env!("CARGO_PKG_VERSION"),
        output_dir: dir,
        unix_time_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| io_error(&meta_path, e))?;
    fs::write(&meta_path, text + "\n").map_err(|e| io_error(&meta_path, e))?;
    written.push(meta_path);

    for curve in &outcome.curves {
        let path = dir.join(&curve.file_name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
        w.write_record(&curve.header).map_err(|e| io_error(&path, e))?;
        for row in &curve.rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| io_error(&path, e))?;
        }
        w.flush().map_err(|e| io_error(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
