// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cslimit::scenario::{self, Overrides, RunError, ScenarioConfig, ScenarioName};

#[derive(Parser)]
#[command(name = "cslimit", version, about = "Scenario runner for ℏ → 0 phase-space numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run at a single ℏ (overrides `hbar`).
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the available scenarios.
    ListScenarios,
    /// Print the default config of a scenario (all scenarios if omitted).
    PrintDefaults { scenario: Option<String> },
}

fn run(config: PathBuf, overrides: Overrides) -> Result<bool, RunError> {
    let text = fs::read_to_string(&config).map_err(|e| RunError::Parse(format!("{}: {e}", config.display())))?;
    let cfg = ScenarioConfig::from_toml(&text, &overrides)?;
    let outcome = scenario::run(&cfg)?;
    scenario::write_outputs(&outcome, &cfg.output_dir)?;
    for a in &outcome.report.assertions {
        let verdict = if a.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} = {} (expected {})", a.name, scenario::format_number(a.value), a.expected);
    }
    println!(
        "{}: {} -> {}",
        cfg.scenario,
        if outcome.passed() { "passed" } else { "FAILED" },
        cfg.output_dir.join("report.json").display()
    );
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, hbar, seed } => run(config, Overrides { out, hbar, seed }),
        Command::ListScenarios => {
            for name in ScenarioName::ALL {
                println!("{:<24} {}", name.as_str(), name.summary());
            }
            Ok(true)
        }
        Command::PrintDefaults { scenario } => match scenario {
            Some(s) => s.parse::<ScenarioName>().map(|name| {
                print!("{}", scenario::defaults_toml(name));
                true
            }),
            None => {
                for name in ScenarioName::ALL {
                    println!("# --- {name} ---");
                    println!("{}", scenario::defaults_toml(name));
                }
                Ok(true)
            }
        },
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(scenario::ASSERTION_FAILURE as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
