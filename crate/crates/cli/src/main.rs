use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ctxdep::experiment::Shots;
use ctxdep_cli::config::parse_shots_arg;
use ctxdep_cli::{parse_config_with, run_scenario, Overrides, RunConfig, Scenario};

/// Simulate gate-sequence experiments and test them for context dependence.
///
/// Exit status: 0 when no test reports a context-dependent verdict, 2 when
/// at least one does, 1 on any error.
#[derive(Parser)]
#[command(name = "ctxdep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write tables, reports and plot data.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scenario: Option<Scenario>,
        /// Positive shot count or `exact`.
        #[arg(long, value_parser = parse_shots_arg)]
        shots: Option<Shots>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &PathBuf, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config_with(&text, overrides).with_context(|| format!("in {}", path.display()))
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load(&config, &Overrides::default())?;
            println!(
                "{}: ok (scenario {}, {} phi value(s))",
                config.display(),
                cfg.scenario,
                cfg.phi_values.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            config,
            scenario,
            shots,
            seed,
            out,
        } => {
            let overrides = Overrides {
                scenario,
                shots,
                seed,
                output_dir: out,
            };
            let cfg = load(&config, &overrides)?;
            let outcome = run_scenario(&cfg)?;
            for r in &outcome.results {
                println!("{r}");
            }
            println!("outputs written to {}", cfg.output_dir.display());
            Ok(if outcome.any_dependent() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("CTXDEP_LOG", "warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
