//! Thin command-line front end over the library: run a scenario from a
//! config file, compute metrics over an event dump, or list the catalog.
//!
//! Exit codes: 0 on success, 2 on configuration errors (bad file, bad
//! schema, unknown scenario).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{scenario_description, ScenarioConfig, SCENARIO_KINDS};
use crate::report;
use crate::scenarios::run_scenario;
use crate::types::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "govsim", about = "Deterministic token-governance attack simulator", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario from a TOML or JSON config file.
    Run {
        /// Path to the scenario config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed (also honors GOVSIM_SEED).
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report.json, summary.csv, timeline.csv,
        /// events.jsonl, and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Compute voting-pattern metrics from an events.jsonl dump.
    Metrics {
        /// Path to a JSON-lines event dump.
        #[arg(long)]
        events: PathBuf,
        /// Circulating supply used for participation rates.
        #[arg(long, default_value_t = 0)]
        supply: Units,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List known scenario kinds.
    ListScenarios,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version via this path too.
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(cli: Cli) -> SimResult<()> {
    match cli.command {
        Command::Run { config, seed, out, format } => cmd_run(&config, seed, out.as_deref(), format),
        Command::Metrics { events, supply, format } => cmd_metrics(&events, supply, format),
        Command::ListScenarios => {
            for kind in SCENARIO_KINDS {
                println!("{kind}\t{}", scenario_description(kind));
            }
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> SimResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> SimResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| SimError::Config(format!("cannot write {}: {e}", path.display())))
}

fn cmd_run(config_path: &Path, seed: Option<u64>, out: Option<&Path>, format: Format) -> SimResult<()> {
    let mut config = ScenarioConfig::parse(&read_file(config_path)?)?;
    let env_seed = std::env::var("GOVSIM_SEED").ok().and_then(|s| s.parse().ok());
    if let Some(s) = seed.or(env_seed) {
        config.scenario.seed = s;
    }
    config.validate()?;

    let result = run_scenario(&config)?;
    match format {
        Format::Json => println!("{}", report::report_json(&result.report)),
        Format::Csv => print!("{}", report::summary_csv(&result.report)),
    }

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| SimError::Config(format!("cannot create {}: {e}", dir.display())))?;
        let manifest = report::RunManifest::new(&config, &result.world, &result.report);
        write_file(&dir.join("report.json"), &report::report_json(&result.report))?;
        write_file(&dir.join("summary.csv"), &report::summary_csv(&result.report))?;
        write_file(&dir.join("timeline.csv"), &report::timeline_csv(&result.report))?;
        write_file(&dir.join("events.jsonl"), &report::events_jsonl(&result.world.log))?;
        write_file(
            &dir.join("manifest.json"),
            &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
        )?;
        write_file(&dir.join("config.json"), &config.canonical_json())?;
    }
    Ok(())
}

fn cmd_metrics(events_path: &Path, supply: Units, format: Format) -> SimResult<()> {
    let log = report::parse_events_jsonl(&read_file(events_path)?)?;
    let summary = crate::analytics::compute_metrics(&log, supply);
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("metrics serialize"))
        }
        Format::Csv => print!("{}", report::metrics_csv(&summary)),
    }
    Ok(())
}
