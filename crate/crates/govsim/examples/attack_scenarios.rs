//! Run every built-in governance-attack scenario with its default
//! configuration and print a one-screen summary of each outcome.
//!
//! Run with: cargo run --example attack_scenarios

use govsim::config::{scenario_description, ScenarioConfig, SCENARIO_KINDS};
use govsim::scenarios::run_scenario;
use govsim::types::SimResult;

fn main() -> SimResult<()> {
    for kind in SCENARIO_KINDS {
        let result = run_scenario(&ScenarioConfig::with_kind(kind))?;
        let report = &result.report;
        println!("=== {kind}");
        println!("    {}", scenario_description(kind));
        println!(
            "    outcome: {} | attacker profit: {} | platform loss: {}",
            if report.succeeded { "attack succeeded" } else { "attack failed" },
            report.attacker_profit,
            report.platform_loss,
        );
        for (key, value) in &report.details {
            println!("    {key}: {value}");
        }
        println!();
    }
    Ok(())
}
