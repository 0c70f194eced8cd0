//! Output formats: JSON reports, RFC 4180 CSV, JSON-lines event dumps, and
//! the run manifest tying outputs back to the exact config that produced
//! them. Integers are emitted exactly; fractional metrics use a fixed six
//! decimal places so byte-identical runs produce byte-identical files.

use serde::{Deserialize, Serialize};

use crate::analytics::MetricsSummary;
use crate::chain::World;
use crate::config::ScenarioConfig;
use crate::event::LogEntry;
use crate::scenarios::ScenarioReport;
use crate::types::*;

/// Provenance record for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub seed: u64,
    /// SHA-256 of the canonical JSON form of the resolved config.
    pub config_hash: String,
    pub final_height: BlockHeight,
    pub log_entries: usize,
    pub succeeded: bool,
}

impl RunManifest {
    pub fn new(config: &ScenarioConfig, world: &World, report: &ScenarioReport) -> Self {
        RunManifest {
            scenario: config.scenario.kind.clone(),
            seed: config.scenario.seed,
            config_hash: config.canonical_hash(),
            final_height: world.height(),
            log_entries: world.log.len(),
            succeeded: report.succeeded,
        }
    }
}

/// Quote a CSV field per RFC 4180 when needed.
pub fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// Fractions are fixed at six decimals for stable output.
pub fn format_fraction(f: f64) -> String {
    format!("{f:.6}")
}

pub fn report_json(report: &ScenarioReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

fn metrics_rows(m: &MetricsSummary) -> Vec<(String, String)> {
    vec![
        ("proposals_count".into(), m.proposals_count.to_string()),
        ("participation_mean".into(), format_fraction(m.participation_mean)),
        ("participation_std".into(), format_fraction(m.participation_std)),
        ("participation_min".into(), format_fraction(m.participation_min)),
        ("participation_median".into(), format_fraction(m.participation_median)),
        ("participation_max".into(), format_fraction(m.participation_max)),
        ("h_index".into(), m.h_index.to_string()),
        ("supermajority_rate".into(), format_fraction(m.supermajority_rate)),
        ("turnout_gas_corr".into(), format_fraction(m.turnout_gas_corr)),
    ]
}

/// Key/value summary of a run: outcome figures, metrics, then details.
pub fn summary_csv(report: &ScenarioReport) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("scenario".into(), report.kind.clone()),
        ("succeeded".into(), report.succeeded.to_string()),
        ("attacker_profit".into(), report.attacker_profit.to_string()),
        ("platform_loss".into(), report.platform_loss.to_string()),
    ];
    if let Some(m) = &report.metrics {
        rows.extend(metrics_rows(m));
    }
    for (k, v) in &report.details {
        rows.push((k.clone(), v.clone()));
    }
    let mut out = String::from("key,value\r\n");
    for (k, v) in rows {
        out.push_str(&format!("{},{}\r\n", csv_escape(&k), csv_escape(&v)));
    }
    out
}

pub fn metrics_csv(m: &MetricsSummary) -> String {
    let mut out = String::from("key,value\r\n");
    for (k, v) in metrics_rows(m) {
        out.push_str(&format!("{},{}\r\n", csv_escape(&k), csv_escape(&v)));
    }
    out
}

pub fn timeline_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("block,event,detail\r\n");
    for entry in &report.timeline {
        out.push_str(&format!(
            "{},{},{}\r\n",
            entry.block,
            csv_escape(&entry.event),
            csv_escape(&entry.detail)
        ));
    }
    out
}

/// One JSON object per line, the machine-readable event dump consumed by
/// the `metrics` subcommand.
pub fn events_jsonl(log: &[LogEntry]) -> String {
    let mut out = String::new();
    for entry in log {
        out.push_str(&serde_json::to_string(entry).expect("event serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_events_jsonl(text: &str) -> SimResult<Vec<LogEntry>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| SimError::Config(format!("bad event on line {}: {e}", i + 1)))
        })
        .collect()
}
