//! Deterministic simulator of token-based DAO governance protocols.
//!
//! The crate models the full governance stack at desk scale:
//!
//! - a block clock with configurable gas pricing and atomic,
//!   all-or-nothing transaction scripts ([`chain`]);
//! - a checkpointed governance-token ledger with dual delegation and
//!   flashloan pools ([`ledger`]);
//! - upgradeable-proxy contracts whose behavior can be swapped by
//!   governance ([`contracts`]);
//! - a parameterized governor covering proposal lifecycle, snapshot
//!   voting, quorum/differential pass criteria, timelocks, and guardian
//!   cancellation, with presets for the major deployed platforms
//!   ([`governor`]);
//! - vote-escrow tokenomics: decaying locks, gauge-weight voting, and
//!   epochal emissions ([`escrow`]);
//! - reproductions of documented governance attacks ([`scenarios`]) and
//!   voting-pattern analytics over the event log ([`analytics`]).
//!
//! Everything is event-sourced: each mutation appends to a log that can be
//! replayed over the genesis snapshot to reconstruct the final state
//! exactly, and identical configs yield identical logs.
//!
//! The `examples/` directory is the primary interface: one runnable
//! example per capability. A thin `govsim` binary exposes `run`,
//! `metrics`, and `list-scenarios` for scripted use.

pub mod analytics;
pub mod chain;
pub mod cli;
pub mod config;
pub mod contracts;
pub mod escrow;
pub mod event;
pub mod governor;
pub mod ledger;
pub mod report;
pub mod scenarios;
pub mod types;

pub use chain::{Call, GasGenerator, GasSeries, SimState, TxOutcome, TxScript, World};
pub use config::ScenarioConfig;
pub use event::{Event, LogEntry};
pub use scenarios::{run_scenario, RunResult, ScenarioReport};
pub use types::*;
