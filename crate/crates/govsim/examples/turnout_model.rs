//! Agent-based turnout under varying gas prices: voters with a private
//! per-vote value abstain when the gas cost exceeds it, producing the
//! documented negative gas/turnout correlation. Writes the event log to
//! `turnout_events.jsonl` so the CLI can recompute the metrics:
//!
//!     cargo run --example turnout_model
//!     cargo run --bin govsim -- metrics --events turnout_events.jsonl --supply 1000000
//!
//! Run with: cargo run --example turnout_model

use std::collections::BTreeSet;

use govsim::analytics::{simulate_turnout, VoterAgent};
use govsim::chain::{GasGenerator, GasSeries, SimState, World};
use govsim::event::Event;
use govsim::governor::{
    ExecutorClass, Governor, GovernorParams, Guardian, Threshold,
};
use govsim::ledger::TokenLedger;
use govsim::report::events_jsonl;
use govsim::types::*;

fn main() -> SimResult<()> {
    // Gas alternates between a cheap and an expensive regime every stride
    // of one proposal lifecycle (delay 1 + activation 1 + period 4 + 1).
    let stride = 7;
    let steps: Vec<(BlockHeight, u64)> =
        (0..22).map(|i| (i * stride, if i % 2 == 0 { 10 } else { 120 })).collect();

    let token = TokenId::new("gov");
    let mut state = SimState::new(GasSeries::new(GasGenerator::Piecewise { steps })?);
    state.tokens.insert(token.clone(), TokenLedger::new(None));
    state.apply(0, &Event::Minted { token: token.clone(), to: "proposer".into(), amount: 1_000_000 });
    state.native.insert("proposer".into(), 1_000_000_000);

    let agents: Vec<VoterAgent> = (0..25)
        .map(|i| VoterAgent {
            id: AccountId::new(format!("agent-{i:02}")),
            stake: 1_000,
            value_per_vote: 8 + i * 6, // 8..152: gas at 120 prices most of them out
            alignment: 0.8,
        })
        .collect();
    for agent in &agents {
        state.native.insert(agent.id.clone(), 1_000_000_000);
    }

    let gov = ContractId::new("governor");
    let params = GovernorParams {
        proposal_threshold: Threshold::Units(0),
        voting_delay: 1,
        voting_period: 4,
        quorum: Threshold::Units(1),
        vote_differential: Threshold::Units(0),
        timelock_delay: 1,
        grace_period: 100,
        max_actions: 10,
        guardian: Guardian { signers: BTreeSet::new(), k: 1 },
        executor_class: ExecutorClass::Short,
        threshold_maintenance: false,
        proposition_power_kind: PowerKind::Voting,
        emergency_commit: false,
    };
    let mut world = World::new(state);
    world.add_governor(&gov, Governor::new(token, params));

    let proposers = vec![AccountId::new("proposer"); 20];
    let outcome = simulate_turnout(&mut world, &gov, &proposers, &agents, 7)?;

    println!("proposal  gas  votes");
    for (id, gas, votes) in &outcome.per_proposal {
        println!("{id:>8} {gas:>4} {votes:>6}");
    }
    println!("gas/turnout correlation: {:.3}", outcome.summary.turnout_gas_corr);

    std::fs::write("turnout_events.jsonl", events_jsonl(&world.log))
        .map_err(|e| SimError::Config(e.to_string()))?;
    println!("event log written to turnout_events.jsonl");
    Ok(())
}
