//! Walk a proposal through the full Compound-style lifecycle:
//! Pending -> Active -> Succeeded -> Queued -> Executed.
//!
//! Run with: cargo run --example proposal_lifecycle

use govsim::chain::{GasGenerator, GasSeries, SimState, World};
use govsim::event::Event;
use govsim::governor::{preset_governor, Action, ActionKind, Governor};
use govsim::ledger::TokenLedger;
use govsim::types::*;

fn main() -> SimResult<()> {
    // Genesis: one token, two holders, a Compound-preset governor.
    let supply: Units = 10_000_000;
    let token = TokenId::new("comp");
    let mut state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 30 })?);
    state.tokens.insert(token.clone(), TokenLedger::new(None));
    for (who, amount) in [("whale", supply * 3 / 5), ("minnow", supply * 2 / 5)] {
        state.apply(0, &Event::Minted { token: token.clone(), to: who.into(), amount });
    }

    let gov = ContractId::new("governor");
    let mut params = preset_governor("compound", supply)?;
    // Shrink the day-scale windows so the example finishes instantly.
    params.voting_delay = 5;
    params.voting_period = 20;
    params.timelock_delay = 10;
    let mut world = World::new(state);
    world.add_governor(&gov, Governor::new(token.clone(), params.clone()));
    world.advance_blocks(1)?;

    let show = |world: &World, id, label: &str| {
        println!("{:>24}: {}", label, world.proposal_state(&gov, id).unwrap());
    };

    let id = world.propose(
        &gov,
        &"whale".into(),
        vec![Action::new(ActionKind::ListToken { symbol: "NEW".into() }, "List NEW as collateral")],
        "ipfs://proposal-metadata".into(),
    )?;
    show(&world, id, "after propose");

    // Voting opens strictly after the snapshot block, so balances at the
    // snapshot are final before any vote weight is read.
    world.advance_blocks(params.voting_delay + 1)?;
    show(&world, id, "voting window open");
    world.cast_vote(&gov, &"whale".into(), id, true)?;
    world.cast_vote(&gov, &"minnow".into(), id, false)?;

    world.advance_blocks(params.voting_period)?;
    show(&world, id, "voting window closed");

    world.queue(&gov, id)?;
    show(&world, id, "queued behind timelock");

    world.advance_blocks(params.timelock_delay)?;
    world.execute(&gov, id)?;
    show(&world, id, "executed");

    println!("listings after execution: {:?}", world.state.listings);
    Ok(())
}
