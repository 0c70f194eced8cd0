//! Checkpointed voting power: delegation moves power without moving
//! tokens, and historical queries return the balance/power as of any past
//! block — the basis of snapshot voting.
//!
//! Run with: cargo run --example delegation_snapshots

use govsim::chain::{GasGenerator, GasSeries, SimState, World};
use govsim::event::Event;
use govsim::ledger::TokenLedger;
use govsim::types::*;

fn main() -> SimResult<()> {
    let token = TokenId::new("uni");
    let mut state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 30 })?);
    state.tokens.insert(token.clone(), TokenLedger::new(None));
    for (who, amount) in [("alice", 700_u128), ("bob", 300)] {
        state.apply(0, &Event::Minted { token: token.clone(), to: who.into(), amount });
    }
    let mut world = World::new(state);

    let power = |world: &World, who: &str, block: BlockHeight| {
        world.token(&token).unwrap().power_at(&who.into(), PowerKind::Voting, block)
    };

    world.advance_blocks(10)?;
    println!("block 10: alice {} / bob {} / carol {}", power(&world, "alice", 10), power(&world, "bob", 10), power(&world, "carol", 10));

    // Delegation moves power, not balance. Everyone self-delegates by
    // default, so alice's 700 shifts wholesale to carol.
    world.delegate(&token, &"alice".into(), &"carol".into(), PowerKind::Voting)?;
    world.advance_blocks(10)?;
    let h = world.height();
    println!("block {h}: alice {} / bob {} / carol {} (alice delegated to carol)", power(&world, "alice", h), power(&world, "bob", h), power(&world, "carol", h));
    println!("         alice still holds {} tokens", world.token(&token)?.balance(&"alice".into()));

    // A transfer out of a delegated balance debits the delegatee.
    world.transfer(&token, &"alice".into(), &"bob".into(), 200)?;
    world.advance_blocks(10)?;
    let h = world.height();
    println!("block {h}: alice {} / bob {} / carol {} (200 tokens moved to bob)", power(&world, "alice", h), power(&world, "bob", h), power(&world, "carol", h));

    // Historical queries are immutable: the past is still the past.
    println!("snapshot at block 15 still shows carol with {}", power(&world, "carol", 15));
    println!("snapshot at block  5 still shows alice with {}", power(&world, "alice", 5));
    Ok(())
}
