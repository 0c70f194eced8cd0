//! Vote-escrow tokenomics: time-locked deposits mint decaying voting
//! power, which directs weekly token emissions to liquidity-pool gauges.
//!
//! Run with: cargo run --example escrow_gauges

use std::collections::BTreeMap;

use govsim::chain::{GasGenerator, GasSeries, SimState, World};
use govsim::escrow::WEEK;
use govsim::event::Event;
use govsim::ledger::TokenLedger;
use govsim::types::*;

fn main() -> SimResult<()> {
    let token = TokenId::new("gov");
    let mut state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 30 })?);
    state.tokens.insert(token.clone(), TokenLedger::new(None));
    for (who, amount) in [("long-term", 52_000_u128), ("short-term", 52_000)] {
        state.apply(0, &Event::Minted { token: token.clone(), to: who.into(), amount });
    }
    state.escrow.tokens_per_epoch = 10_000;
    let mut world = World::new(state);

    // Same deposit, different conviction: lock length scales initial power.
    world.create_lock(&"long-term".into(), 52_000, 52 * WEEK)?;
    world.create_lock(&"short-term".into(), 52_000, 13 * WEEK)?;
    for t in [0, 6 * WEEK, 13 * WEEK, 26 * WEEK] {
        println!(
            "week {:>2}: long-term power {:>6}, short-term power {:>6}",
            t / WEEK,
            world.ve_power(&"long-term".into(), t),
            world.ve_power(&"short-term".into(), t),
        );
    }

    // Two pools, each with a gauge; lockers direct emissions by ve-weight.
    for (pool, lp) in [("stable-pool", "lp-stable"), ("exotic-pool", "lp-exotic")] {
        world.register_pool(&pool.into(), 30, 5_000, BTreeMap::from([(AccountId::new(lp), 10_000u32)]))?;
    }
    world.create_gauge(&"stable-gauge".into(), &"stable-pool".into())?;
    world.create_gauge(&"exotic-gauge".into(), &"exotic-pool".into())?;
    world.vote_gauge_weight(&"long-term".into(), &BTreeMap::from([(GaugeId::new("exotic-gauge"), 10_000u32)]))?;
    world.vote_gauge_weight(&"short-term".into(), &BTreeMap::from([(GaugeId::new("stable-gauge"), 10_000u32)]))?;

    // Distribute three weekly epochs; the long lock's slower decay keeps
    // pulling a growing share toward its gauge.
    let epoch_blocks = world.state.escrow.epoch_length / world.state.block_interval;
    for epoch in 0..3 {
        world.advance_blocks(epoch_blocks)?;
        let amounts = world.distribute_emissions(epoch)?;
        println!("epoch {epoch} emissions: {amounts:?}");
    }
    for lp in ["lp-stable", "lp-exotic"] {
        println!("{lp} accumulated {}", world.token(&token)?.balance(&lp.into()));
    }
    Ok(())
}
