//! Flashloan governance attack in one atomic transaction: borrow most of
//! the voting supply, pass a proposal draining a vault, repay — and watch
//! the whole thing unwind when the governor has a timelock.
//!
//! Run with: cargo run --example flashloan_vote

use std::collections::{BTreeMap, BTreeSet};

use govsim::chain::{Call, GasGenerator, GasSeries, SimState, TxScript, World};
use govsim::contracts::Implementation;
use govsim::event::Event;
use govsim::governor::{
    Action, ActionKind, ExecutorClass, Governor, GovernorParams, Guardian, Threshold,
};
use govsim::ledger::{FlashPool, TokenLedger};
use govsim::types::*;

/// A protocol with a flash-lendable governance token and a vault holding
/// collateral. `instant` controls whether proposals can be executed in the
/// same block they are voted (the vulnerable configuration).
fn build_world(instant: bool) -> SimResult<World> {
    let supply: Units = 1_000_000;
    let liquidity: Units = 700_000;
    let token = TokenId::new("gov");
    let vault = ContractId::new("vault");
    let governor = ContractId::new("governor");

    let mut state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 30 })?);
    state.tokens.insert(token.clone(), TokenLedger::new(None));
    for (who, amount) in [("attacker", 10_000), ("community", supply - liquidity - 10_000)] {
        state.apply(0, &Event::Minted { token: token.clone(), to: who.into(), amount });
    }
    state.apply(0, &Event::Minted { token: token.clone(), to: "lender".into(), amount: liquidity });
    state.flash_pools.insert(
        PoolId::new("lender"),
        FlashPool { token: token.clone(), account: "lender".into(), fee_bps: 9 },
    );

    // Collateral sits in a proxy vault administered by the governor.
    let collateral = TokenId::new("collateral");
    state.tokens.insert(collateral.clone(), TokenLedger::new(None));
    state.apply(0, &Event::Minted { token: collateral, to: (&vault).into(), amount: 500_000 });
    state.apply(0, &Event::ImplementationRegistered {
        id: "vault-logic".into(),
        implementation: Implementation { name: "vault".into(), version: 1, ops: BTreeMap::new() },
    });
    state.apply(0, &Event::ProxyCreated {
        id: vault,
        admin: (&governor).into(),
        implementation: "vault-logic".into(),
    });

    let params = GovernorParams {
        proposal_threshold: Threshold::Units(0),
        voting_delay: 0,
        voting_period: 7_200,
        quorum: Threshold::Units(supply / 2),
        vote_differential: Threshold::Units(1),
        timelock_delay: if instant { 0 } else { 7_200 },
        grace_period: 14 * 7_200,
        max_actions: 10,
        guardian: Guardian { signers: BTreeSet::new(), k: 1 },
        executor_class: ExecutorClass::Short,
        threshold_maintenance: false,
        proposition_power_kind: PowerKind::Voting,
        emergency_commit: instant,
    };
    state.native.insert(AccountId::new("attacker"), 1_000_000_000);
    let mut world = World::new(state);
    world.add_governor(&governor, Governor::new(token, params));
    world.advance_blocks(1)?;
    Ok(world)
}

fn attack(world: &mut World) -> SimResult<()> {
    let governor = ContractId::new("governor");
    let drain = Action::new(
        ActionKind::VaultTransfer {
            vault: "vault".into(),
            token: TokenId::new("collateral"),
            to: "attacker".into(),
            amount: 500_000,
        },
        // the label is free text — nothing checks it against the action
        "Donate funds to charity",
    );
    let tx = TxScript::new(
        "attacker",
        vec![Call::FlashBorrow {
            pool: PoolId::new("lender"),
            amount: 700_000,
            body: vec![
                Call::Propose { governor: governor.clone(), actions: vec![drain], metadata_hash: String::new() },
                Call::CastVote { governor: governor.clone(), proposal: 0, support: true },
                Call::EmergencyExecute { governor, proposal: 0 },
                Call::FlashRepay { pool: PoolId::new("lender"), amount: 700_000 + 630 },
            ],
        }],
    );
    let outcome = world.execute_atomic(&tx)?;
    println!("  transaction: {outcome:?}");
    let loot = world.token(&TokenId::new("collateral"))?.balance(&"attacker".into());
    println!("  attacker collateral after tx: {loot}");
    Ok(())
}

fn main() -> SimResult<()> {
    println!("vulnerable governor (no timelock, emergency commit):");
    attack(&mut build_world(true)?)?;

    println!("hardened governor (timelock, voting opens after the snapshot):");
    attack(&mut build_world(false)?)?;
    Ok(())
}
