//! Snapshot-window proposer: acquire a large block of tokens just before
//! proposing, vote the proposal through on the activation-block snapshot,
//! and dump right after execution. The holding interval barely covers the
//! proposal's lifecycle. Dumping before execution instead trips the
//! threshold-maintenance check and the proposal is canceled.

use std::collections::{BTreeMap, BTreeSet};

use crate::chain::{Call, TxScript, World};
use crate::config::ScenarioConfig;
use crate::governor::{preset_governor, Action, ActionKind, Governor, ProposalState};
use crate::types::*;

use super::{base_state, fund_native, seed_token, RunResult, ScenarioReport};

pub fn run_snapshot_proposer(config: &ScenarioConfig) -> SimResult<RunResult> {
    let cfg = &config.snapshot_proposer;
    if cfg.acquire_block_offset == 0 {
        return Err(SimError::Config("acquire_block_offset must be at least 1".into()));
    }
    let token = TokenId::new("aave");
    let attacker = AccountId::new("proposer-x");
    let market = AccountId::new("otc-market");
    let others = AccountId::new("other-voters");
    let reserve = AccountId::new("dormant-reserve");
    let watchdog = AccountId::new("watchdog");
    let gov_id = ContractId::new("aave-gov");

    if cfg.attacker_weight + cfg.other_for_votes > cfg.supply {
        return Err(SimError::Config("vote weights exceed supply".into()));
    }
    let params = preset_governor(&cfg.target_platform_preset, cfg.supply)?;
    let mut state = base_state(&config.chain)?;
    seed_token(
        &mut state,
        &token,
        None,
        &[
            (market.clone(), cfg.attacker_weight),
            (others.clone(), cfg.other_for_votes),
            (reserve.clone(), cfg.supply - cfg.attacker_weight - cfg.other_for_votes),
        ],
    );
    state.governors.insert(gov_id.clone(), Governor::new(token.clone(), params.clone()));
    fund_native(&mut state, &[&attacker, &market, &others, &watchdog]);
    let mut world = World::new(state);
    world.advance_blocks(1)?;

    // Acquire, wait the configured gap, propose.
    let acquire_block = world.height();
    run_tx(&mut world, &market, vec![Call::Transfer {
        token: token.clone(),
        to: attacker.clone(),
        amount: cfg.attacker_weight,
    }])?;
    world.advance_blocks(cfg.acquire_block_offset)?;
    let proposal = world.governor(&gov_id)?.next_id;
    run_tx(&mut world, &attacker, vec![Call::Propose {
        governor: gov_id.clone(),
        actions: vec![Action::new(
            ActionKind::ListToken { symbol: cfg.listed_symbol.clone() },
            format!("Add {} as collateral on V2", cfg.listed_symbol),
        )],
        metadata_hash: "ipfs://listing-risk-analysis".into(),
    }])?;

    // Vote on the activation-block snapshot.
    world.advance_blocks(params.voting_delay + 1)?;
    run_tx(&mut world, &attacker, vec![Call::CastVote {
        governor: gov_id.clone(),
        proposal,
        support: true,
    }])?;
    run_tx(&mut world, &others, vec![Call::CastVote {
        governor: gov_id.clone(),
        proposal,
        support: true,
    }])?;
    world.advance_blocks(params.voting_period + 1)?;
    run_tx(&mut world, &attacker, vec![Call::Queue { governor: gov_id.clone(), proposal }])?;

    let dump = |world: &mut World| -> SimResult<()> {
        let held = world.token(&token)?.balance(&attacker);
        run_tx(world, &attacker, vec![Call::Transfer {
            token: token.clone(),
            to: market.clone(),
            amount: held,
        }])
    };

    let mut details = BTreeMap::new();
    if cfg.dump_block_offset < 0 {
        // Dump while queued; execution then fails threshold maintenance and
        // the proposal gets canceled.
        let early = (cfg.dump_block_offset.unsigned_abs()).clamp(1, params.timelock_delay - 1);
        world.advance_blocks(early)?;
        dump(&mut world)?;
        world.advance_blocks(params.timelock_delay - early)?;
        match world.execute(&gov_id, proposal) {
            Err(e) => {
                details.insert("execute_attempt".into(), e.to_string());
            }
            Ok(()) => {
                return Err(SimError::Precondition(
                    "execution succeeded despite dumped proposer stake".into(),
                ))
            }
        }
        world.cancel(&gov_id, &watchdog, proposal, &BTreeSet::new())?;
    } else {
        world.advance_blocks(params.timelock_delay)?;
        run_tx(&mut world, &attacker, vec![Call::Execute { governor: gov_id.clone(), proposal }])?;
        world.advance_blocks(cfg.dump_block_offset.max(1) as u64)?;
        dump(&mut world)?;
    }

    let final_state = world.proposal_state(&gov_id, proposal)?;
    let executed = final_state == ProposalState::Executed;
    let total_for = cfg.attacker_weight + cfg.other_for_votes;
    let share = cfg.attacker_weight as f64 / total_for as f64 * 100.0;
    let intervals = crate::analytics::holding_duration(&world.log, &token, &attacker);

    details.insert("attacker_vote_share_percent".into(), format!("{share:.2}"));
    details.insert("total_for_votes".into(), total_for.to_string());
    details.insert("quorum".into(), params.quorum.resolve(cfg.supply).to_string());
    details.insert("proposal_state".into(), final_state.to_string());
    details.insert(
        "listed".into(),
        world.state.listings.contains_key(&cfg.listed_symbol).to_string(),
    );
    if let Some(iv) = intervals.first() {
        details.insert("acquire_block".into(), iv.acquire_block.to_string());
        details.insert(
            "dispose_block".into(),
            iv.dispose_block.map(|b| b.to_string()).unwrap_or_else(|| "held".into()),
        );
        details.insert("proposals_overlapping_hold".into(), iv.overlapped.len().to_string());
    }
    details.insert("acquired_at".into(), acquire_block.to_string());

    let report = ScenarioReport {
        kind: "snapshot_proposer".into(),
        succeeded: executed,
        // Tokens were acquired and returned in full; on-chain delta is zero
        // and the economic gain is realized off-chain on the dump.
        attacker_profit: super::balance_delta(&world.log, &super::account_set(&[&attacker])),
        platform_loss: 0,
        timeline: super::timeline(&world.log),
        metrics: Some(crate::analytics::compute_metrics(&world.log, cfg.supply)),
        details,
    };
    Ok(RunResult { world, report })
}

/// Run a single-sender script and fail the scenario on revert.
fn run_tx(world: &mut World, sender: &AccountId, calls: Vec<Call>) -> SimResult<()> {
    match world.execute_atomic(&TxScript::new(sender.clone(), calls))? {
        crate::chain::TxOutcome::Committed { .. } => Ok(()),
        crate::chain::TxOutcome::Reverted { reason, .. } => {
            Err(SimError::Precondition(format!("unexpected revert by {sender}: {reason}")))
        }
    }
}
