//! Meta-governance pass-through: an index fund votes its pooled holdings on
//! a host platform as one block, decided by an internal member tally. The
//! index proposes (and passes) its own token's listing; the host community
//! later freezes the listing through the ordinary process. A tied internal
//! tally abstains the whole block.

use std::collections::BTreeMap;

use crate::chain::{ListingState, World};
use crate::config::ScenarioConfig;
use crate::governor::{preset_governor, Action, ActionKind, Governor, ProposalState};
use crate::types::*;

use super::{base_state, fund_native, seed_token, RunResult, ScenarioReport};

pub fn run_meta_governance(config: &ScenarioConfig) -> SimResult<RunResult> {
    let cfg = &config.meta_governance;
    let token = TokenId::new("host");
    let index = AccountId::new("dpi-index");
    let community = AccountId::new("host-community");
    let gov_id = ContractId::new("host-gov");

    let index_holdings = (cfg.supply as f64 * cfg.index_holdings_fraction) as Units;
    if index_holdings > cfg.supply {
        return Err(SimError::Config("index holdings exceed supply".into()));
    }
    let params = preset_governor(&cfg.host_preset, cfg.supply)?;
    let mut state = base_state(&config.chain)?;
    seed_token(
        &mut state,
        &token,
        None,
        &[
            (index.clone(), index_holdings),
            (community.clone(), cfg.supply - index_holdings),
        ],
    );
    state.governors.insert(gov_id.clone(), Governor::new(token.clone(), params.clone()));
    fund_native(&mut state, &[&index, &community]);
    let mut world = World::new(state);
    world.advance_blocks(1)?;

    // Internal member tally decides the block's vote.
    let block_vote = if cfg.member_for_weight > cfg.member_against_weight {
        Some(true)
    } else if cfg.member_for_weight < cfg.member_against_weight {
        Some(false)
    } else {
        None // tie: abstain
    };

    let mut details = BTreeMap::new();
    details.insert(
        "internal_tally".into(),
        format!("{} for / {} against", cfg.member_for_weight, cfg.member_against_weight),
    );
    details.insert("pass_through_weight".into(), index_holdings.to_string());

    // Phase 1: the index proposes listing its own token.
    let listing_proposal = world.propose(
        &gov_id,
        &index,
        vec![Action::new(
            ActionKind::ListToken { symbol: cfg.listed_symbol.clone() },
            format!("List {} on the platform", cfg.listed_symbol),
        )],
        "ipfs://index-listing".into(),
    )?;
    world.advance_blocks(params.voting_delay + 1)?;
    if let Some(support) = block_vote {
        world.cast_vote(&gov_id, &index, listing_proposal, support)?;
    }
    world.advance_blocks(params.voting_period + 1)?;
    let after_vote = world.proposal_state(&gov_id, listing_proposal)?;
    let listed = if after_vote == ProposalState::Succeeded {
        world.queue(&gov_id, listing_proposal)?;
        world.advance_blocks(params.timelock_delay)?;
        world.execute(&gov_id, listing_proposal)?;
        true
    } else {
        details.insert("listing_outcome".into(), after_vote.to_string());
        false
    };

    // Phase 2: the host community freezes the listing over the index's
    // opposing block vote.
    if listed {
        let freeze_proposal = world.propose(
            &gov_id,
            &community,
            vec![Action::new(
                ActionKind::FreezeToken { symbol: cfg.listed_symbol.clone() },
                format!("Freeze {} on V2", cfg.listed_symbol),
            )],
            "ipfs://freeze-motion".into(),
        )?;
        world.advance_blocks(params.voting_delay + 1)?;
        world.cast_vote(&gov_id, &community, freeze_proposal, true)?;
        world.cast_vote(&gov_id, &index, freeze_proposal, false)?;
        world.advance_blocks(params.voting_period + 1)?;
        if world.proposal_state(&gov_id, freeze_proposal)? == ProposalState::Succeeded {
            world.queue(&gov_id, freeze_proposal)?;
            world.advance_blocks(params.timelock_delay)?;
            world.execute(&gov_id, freeze_proposal)?;
        }
    }

    let final_listing = world.state.listings.get(&cfg.listed_symbol).copied();
    details.insert(
        "final_listing_state".into(),
        match final_listing {
            Some(ListingState::Listed) => "listed".into(),
            Some(ListingState::Frozen) => "frozen".into(),
            None => "never listed".into(),
        },
    );

    let report = ScenarioReport {
        kind: "meta_governance".into(),
        succeeded: listed,
        attacker_profit: 0,
        platform_loss: 0,
        timeline: super::timeline(&world.log),
        metrics: Some(crate::analytics::compute_metrics(&world.log, cfg.supply)),
        details,
    };
    Ok(RunResult { world, report })
}
