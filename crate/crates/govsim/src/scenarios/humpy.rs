//! Gauge-war whale: a large vote-escrow position spread across several
//! addresses steers weekly emissions to a pool the attacker fully owns,
//! extracting emissions far in excess of the protocol revenue the pool
//! generates. Community counter-moves (gauge kill, peace treaty) are
//! modeled as governance interventions taking effect at a chosen epoch.

use std::collections::BTreeMap;

use crate::chain::World;
use crate::config::{fraction_to_bps, CommunityResponse, ScenarioConfig};
use crate::event::Event;
use crate::governor::{preset_governor, Governor};
use crate::types::*;

use super::{balance_delta, base_state, fund_native, seed_token, RunResult, ScenarioReport};

pub fn run_humpy(config: &ScenarioConfig) -> SimResult<RunResult> {
    let cfg = &config.humpy;
    let token = TokenId::new("bal");
    let community = AccountId::new("bal-community");
    let gov_id = ContractId::new("bal-gov");
    let gov_account: AccountId = (&gov_id).into();
    let attacker_pool = LiquidityPoolId::new("cream-weth");
    let community_pool = LiquidityPoolId::new("core-pool");
    let attacker_gauge = GaugeId::new("cream-weth-gauge");
    let community_gauge = GaugeId::new("core-gauge");

    let fraction_bps = fraction_to_bps(cfg.attacker_ve_fraction);
    let attacker_total = cfg.total_locked * fraction_bps as Units / 10_000;
    let community_total = cfg.total_locked - attacker_total;
    let n = cfg.n_attacker_addresses as usize;
    let attackers: Vec<AccountId> =
        (1..=n).map(|i| AccountId::new(format!("humpy-{i}"))).collect();
    let mut attacker_amounts = vec![attacker_total / n as Units; n];
    attacker_amounts[0] += attacker_total - attacker_amounts.iter().sum::<Units>();

    let mut state = base_state(&config.chain)?;
    let mut balances: Vec<(AccountId, Units)> =
        attackers.iter().cloned().zip(attacker_amounts.iter().copied()).collect();
    balances.push((community.clone(), community_total));
    seed_token(&mut state, &token, None, &balances);
    state.escrow.token = token.clone();
    state.escrow.tokens_per_epoch = cfg.tokens_per_epoch;
    let supply = cfg.total_locked;
    state
        .governors
        .insert(gov_id.clone(), Governor::new(token.clone(), preset_governor("compound", supply)?));
    fund_native(&mut state, &[&community]);
    let mut world = World::new(state);

    // Locks and gauge setup at t = 0 (an epoch boundary).
    let max_lock = world.state.escrow.max_lock_duration;
    for (account, amount) in attackers.iter().zip(attacker_amounts.iter()) {
        world.create_lock(account, *amount, max_lock)?;
    }
    world.create_lock(&community, community_total, max_lock)?;
    world.register_pool(
        &attacker_pool,
        cfg.pool_fee_bps,
        cfg.protocol_fee_share_bps,
        BTreeMap::from([(attackers[0].clone(), 10_000u32)]),
    )?;
    world.register_pool(
        &community_pool,
        30,
        cfg.protocol_fee_share_bps,
        BTreeMap::from([(community.clone(), 10_000u32)]),
    )?;
    world.create_gauge(&attacker_gauge, &attacker_pool)?;
    world.create_gauge(&community_gauge, &community_pool)?;
    for account in &attackers {
        world.vote_gauge_weight(account, &BTreeMap::from([(attacker_gauge.clone(), 10_000u32)]))?;
    }
    world.vote_gauge_weight(&community, &BTreeMap::from([(community_gauge.clone(), 10_000u32)]))?;

    let blocks_per_epoch = world.state.escrow.epoch_length / world.state.block_interval;
    let mut responded = false;
    for epoch in 0..cfg.epochs as u64 {
        // Responses are timed so `epoch` in the config names the first
        // distribution they affect.
        match &cfg.community_response {
            CommunityResponse::KillGauge { epoch: at } if u64::from(*at) == epoch && !responded => {
                world.kill_gauge(&gov_account, &attacker_gauge)?;
                responded = true;
            }
            CommunityResponse::PeaceTreaty { fraction_bps, epoch: at }
                if u64::from(*at) == epoch && !responded =>
            {
                world.grant_emission_share(&gov_account, &attackers[0], *fraction_bps)?;
                world.kill_gauge(&gov_account, &attacker_gauge)?;
                responded = true;
            }
            _ => {}
        }
        world.record_swap_volume(&attacker_pool, cfg.volume_per_epoch)?;
        world.advance_blocks(blocks_per_epoch)?;
        world.distribute_emissions(epoch)?;
    }

    // Fold attacker takings and protocol revenue out of the log.
    let mut attacker_emissions: Units = 0;
    let mut post_response_emissions: Units = 0;
    let mut post_response_total: Units = 0;
    let mut revenue: Units = 0;
    let response_epoch = match &cfg.community_response {
        CommunityResponse::KillGauge { epoch } | CommunityResponse::PeaceTreaty { epoch, .. } => {
            Some(u64::from(*epoch))
        }
        CommunityResponse::None => None,
    };
    for entry in &world.log {
        match &entry.event {
            Event::EmissionsDistributed { epoch, credits, .. } => {
                let take: Units = credits
                    .iter()
                    .filter(|(a, _)| attackers.contains(a))
                    .map(|(_, v)| *v)
                    .sum();
                attacker_emissions += take;
                if response_epoch.map(|r| *epoch >= r).unwrap_or(false) {
                    post_response_emissions += take;
                    post_response_total += credits.values().sum::<Units>();
                }
            }
            Event::SwapRecorded { revenue: r, .. } => revenue += r,
            _ => {}
        }
    }

    let attacker_refs: Vec<&AccountId> = attackers.iter().collect();
    let attacker_profit = balance_delta(&world.log, &super::account_set(&attacker_refs));

    let mut details = BTreeMap::new();
    details.insert("attacker_locked".into(), attacker_total.to_string());
    details.insert("community_locked".into(), community_total.to_string());
    details.insert("attacker_emissions".into(), attacker_emissions.to_string());
    details.insert("protocol_revenue".into(), revenue.to_string());
    details.insert(
        "emissions_to_revenue_ratio".into(),
        if revenue == 0 {
            "inf".into()
        } else {
            format!("{:.2}", attacker_emissions as f64 / revenue as f64)
        },
    );
    if response_epoch.is_some() {
        details.insert("post_response_attacker_emissions".into(), post_response_emissions.to_string());
        details.insert("post_response_total_emissions".into(), post_response_total.to_string());
    }

    let report = ScenarioReport {
        kind: "humpy_gauge".into(),
        succeeded: attacker_emissions > revenue,
        attacker_profit,
        platform_loss: attacker_emissions as i128,
        timeline: super::timeline(&world.log),
        metrics: None,
        details,
    };
    Ok(RunResult { world, report })
}
