//! Accidental delegation: a routine internal transfer lands on a wallet
//! with a standing self-delegation, instantly making it one of the largest
//! delegates on the leaderboard without anyone casting a vote.

use std::collections::BTreeMap;

use crate::chain::World;
use crate::config::ScenarioConfig;
use crate::types::*;

use super::{base_state, fund_native, seed_token, RunResult, ScenarioReport};

pub fn run_accidental_delegation(config: &ScenarioConfig) -> SimResult<RunResult> {
    let cfg = &config.accidental_delegation;
    let token = TokenId::new("uni");
    let cold = AccountId::new("exchange-cold");
    let hot = AccountId::new("exchange-hot");
    let void = AccountId::new("unclaimed-void");

    let delegate_total: Units = cfg.other_delegates.iter().map(|(_, u)| *u as Units).sum();
    if cfg.transfer_amount + delegate_total > cfg.supply {
        return Err(SimError::Config("balances exceed supply".into()));
    }
    let reserve = AccountId::new("dormant-reserve");
    let reserve_amount = cfg.supply - cfg.transfer_amount - delegate_total;

    let mut state = base_state(&config.chain)?;
    let mut balances: Vec<(AccountId, Units)> = vec![
        (cold.clone(), cfg.transfer_amount),
        (reserve.clone(), reserve_amount),
    ];
    for (name, amount) in &cfg.other_delegates {
        balances.push((AccountId::new(name.clone()), *amount as Units));
    }
    seed_token(&mut state, &token, None, &balances);
    fund_native(&mut state, &[&cold, &hot]);
    let mut world = World::new(state);

    // Undelegated supply sits out of the leaderboard.
    for kind in PowerKind::ALL {
        world.delegate(&token, &reserve, &void, kind)?;
    }
    if !cfg.recipient_has_standing_self_delegation {
        for kind in PowerKind::ALL {
            world.delegate(&token, &hot, &void, kind)?;
        }
    }
    world.advance_blocks(1)?;

    let power_before = world.token(&token)?.power_now(&hot, PowerKind::Voting);
    world.transfer(&token, &cold, &hot, cfg.transfer_amount)?;
    world.advance_blocks(1)?;
    let power_after = world.token(&token)?.power_now(&hot, PowerKind::Voting);

    // Rank on the leaderboard of known delegates.
    let mut leaderboard: Vec<(AccountId, Units)> = cfg
        .other_delegates
        .iter()
        .map(|(name, _)| {
            let id = AccountId::new(name.clone());
            let power = world.token(&token).unwrap().power_now(&id, PowerKind::Voting);
            (id, power)
        })
        .collect();
    leaderboard.push((hot.clone(), power_after));
    leaderboard.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let rank = leaderboard.iter().position(|(id, _)| *id == hot).unwrap() + 1;

    let shifted = power_after.saturating_sub(power_before);
    let mut details = BTreeMap::new();
    details.insert("power_before".into(), power_before.to_string());
    details.insert("power_after".into(), power_after.to_string());
    details.insert("power_shifted".into(), shifted.to_string());
    details.insert("delegate_rank".into(), rank.to_string());
    details.insert(
        "leaderboard".into(),
        leaderboard
            .iter()
            .map(|(id, p)| format!("{id}:{p}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    details.insert("votes_cast".into(), "0".into());

    let report = ScenarioReport {
        kind: "accidental_delegation".into(),
        succeeded: shifted == cfg.transfer_amount,
        attacker_profit: 0,
        platform_loss: 0,
        timeline: super::timeline(&world.log),
        metrics: None,
        details,
    };
    Ok(RunResult { world, report })
}
