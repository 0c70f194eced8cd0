//! Borrowing the governance token at negative effective interest: per-epoch
//! reward emissions to borrowers exceed the interest owed, so the cheapest
//! way to accumulate voting power is to borrow it and hold.

use std::collections::BTreeMap;

use crate::chain::World;
use crate::config::ScenarioConfig;
use crate::governor::BLOCKS_PER_DAY;
use crate::types::*;

use super::{balance_delta, base_state, fund_native, seed_token, RunResult, ScenarioReport};

pub fn run_negative_interest(config: &ScenarioConfig) -> SimResult<RunResult> {
    let cfg = &config.negative_interest;
    if cfg.borrow_amount > cfg.supply {
        return Err(SimError::Config("borrow_amount exceeds supply".into()));
    }
    let token = TokenId::new("comp");
    let pool = AccountId::new("lending-pool");
    let borrower = AccountId::new("borrower");
    let distributor = AccountId::new("comp-distributor");

    let mut state = base_state(&config.chain)?;
    seed_token(&mut state, &token, Some(distributor.clone()), &[(pool.clone(), cfg.supply)]);
    fund_native(&mut state, &[&borrower]);
    let mut world = World::new(state);
    world.advance_blocks(1)?;

    world.transfer(&token, &pool, &borrower, cfg.borrow_amount)?;

    let interest_per_epoch = cfg.borrow_amount * cfg.interest_bps_per_epoch as Units / 10_000;
    let reward_per_epoch = cfg.borrow_amount * cfg.reward_bps_per_epoch as Units / 10_000;
    let mut interest_total: Units = 0;
    let mut reward_total: Units = 0;
    let mut power_series: Vec<Units> = vec![world.token(&token)?.power_now(&borrower, PowerKind::Voting)];
    for _ in 0..cfg.epochs {
        world.advance_blocks(BLOCKS_PER_DAY)?;
        // Interest accrues against external collateral; it never reduces the
        // borrowed token balance, so voting power is unaffected by it.
        interest_total += interest_per_epoch;
        if reward_per_epoch > 0 {
            world.mint(&token, &distributor, &borrower, reward_per_epoch)?;
            reward_total += reward_per_epoch;
        }
        power_series.push(world.token(&token)?.power_now(&borrower, PowerKind::Voting));
    }
    let strictly_increasing = power_series.windows(2).all(|w| w[1] > w[0]);
    let flat = power_series.windows(2).all(|w| w[1] == w[0]);

    // Close out the position: principal goes back, rewards stay.
    world.transfer(&token, &borrower, &pool, cfg.borrow_amount)?;

    let net = reward_total as i128 - interest_total as i128;
    let net_rate_bps = cfg.interest_bps_per_epoch as i64 - cfg.reward_bps_per_epoch as i64;

    let mut details = BTreeMap::new();
    details.insert("interest_total".into(), interest_total.to_string());
    details.insert("reward_total".into(), reward_total.to_string());
    details.insert("net_rate_bps_per_epoch".into(), net_rate_bps.to_string());
    details.insert("power_start".into(), power_series.first().unwrap().to_string());
    details.insert("power_end".into(), power_series.last().unwrap().to_string());
    details.insert("power_strictly_increasing".into(), strictly_increasing.to_string());
    details.insert("power_flat".into(), flat.to_string());
    details.insert(
        "ledger_delta".into(),
        balance_delta(&world.log, &super::account_set(&[&borrower])).to_string(),
    );

    let report = ScenarioReport {
        kind: "negative_interest".into(),
        succeeded: net > 0,
        attacker_profit: net,
        platform_loss: reward_total as i128,
        timeline: super::timeline(&world.log),
        metrics: None,
        details,
    };
    Ok(RunResult { world, report })
}
