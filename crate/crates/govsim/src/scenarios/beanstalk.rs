//! Flashloan governance takeover: borrow a voting majority, push a
//! disguised vault-draining proposal through in a single transaction, and
//! repay the loan out of the drained funds. Succeeds exactly when the
//! governor allows instant execution (no voting delay, emergency commit);
//! with a voting delay or timelock in place the same transaction reverts
//! and the flashloan unwinds.

use std::collections::BTreeMap;

use crate::chain::{Call, TxOutcome, TxScript, World};
use crate::config::ScenarioConfig;
use crate::contracts::Implementation;
use crate::event::Event;
use crate::governor::{
    Action, ActionKind, ExecutorClass, Governor, GovernorParams, Guardian, Threshold,
    BLOCKS_PER_DAY,
};
use crate::types::*;

use super::{account_set, balance_delta, base_state, fund_native, seed_token, RunResult, ScenarioReport};

pub fn run_beanstalk(config: &ScenarioConfig) -> SimResult<RunResult> {
    let cfg = &config.beanstalk;
    let attacker = AccountId::new("exploiter");
    let community = AccountId::new("bean-community");
    let pool_account = AccountId::new("bean-pool");
    let pool_id = PoolId::new("bean-pool");
    let gov_id = ContractId::new("beanstalk-gov");
    let vault_id = ContractId::new("beanstalk-vault");
    let bean = TokenId::new("bean");
    let collateral = TokenId::new("bean3crv");

    let liquidity = (cfg.supply as f64 * cfg.pool_liquidity_fraction) as Units;
    let quorum = (cfg.supply as f64 * cfg.quorum_fraction) as Units;
    if cfg.attacker_initial + liquidity > cfg.supply {
        return Err(SimError::Config("pool liquidity plus attacker stake exceeds supply".into()));
    }

    let mut state = base_state(&config.chain)?;
    seed_token(
        &mut state,
        &bean,
        None,
        &[
            (attacker.clone(), cfg.attacker_initial),
            (pool_account.clone(), liquidity),
            (community.clone(), cfg.supply - cfg.attacker_initial - liquidity),
        ],
    );
    seed_token(&mut state, &collateral, None, &[((&vault_id).into(), cfg.collateral_value)]);
    state.flash_pools.insert(
        pool_id.clone(),
        crate::ledger::FlashPool {
            token: bean.clone(),
            account: pool_account.clone(),
            fee_bps: cfg.flash_fee_bps,
        },
    );
    state.apply(0, &Event::ImplementationRegistered {
        id: ContractId::new("silo-v1"),
        implementation: Implementation {
            name: "silo".into(),
            version: 1,
            ops: BTreeMap::new(),
        },
    });
    state.apply(0, &Event::ProxyCreated {
        id: vault_id.clone(),
        admin: (&gov_id).into(),
        implementation: ContractId::new("silo-v1"),
    });
    let params = GovernorParams {
        proposal_threshold: Threshold::Units(0),
        voting_delay: if cfg.instant_execution { 0 } else { BLOCKS_PER_DAY },
        voting_period: 7 * BLOCKS_PER_DAY,
        quorum: Threshold::Units(quorum),
        vote_differential: Threshold::Units(1),
        timelock_delay: if cfg.instant_execution { 0 } else { BLOCKS_PER_DAY },
        grace_period: 14 * BLOCKS_PER_DAY,
        max_actions: 10,
        guardian: Guardian { signers: Default::default(), k: usize::MAX },
        executor_class: ExecutorClass::Short,
        threshold_maintenance: false,
        proposition_power_kind: PowerKind::Voting,
        emergency_commit: cfg.instant_execution,
    };
    state.governors.insert(gov_id.clone(), Governor::new(bean.clone(), params));
    fund_native(&mut state, &[&attacker]);

    let mut world = World::new(state);
    world.advance_blocks(1)?;

    let fee = liquidity * cfg.flash_fee_bps as Units / 10_000;
    let proposal = world.governor(&gov_id)?.next_id;
    let drain = Action::new(
        ActionKind::VaultTransfer {
            vault: vault_id.clone(),
            token: collateral.clone(),
            to: attacker.clone(),
            amount: cfg.collateral_value,
        },
        "Donate funds to Ukraine",
    );
    let tx = TxScript::new(
        attacker.clone(),
        vec![Call::FlashBorrow {
            pool: pool_id.clone(),
            amount: liquidity,
            body: vec![
                Call::Propose {
                    governor: gov_id.clone(),
                    actions: vec![drain],
                    metadata_hash: "ipfs://bip-18".into(),
                },
                Call::CastVote { governor: gov_id.clone(), proposal, support: true },
                Call::EmergencyExecute { governor: gov_id.clone(), proposal },
                Call::FlashRepay { pool: pool_id.clone(), amount: liquidity + fee },
            ],
        }],
    );
    let outcome = world.execute_atomic(&tx)?;

    let drained = world.token(&collateral)?.balance(&attacker);
    let succeeded = outcome.is_committed() && drained == cfg.collateral_value;
    let attacker_profit = balance_delta(&world.log, &account_set(&[&attacker]));

    let mut details = BTreeMap::new();
    details.insert("borrowed".into(), liquidity.to_string());
    details.insert("flash_fee".into(), fee.to_string());
    details.insert("quorum".into(), quorum.to_string());
    details.insert("collateral_drained".into(), drained.to_string());
    if let TxOutcome::Reverted { reason, .. } = &outcome {
        details.insert("revert_reason".into(), reason.clone());
    }

    let report = ScenarioReport {
        kind: "beanstalk_flashloan".into(),
        succeeded,
        attacker_profit,
        platform_loss: if succeeded { cfg.collateral_value as i128 } else { 0 },
        timeline: super::timeline(&world.log),
        metrics: Some(crate::analytics::compute_metrics(&world.log, cfg.supply)),
        details,
    };
    Ok(RunResult { world, report })
}
