//! Parameterized governance state machine: proposal lifecycle, snapshot
//! voting, dual pass criteria, timelock queueing, guardian cancellation,
//! and execution of actions such as proxy upgrades.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::World;
use crate::event::Event;
use crate::types::*;

pub const BLOCKS_PER_DAY: u64 = 86_400 / 12;

/// A threshold expressed either in absolute token units or as a fraction of
/// total supply in basis points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Units(Units),
    SupplyBps(u32),
}

impl Threshold {
    pub fn resolve(self, supply: Units) -> Units {
        match self {
            Threshold::Units(u) => u,
            Threshold::SupplyBps(bps) => supply * bps as Units / 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guardian {
    pub signers: BTreeSet<AccountId>,
    /// Signatures required to cancel a proposal.
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecutorClass {
    Short,
    Long,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GovernorParams {
    /// Proposer must hold strictly more than this.
    pub proposal_threshold: Threshold,
    pub voting_delay: u64,
    pub voting_period: u64,
    /// Minimum for-votes.
    pub quorum: Threshold,
    /// Minimum margin of for-votes over against-votes.
    pub vote_differential: Threshold,
    pub timelock_delay: u64,
    /// Queue expiry window after eta.
    pub grace_period: u64,
    pub max_actions: usize,
    pub guardian: Guardian,
    pub executor_class: ExecutorClass,
    /// Proposer must keep threshold power until execution.
    pub threshold_maintenance: bool,
    /// Which power stream gates proposing.
    pub proposition_power_kind: PowerKind,
    /// Allows executing an Active proposal immediately on supermajority,
    /// bypassing the vote window and timelock (the Beanstalk-style hole).
    pub emergency_commit: bool,
}

/// What a proposal action actually does when executed. The human-readable
/// `label` on [`Action`] is never validated against it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionKind {
    SetImplementation { proxy: ContractId, new_impl: ContractId },
    SetAdmin { proxy: ContractId, new_admin: AccountId },
    /// Move tokens held by a proxy contract; gated on the proxy's admin
    /// being the executing governor.
    VaultTransfer { vault: ContractId, token: TokenId, to: AccountId, amount: Units },
    MintTokens { token: TokenId, to: AccountId, amount: Units },
    ListToken { symbol: String },
    FreezeToken { symbol: String },
    KillGauge { gauge: GaugeId },
    GrantEmissionShare { account: AccountId, bps: u32 },
    /// Hidden tally corruption on a sibling proposal (disguised-proposal
    /// scenarios).
    CorruptTally { proposal: ProposalId, added_for: Units },
    Noop,
}

impl ActionKind {
    pub fn describe(&self) -> String {
        match self {
            ActionKind::SetImplementation { proxy, new_impl } => {
                format!("set_implementation {proxy} -> {new_impl}")
            }
            ActionKind::SetAdmin { proxy, new_admin } => format!("set_admin {proxy} -> {new_admin}"),
            ActionKind::VaultTransfer { vault, token, to, amount } => {
                format!("vault_transfer {amount} {token} from {vault} to {to}")
            }
            ActionKind::MintTokens { token, to, amount } => {
                format!("mint {amount} {token} to {to}")
            }
            ActionKind::ListToken { symbol } => format!("list_token {symbol}"),
            ActionKind::FreezeToken { symbol } => format!("freeze_token {symbol}"),
            ActionKind::KillGauge { gauge } => format!("kill_gauge {gauge}"),
            ActionKind::GrantEmissionShare { account, bps } => {
                format!("grant_emission_share {bps}bps to {account}")
            }
            ActionKind::CorruptTally { proposal, added_for } => {
                format!("corrupt_tally proposal {proposal} +{added_for}")
            }
            ActionKind::Noop => "noop".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    /// Human-readable claim; may diverge from `kind` (never checked).
    pub label: String,
    pub required_executor: Option<ExecutorClass>,
}

impl Action {
    pub fn new(kind: ActionKind, label: impl Into<String>) -> Self {
        Action { kind, label: label.into(), required_executor: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteReceipt {
    pub voter: AccountId,
    pub support: bool,
    /// Fixed at cast time from the snapshot block, never recomputed.
    pub weight: Units,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub id: ProposalId,
    pub proposer: AccountId,
    pub actions: Vec<Action>,
    /// Stored without validation; the off-chain pipeline is not verified
    /// on-chain.
    pub metadata_hash: String,
    pub created_block: BlockHeight,
    pub start_block: BlockHeight,
    pub end_block: BlockHeight,
    pub snapshot_block: BlockHeight,
    pub for_votes: Units,
    pub against_votes: Units,
    pub receipts: BTreeMap<AccountId, VoteReceipt>,
    pub eta: Option<BlockHeight>,
    pub canceled: bool,
    pub executed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProposalState {
    Pending,
    Active,
    Canceled,
    Defeated,
    Succeeded,
    Queued,
    Expired,
    Executed,
}

impl ProposalState {
    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            ProposalState::Canceled
                | ProposalState::Defeated
                | ProposalState::Expired
                | ProposalState::Executed
        )
    }
}

impl fmt::Display for ProposalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Governor {
    pub token: TokenId,
    pub params: GovernorParams,
    pub proposals: BTreeMap<ProposalId, Proposal>,
    pub next_id: ProposalId,
}

impl Governor {
    pub fn new(token: TokenId, params: GovernorParams) -> Self {
        Governor { token, params, proposals: BTreeMap::new(), next_id: 0 }
    }

    fn passed(&self, prop: &Proposal, supply: Units) -> bool {
        let quorum = self.params.quorum.resolve(supply);
        let diff = self.params.vote_differential.resolve(supply);
        prop.for_votes >= quorum && prop.for_votes >= prop.against_votes + diff
    }

    /// Pure state function of (proposal record, current block).
    pub fn proposal_state(&self, prop: &Proposal, height: BlockHeight, supply: Units) -> ProposalState {
        if prop.canceled {
            return ProposalState::Canceled;
        }
        if prop.executed {
            return ProposalState::Executed;
        }
        // A safe governor stays Pending through the snapshot block itself:
        // voting opens strictly after it, so snapshot balances are final
        // before any weight is read. Emergency-commit governors read live
        // balances at the snapshot edge — the flashloan-vote hole.
        if height < prop.start_block
            || (height == prop.start_block && !self.params.emergency_commit)
        {
            return ProposalState::Pending;
        }
        if height <= prop.end_block && prop.eta.is_none() {
            return ProposalState::Active;
        }
        if let Some(eta) = prop.eta {
            if height > eta + self.params.grace_period {
                return ProposalState::Expired;
            }
            return ProposalState::Queued;
        }
        if self.passed(prop, supply) {
            ProposalState::Succeeded
        } else {
            ProposalState::Defeated
        }
    }
}

/// The documented platform parameterizations. Day-denominated delays are
/// converted at 12 s per block. Compound and Uniswap numbers follow the
/// published flows; the Aave presets expose configurable defaults with the
/// long executor strictly slower and higher-quorum than the short one.
pub fn preset_governor(name: &str, supply: Units) -> SimResult<GovernorParams> {
    if supply == 0 {
        return Err(SimError::Config("preset requires positive supply".into()));
    }
    let guardian = Guardian {
        signers: (1..=10).map(|i| AccountId::new(format!("guardian-{i}"))).collect(),
        k: 6,
    };
    let base = GovernorParams {
        proposal_threshold: Threshold::SupplyBps(100),
        voting_delay: BLOCKS_PER_DAY,
        voting_period: 3 * BLOCKS_PER_DAY,
        quorum: Threshold::SupplyBps(400),
        vote_differential: Threshold::Units(1),
        timelock_delay: 2 * BLOCKS_PER_DAY,
        grace_period: 14 * BLOCKS_PER_DAY,
        max_actions: 10,
        guardian,
        executor_class: ExecutorClass::Short,
        threshold_maintenance: true,
        proposition_power_kind: PowerKind::Voting,
        emergency_commit: false,
    };
    match name {
        "compound" => Ok(base),
        "uniswap" => Ok(GovernorParams {
            proposal_threshold: Threshold::Units(2_500_000),
            quorum: Threshold::Units(4_000_000),
            voting_period: 3 * BLOCKS_PER_DAY,
            timelock_delay: 2 * BLOCKS_PER_DAY,
            ..base
        }),
        "aave_short" => Ok(GovernorParams {
            proposal_threshold: Threshold::SupplyBps(50),
            quorum: Threshold::SupplyBps(200),
            vote_differential: Threshold::SupplyBps(50),
            voting_period: 3 * BLOCKS_PER_DAY,
            timelock_delay: BLOCKS_PER_DAY,
            grace_period: 5 * BLOCKS_PER_DAY,
            proposition_power_kind: PowerKind::Proposition,
            executor_class: ExecutorClass::Short,
            ..base
        }),
        "aave_long" => Ok(GovernorParams {
            proposal_threshold: Threshold::SupplyBps(200),
            quorum: Threshold::SupplyBps(2_000),
            vote_differential: Threshold::SupplyBps(1_500),
            voting_period: 10 * BLOCKS_PER_DAY,
            timelock_delay: 7 * BLOCKS_PER_DAY,
            grace_period: 5 * BLOCKS_PER_DAY,
            proposition_power_kind: PowerKind::Proposition,
            executor_class: ExecutorClass::Long,
            ..base
        }),
        other => Err(SimError::Unknown { kind: "governor preset", name: other.into() }),
    }
}

impl World {
    pub fn governor(&self, id: &ContractId) -> SimResult<&Governor> {
        self.state.governors.get(id).ok_or_else(|| SimError::Unknown {
            kind: "governor",
            name: id.0.clone(),
        })
    }

    pub fn add_governor(&mut self, id: &ContractId, governor: Governor) {
        self.state.governors.insert(id.clone(), governor);
    }

    pub fn proposal_state(&self, gov_id: &ContractId, id: ProposalId) -> SimResult<ProposalState> {
        let gov = self.governor(gov_id)?;
        let prop = gov
            .proposals
            .get(&id)
            .ok_or(SimError::Unknown { kind: "proposal", name: id.to_string() })?;
        let supply = self.token(&gov.token)?.total_supply;
        Ok(gov.proposal_state(prop, self.state.height, supply))
    }

    pub fn propose(
        &mut self,
        gov_id: &ContractId,
        proposer: &AccountId,
        actions: Vec<Action>,
        metadata_hash: String,
    ) -> SimResult<ProposalId> {
        let height = self.state.height;
        let gov = self.governor(gov_id)?;
        let params = gov.params.clone();
        let supply = self.token(&gov.token)?.total_supply;
        if actions.len() > params.max_actions {
            return Err(SimError::revert("too many actions"));
        }
        for action in &actions {
            if let Some(class) = action.required_executor {
                if class != params.executor_class {
                    return Err(SimError::revert("wrong executor class"));
                }
            }
        }
        let power = self.power_at(
            &gov.token,
            proposer,
            params.proposition_power_kind,
            height.saturating_sub(1),
        );
        if power <= params.proposal_threshold.resolve(supply) {
            return Err(SimError::revert("proposition power below threshold"));
        }
        let gov = self.governor(gov_id)?;
        let live = gov.proposals.values().any(|p| {
            p.proposer == *proposer && !gov.proposal_state(p, height, supply).is_terminal()
        });
        if live {
            return Err(SimError::revert("proposer has a live proposal"));
        }

        let id = gov.next_id;
        let start_block = height + params.voting_delay;
        let proposal = Proposal {
            id,
            proposer: proposer.clone(),
            actions,
            metadata_hash,
            created_block: height,
            start_block,
            end_block: start_block + params.voting_period,
            snapshot_block: start_block,
            for_votes: 0,
            against_votes: 0,
            receipts: BTreeMap::new(),
            eta: None,
            canceled: false,
            executed: false,
        };
        let gas_at_start = self
            .gas_price_at(start_block)
            .or_else(|_| self.gas_price_at(height))
            .unwrap_or(0);
        self.commit(Event::ProposalCreated { governor: gov_id.clone(), proposal, gas_at_start });
        Ok(id)
    }

    pub fn cast_vote(
        &mut self,
        gov_id: &ContractId,
        voter: &AccountId,
        id: ProposalId,
        support: bool,
    ) -> SimResult<()> {
        let state = self.proposal_state(gov_id, id)?;
        if state != ProposalState::Active {
            return Err(SimError::revert("voting closed"));
        }
        let gov = self.governor(gov_id)?;
        let prop = gov.proposals.get(&id).expect("proposal");
        if prop.receipts.contains_key(voter) {
            return Err(SimError::revert("already voted"));
        }
        let weight = self.power_at(&gov.token, voter, PowerKind::Voting, prop.snapshot_block);
        self.commit(Event::VoteCast {
            governor: gov_id.clone(),
            proposal: id,
            voter: voter.clone(),
            support,
            weight,
        });
        Ok(())
    }

    pub fn queue(&mut self, gov_id: &ContractId, id: ProposalId) -> SimResult<()> {
        let state = self.proposal_state(gov_id, id)?;
        if state != ProposalState::Succeeded {
            return Err(SimError::revert(format!("cannot queue from state {state}")));
        }
        let eta = self.state.height + self.governor(gov_id)?.params.timelock_delay;
        self.commit(Event::ProposalQueued { governor: gov_id.clone(), proposal: id, eta });
        Ok(())
    }

    pub fn execute(&mut self, gov_id: &ContractId, id: ProposalId) -> SimResult<()> {
        let state = self.proposal_state(gov_id, id)?;
        if state == ProposalState::Expired {
            return Err(SimError::revert("queue expired"));
        }
        if state != ProposalState::Queued {
            return Err(SimError::revert(format!("cannot execute from state {state}")));
        }
        let gov = self.governor(gov_id)?;
        let prop = gov.proposals.get(&id).expect("proposal");
        let eta = prop.eta.expect("queued proposal has eta");
        if self.state.height < eta {
            return Err(SimError::revert("timelock"));
        }
        if gov.params.threshold_maintenance {
            let supply = self.token(&gov.token)?.total_supply;
            let power = self.power_at(
                &gov.token,
                &prop.proposer,
                gov.params.proposition_power_kind,
                self.state.height.saturating_sub(1),
            );
            if power <= gov.params.proposal_threshold.resolve(supply) {
                return Err(SimError::revert("proposition power below threshold"));
            }
        }
        self.run_actions(gov_id, id)
    }

    /// Instant execution of an Active proposal on supermajority; only legal
    /// when the governor was configured without the timelock safeguard.
    pub fn emergency_execute(
        &mut self,
        gov_id: &ContractId,
        _caller: &AccountId,
        id: ProposalId,
    ) -> SimResult<()> {
        let gov = self.governor(gov_id)?;
        if !gov.params.emergency_commit {
            return Err(SimError::revert("emergency commit disabled"));
        }
        let state = self.proposal_state(gov_id, id)?;
        if state != ProposalState::Active {
            return Err(SimError::revert(format!("cannot emergency-execute from state {state}")));
        }
        let gov = self.governor(gov_id)?;
        let prop = gov.proposals.get(&id).expect("proposal");
        let supply = self.token(&gov.token)?.total_supply;
        if prop.for_votes < gov.params.quorum.resolve(supply) || prop.for_votes <= prop.against_votes
        {
            return Err(SimError::revert("insufficient supermajority"));
        }
        self.run_actions(gov_id, id)
    }

    fn run_actions(&mut self, gov_id: &ContractId, id: ProposalId) -> SimResult<()> {
        let gov_account: AccountId = gov_id.into();
        let actions = self.governor(gov_id)?.proposals.get(&id).expect("proposal").actions.clone();
        // Validate sequentially against a scratch state, then commit the
        // collected events in order.
        let mut scratch = self.state.clone();
        let mut planned: Vec<(usize, Vec<Event>)> = Vec::new();
        for (index, action) in actions.iter().enumerate() {
            let events = plan_action(&scratch, gov_id, &gov_account, &action.kind)?;
            for e in &events {
                scratch.apply(scratch.height, e);
            }
            planned.push((index, events));
        }
        for (index, events) in planned {
            self.commit(Event::ActionExecuted {
                governor: gov_id.clone(),
                proposal: id,
                index,
                label: actions[index].label.clone(),
                actual: actions[index].kind.describe(),
            });
            for e in events {
                self.commit(e);
            }
        }
        self.commit(Event::ProposalExecuted { governor: gov_id.clone(), proposal: id });
        Ok(())
    }

    pub fn cancel(
        &mut self,
        gov_id: &ContractId,
        _canceler: &AccountId,
        id: ProposalId,
        signatures: &BTreeSet<AccountId>,
    ) -> SimResult<()> {
        let state = self.proposal_state(gov_id, id)?;
        if state.is_terminal() {
            return Err(SimError::revert(format!("cannot cancel from state {state}")));
        }
        let gov = self.governor(gov_id)?;
        let valid = signatures.intersection(&gov.params.guardian.signers).count();
        let by_guardian = valid >= gov.params.guardian.k;
        let by_threshold = if gov.params.threshold_maintenance {
            let prop = gov.proposals.get(&id).expect("proposal");
            let supply = self.token(&gov.token)?.total_supply;
            let power = self.power_at(
                &gov.token,
                &prop.proposer,
                gov.params.proposition_power_kind,
                self.state.height,
            );
            power <= gov.params.proposal_threshold.resolve(supply)
        } else {
            false
        };
        if !by_guardian && !by_threshold {
            return Err(SimError::revert("insufficient signatures"));
        }
        let reason = if by_guardian { "guardian" } else { "proposer below threshold" };
        self.commit(Event::ProposalCanceled {
            governor: gov_id.clone(),
            proposal: id,
            reason: reason.into(),
        });
        Ok(())
    }
}

/// Validate a governance action against `state` and return its effect
/// events. Admin gates check against the executing governor's account.
fn plan_action(
    state: &crate::chain::SimState,
    gov_id: &ContractId,
    gov_account: &AccountId,
    kind: &ActionKind,
) -> SimResult<Vec<Event>> {
    match kind {
        ActionKind::SetImplementation { proxy, new_impl } => {
            if !state.registry.implementations.contains_key(new_impl) {
                return Err(SimError::Unknown { kind: "contract", name: new_impl.0.clone() });
            }
            let p = state.registry.proxies.get(proxy).ok_or(SimError::Unknown {
                kind: "contract",
                name: proxy.0.clone(),
            })?;
            if p.admin != *gov_account {
                return Err(SimError::revert("not admin"));
            }
            Ok(vec![Event::ImplementationSet {
                proxy: proxy.clone(),
                old: p.implementation.clone(),
                new: new_impl.clone(),
            }])
        }
        ActionKind::SetAdmin { proxy, new_admin } => {
            let p = state.registry.proxies.get(proxy).ok_or(SimError::Unknown {
                kind: "contract",
                name: proxy.0.clone(),
            })?;
            if p.admin != *gov_account {
                return Err(SimError::revert("not admin"));
            }
            Ok(vec![Event::AdminSet {
                proxy: proxy.clone(),
                old: p.admin.clone(),
                new: new_admin.clone(),
            }])
        }
        ActionKind::VaultTransfer { vault, token, to, amount } => {
            let p = state.registry.proxies.get(vault).ok_or(SimError::Unknown {
                kind: "contract",
                name: vault.0.clone(),
            })?;
            if p.admin != *gov_account {
                return Err(SimError::revert("not admin"));
            }
            let vault_account: AccountId = vault.into();
            let ledger = state.tokens.get(token).ok_or_else(|| SimError::Unknown {
                kind: "token",
                name: token.0.clone(),
            })?;
            if ledger.balance(&vault_account) < *amount {
                return Err(SimError::revert("insufficient vault balance"));
            }
            Ok(vec![Event::Transfer {
                token: token.clone(),
                from: vault_account,
                to: to.clone(),
                amount: *amount,
            }])
        }
        ActionKind::MintTokens { token, to, amount } => {
            let ledger = state.tokens.get(token).ok_or_else(|| SimError::Unknown {
                kind: "token",
                name: token.0.clone(),
            })?;
            if ledger.authority.as_ref() != Some(gov_account) {
                return Err(SimError::revert("not mint authority"));
            }
            Ok(vec![Event::Minted { token: token.clone(), to: to.clone(), amount: *amount }])
        }
        ActionKind::ListToken { symbol } => Ok(vec![Event::TokenListed { symbol: symbol.clone() }]),
        ActionKind::FreezeToken { symbol } => {
            Ok(vec![Event::TokenFrozen { symbol: symbol.clone() }])
        }
        ActionKind::KillGauge { gauge } => {
            if !state.escrow.gauges.contains_key(gauge) {
                return Err(SimError::Unknown { kind: "gauge", name: gauge.0.clone() });
            }
            Ok(vec![Event::GaugeKilled { gauge: gauge.clone() }])
        }
        ActionKind::GrantEmissionShare { account, bps } => {
            if *bps > 10_000 {
                return Err(SimError::revert("emission share exceeds 100%"));
            }
            Ok(vec![Event::EmissionShareGranted { account: account.clone(), bps: *bps }])
        }
        ActionKind::CorruptTally { proposal, added_for } => {
            let gov = state.governors.get(gov_id).expect("governor");
            if !gov.proposals.contains_key(proposal) {
                return Err(SimError::Unknown { kind: "proposal", name: proposal.to_string() });
            }
            Ok(vec![Event::TallyCorrupted {
                governor: gov_id.clone(),
                proposal: *proposal,
                added_for: *added_for,
            }])
        }
        ActionKind::Noop => Ok(vec![]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{GasGenerator, GasSeries, SimState};
    use crate::ledger::TokenLedger;

    const SUPPLY: Units = 10_000_000;

    fn fast_params() -> GovernorParams {
        GovernorParams {
            voting_delay: 2,
            voting_period: 10,
            timelock_delay: 5,
            grace_period: 20,
            ..preset_governor("compound", SUPPLY).unwrap()
        }
    }

    fn world(params: GovernorParams, balances: &[(&str, Units)]) -> World {
        let mut state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 1 }).unwrap());
        let mut ledger = TokenLedger::new(None);
        for (name, amount) in balances {
            ledger.apply_mint(0, &AccountId::new(*name), *amount);
        }
        state.tokens.insert(TokenId::new("gov"), ledger);
        state.governors.insert("gov-a".into(), Governor::new("gov".into(), params));
        let mut w = World::new(state);
        w.advance_blocks(1).unwrap();
        w
    }

    fn noop() -> Vec<Action> {
        vec![Action::new(ActionKind::Noop, "routine parameter tweak")]
    }

    #[test]
    fn preset_numbers() {
        let c = preset_governor("compound", SUPPLY).unwrap();
        assert_eq!(c.proposal_threshold.resolve(SUPPLY), 100_000); // 1%
        assert_eq!(c.quorum.resolve(SUPPLY), 400_000); // 4%
        assert_eq!(c.voting_delay, 7_200);
        assert_eq!(c.guardian.k, 6);
        let u = preset_governor("uniswap", SUPPLY).unwrap();
        assert_eq!(u.proposal_threshold.resolve(SUPPLY), 2_500_000);
        assert_eq!(u.quorum.resolve(SUPPLY), 4_000_000);
        assert_eq!(u.voting_period, 3 * BLOCKS_PER_DAY);
        assert_eq!(u.timelock_delay, 2 * BLOCKS_PER_DAY);
        let a = preset_governor("aave_short", SUPPLY).unwrap();
        assert_eq!(a.proposition_power_kind, PowerKind::Proposition);
        assert_eq!(a.vote_differential.resolve(SUPPLY), 50_000);
        let l = preset_governor("aave_long", SUPPLY).unwrap();
        assert!(l.quorum.resolve(SUPPLY) > a.quorum.resolve(SUPPLY));
        assert!(l.timelock_delay > a.timelock_delay);
        assert_eq!(l.executor_class, ExecutorClass::Long);
        assert!(preset_governor("nope", SUPPLY).is_err());
        assert!(preset_governor("compound", 0).is_err());
    }

    #[test]
    fn threshold_is_strictly_greater() {
        // exactly at threshold: rejected; one unit over: accepted
        let mut w = world(fast_params(), &[("at", 100_000), ("over", 100_001), ("rest", SUPPLY - 200_001)]);
        let err = w.propose(&"gov-a".into(), &"at".into(), noop(), String::new()).unwrap_err();
        assert_eq!(err, SimError::Revert("proposition power below threshold".into()));
        w.propose(&"gov-a".into(), &"over".into(), noop(), String::new()).unwrap();
    }

    #[test]
    fn max_actions_enforced() {
        let mut w = world(fast_params(), &[("whale", SUPPLY)]);
        let actions: Vec<Action> =
            (0..11).map(|i| Action::new(ActionKind::Noop, format!("a{i}"))).collect();
        let err = w.propose(&"gov-a".into(), &"whale".into(), actions, String::new()).unwrap_err();
        assert_eq!(err, SimError::Revert("too many actions".into()));
    }

    #[test]
    fn executor_class_must_match() {
        let mut w = world(fast_params(), &[("whale", SUPPLY)]);
        let mut action = Action::new(ActionKind::Noop, "slow path change");
        action.required_executor = Some(ExecutorClass::Long);
        let err = w.propose(&"gov-a".into(), &"whale".into(), vec![action], String::new()).unwrap_err();
        assert_eq!(err, SimError::Revert("wrong executor class".into()));
    }

    #[test]
    fn full_lifecycle_pending_to_executed() {
        let mut w = world(fast_params(), &[("whale", SUPPLY)]);
        let gov: ContractId = "gov-a".into();
        let id = w.propose(&gov, &"whale".into(), noop(), "ipfs://x".into()).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Pending);
        // cannot vote while pending
        assert!(w.cast_vote(&gov, &"whale".into(), id, true).unwrap_err().is_revert());
        w.advance_blocks(2).unwrap();
        // still pending on the snapshot block itself
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Pending);
        w.advance_blocks(1).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Active);
        // cannot queue while active
        assert!(w.queue(&gov, id).unwrap_err().is_revert());
        w.cast_vote(&gov, &"whale".into(), id, true).unwrap();
        // double vote rejected
        assert_eq!(
            w.cast_vote(&gov, &"whale".into(), id, true).unwrap_err(),
            SimError::Revert("already voted".into())
        );
        w.advance_blocks(11).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Succeeded);
        w.queue(&gov, id).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Queued);
        // timelock not elapsed
        assert_eq!(w.execute(&gov, id).unwrap_err(), SimError::Revert("timelock".into()));
        w.advance_blocks(5).unwrap();
        w.execute(&gov, id).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Executed);
        // terminal states cannot be re-executed
        assert!(w.execute(&gov, id).is_err());
    }

    #[test]
    fn quorum_and_differential_both_required() {
        let mut params = fast_params();
        params.quorum = Threshold::Units(1_000);
        params.vote_differential = Threshold::Units(500);
        params.proposal_threshold = Threshold::Units(0);
        let mut w = world(params, &[("a", 1_200), ("b", 800), ("rest", SUPPLY - 2_000)]);
        let gov: ContractId = "gov-a".into();
        // quorum met, differential missed: 1200 for vs 800 against (diff 400 < 500)
        let id = w.propose(&gov, &"a".into(), noop(), String::new()).unwrap();
        w.advance_blocks(3).unwrap();
        w.cast_vote(&gov, &"a".into(), id, true).unwrap();
        w.cast_vote(&gov, &"b".into(), id, false).unwrap();
        w.advance_blocks(11).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Defeated);
        // differential met, quorum missed
        let id2 = w.propose(&gov, &"b".into(), noop(), String::new()).unwrap();
        w.advance_blocks(3).unwrap();
        w.cast_vote(&gov, &"b".into(), id2, true).unwrap();
        w.advance_blocks(11).unwrap();
        assert_eq!(w.proposal_state(&gov, id2).unwrap(), ProposalState::Defeated);
    }

    #[test]
    fn snapshot_is_the_activation_block() {
        let mut w = world(fast_params(), &[("whale", SUPPLY / 2), ("late", SUPPLY / 2)]);
        let gov: ContractId = "gov-a".into();
        let id = w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap();
        w.advance_blocks(2).unwrap(); // activation block
        w.advance_blocks(1).unwrap();
        // tokens moved after activation do not count
        w.transfer(&"gov".into(), &"whale".into(), &"buyer".into(), SUPPLY / 2).unwrap();
        w.cast_vote(&gov, &"buyer".into(), id, true).unwrap();
        let prop = &w.governor(&gov).unwrap().proposals[&id];
        assert_eq!(prop.receipts[&AccountId::new("buyer")].weight, 0);
        assert_eq!(prop.for_votes, 0);
        // the seller still votes with snapshot weight
        w.cast_vote(&gov, &"whale".into(), id, true).unwrap();
        assert_eq!(w.governor(&gov).unwrap().proposals[&id].for_votes, SUPPLY / 2);
    }

    #[test]
    fn queue_expiry_blocks_execution() {
        let mut w = world(fast_params(), &[("whale", SUPPLY)]);
        let gov: ContractId = "gov-a".into();
        let id = w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap();
        w.advance_blocks(3).unwrap();
        w.cast_vote(&gov, &"whale".into(), id, true).unwrap();
        w.advance_blocks(11).unwrap();
        w.queue(&gov, id).unwrap();
        w.advance_blocks(5 + 20 + 1).unwrap(); // past eta + grace
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Expired);
        assert_eq!(w.execute(&gov, id).unwrap_err(), SimError::Revert("queue expired".into()));
    }

    #[test]
    fn guardian_cancel_requires_k_signatures() {
        let mut params = fast_params();
        params.threshold_maintenance = false;
        let mut w = world(params, &[("whale", SUPPLY)]);
        let gov: ContractId = "gov-a".into();
        let id = w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap();
        let sigs5: BTreeSet<AccountId> =
            (1..=5).map(|i| AccountId::new(format!("guardian-{i}"))).collect();
        assert_eq!(
            w.cancel(&gov, &"anyone".into(), id, &sigs5).unwrap_err(),
            SimError::Revert("insufficient signatures".into())
        );
        // non-guardian signatures do not count
        let mut padded = sigs5.clone();
        padded.insert("impostor-1".into());
        padded.insert("impostor-2".into());
        assert!(w.cancel(&gov, &"anyone".into(), id, &padded).is_err());
        let sigs6: BTreeSet<AccountId> =
            (1..=6).map(|i| AccountId::new(format!("guardian-{i}"))).collect();
        w.cancel(&gov, &"anyone".into(), id, &sigs6).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Canceled);
    }

    #[test]
    fn threshold_drop_enables_cancel_and_blocks_execute() {
        let mut w = world(fast_params(), &[("whale", 200_000), ("rest", SUPPLY - 200_000)]);
        let gov: ContractId = "gov-a".into();
        let id = w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap();
        // while the proposer holds, nobody can cancel without the guardian
        assert!(w.cancel(&gov, &"anyone".into(), id, &BTreeSet::new()).is_err());
        w.advance_blocks(1).unwrap();
        w.transfer(&"gov".into(), &"whale".into(), &"sink".into(), 150_000).unwrap();
        w.cancel(&gov, &"anyone".into(), id, &BTreeSet::new()).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Canceled);
    }

    #[test]
    fn one_live_proposal_per_proposer() {
        let mut w = world(fast_params(), &[("whale", SUPPLY / 2), ("whale2", SUPPLY / 2)]);
        let gov: ContractId = "gov-a".into();
        w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap();
        assert_eq!(
            w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap_err(),
            SimError::Revert("proposer has a live proposal".into())
        );
        // another proposer is fine
        w.propose(&gov, &"whale2".into(), noop(), String::new()).unwrap();
    }

    #[test]
    fn emergency_execute_requires_the_flag_and_supermajority() {
        let mut params = fast_params();
        params.voting_delay = 0;
        params.quorum = Threshold::Units(1_000);
        let mut w = world(params.clone(), &[("whale", SUPPLY)]);
        let gov: ContractId = "gov-a".into();
        let id = w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap();
        // safe governor: voting only opens after the snapshot block
        assert!(w.cast_vote(&gov, &"whale".into(), id, true).unwrap_err().is_revert());
        w.advance_blocks(1).unwrap();
        w.cast_vote(&gov, &"whale".into(), id, true).unwrap();
        assert_eq!(
            w.emergency_execute(&gov, &"whale".into(), id).unwrap_err(),
            SimError::Revert("emergency commit disabled".into())
        );
        params.emergency_commit = true;
        let mut w = world(params, &[("whale", SUPPLY)]);
        let id = w.propose(&gov, &"whale".into(), noop(), String::new()).unwrap();
        // no votes yet: supermajority unmet
        assert!(w.emergency_execute(&gov, &"whale".into(), id).is_err());
        w.cast_vote(&gov, &"whale".into(), id, true).unwrap();
        w.emergency_execute(&gov, &"whale".into(), id).unwrap();
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Executed);
    }

    #[test]
    fn failing_action_aborts_whole_execution() {
        let mut params = fast_params();
        params.quorum = Threshold::Units(1);
        let mut w = world(params, &[("whale", SUPPLY)]);
        let gov: ContractId = "gov-a".into();
        let actions = vec![
            Action::new(ActionKind::ListToken { symbol: "OK".into() }, "list"),
            // governor is not this proxy's admin (proxy does not even exist)
            Action::new(
                ActionKind::SetAdmin { proxy: "ghost".into(), new_admin: "x".into() },
                "sneaky",
            ),
        ];
        let id = w.propose(&gov, &"whale".into(), actions, String::new()).unwrap();
        w.advance_blocks(3).unwrap();
        w.cast_vote(&gov, &"whale".into(), id, true).unwrap();
        w.advance_blocks(11).unwrap();
        w.queue(&gov, id).unwrap();
        w.advance_blocks(5).unwrap();
        assert!(w.execute(&gov, id).is_err());
        // the first action must not have landed
        assert!(w.state.listings.is_empty());
        assert_eq!(w.proposal_state(&gov, id).unwrap(), ProposalState::Queued);
    }

    #[test]
    fn action_label_never_validated_against_kind() {
        let mut params = fast_params();
        params.quorum = Threshold::Units(1);
        let mut w = world(params, &[("whale", SUPPLY)]);
        let gov: ContractId = "gov-a".into();
        let disguised = Action::new(
            ActionKind::ListToken { symbol: "RUG".into() },
            "Completely unrelated description",
        );
        let id = w.propose(&gov, &"whale".into(), vec![disguised], String::new()).unwrap();
        w.advance_blocks(3).unwrap();
        w.cast_vote(&gov, &"whale".into(), id, true).unwrap();
        w.advance_blocks(11).unwrap();
        w.queue(&gov, id).unwrap();
        w.advance_blocks(5).unwrap();
        w.execute(&gov, id).unwrap();
        let entry = w.log.iter().find_map(|e| match &e.event {
            Event::ActionExecuted { label, actual, .. } => Some((label.clone(), actual.clone())),
            _ => None,
        }).unwrap();
        assert_eq!(entry.0, "Completely unrelated description");
        assert_eq!(entry.1, "list_token RUG");
    }
}
