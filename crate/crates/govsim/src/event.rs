//! Append-only event log.
//!
//! Every state transition in the simulator is expressed as an [`Event`] and
//! applied through a single transition function (`SimState::apply`). The log
//! is therefore the source of truth: folding it over the genesis state
//! reconstructs the final state exactly, and analytics read only the log.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::governor::Proposal;
use crate::types::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub block: BlockHeight,
    pub event: Event,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Event {
    // chain
    BlocksAdvanced {
        n: u64,
    },
    TxCommitted {
        sender: AccountId,
        calls: u64,
    },
    TxReverted {
        sender: AccountId,
        reason: String,
    },
    GasCharged {
        account: AccountId,
        amount: Units,
    },

    // ledger
    Transfer {
        token: TokenId,
        from: AccountId,
        to: AccountId,
        amount: Units,
    },
    DelegateChanged {
        token: TokenId,
        holder: AccountId,
        kind: PowerKind,
        to: AccountId,
    },
    Minted {
        token: TokenId,
        to: AccountId,
        amount: Units,
    },
    Burned {
        token: TokenId,
        from: AccountId,
        amount: Units,
    },
    FlashBorrowed {
        pool: PoolId,
        borrower: AccountId,
        amount: Units,
        fee: Units,
    },
    FlashRepaid {
        pool: PoolId,
        borrower: AccountId,
        amount: Units,
    },

    // contracts
    ImplementationRegistered {
        id: ContractId,
        implementation: crate::contracts::Implementation,
    },
    ProxyCreated {
        id: ContractId,
        admin: AccountId,
        implementation: ContractId,
    },
    ImplementationSet {
        proxy: ContractId,
        old: ContractId,
        new: ContractId,
    },
    AdminSet {
        proxy: ContractId,
        old: AccountId,
        new: AccountId,
    },
    ProxyStorageWritten {
        proxy: ContractId,
        key: String,
        value: String,
    },

    // governor
    ProposalCreated {
        governor: ContractId,
        proposal: Proposal,
        /// Gas price at the proposal's start block, recorded so turnout
        /// metrics can be recomputed from the log alone.
        gas_at_start: Units,
    },
    VoteCast {
        governor: ContractId,
        proposal: ProposalId,
        voter: AccountId,
        support: bool,
        weight: Units,
    },
    ProposalQueued {
        governor: ContractId,
        proposal: ProposalId,
        eta: BlockHeight,
    },
    ProposalExecuted {
        governor: ContractId,
        proposal: ProposalId,
    },
    /// Marker for one executed proposal action; the action's effects appear
    /// as their own events. `label` is the human-readable claim, `actual`
    /// describes what the action really did (they may diverge).
    ActionExecuted {
        governor: ContractId,
        proposal: ProposalId,
        index: usize,
        label: String,
        actual: String,
    },
    ProposalCanceled {
        governor: ContractId,
        proposal: ProposalId,
        reason: String,
    },
    /// A hidden tally-corrupting action (disguised-proposal scenario).
    TallyCorrupted {
        governor: ContractId,
        proposal: ProposalId,
        added_for: Units,
    },
    TokenListed {
        symbol: String,
    },
    TokenFrozen {
        symbol: String,
    },

    // escrow
    LockCreated {
        id: LockId,
        owner: AccountId,
        amount: Units,
        lock_start: Timestamp,
        unlock_time: Timestamp,
    },
    PoolRegistered {
        id: LiquidityPoolId,
        swap_fee_bps: u32,
        protocol_fee_share_bps: u32,
        lp_shares: BTreeMap<AccountId, u32>,
    },
    GaugeCreated {
        id: GaugeId,
        pool: LiquidityPoolId,
    },
    GaugeVoted {
        voter: AccountId,
        effective_epoch: u64,
        allocations: BTreeMap<GaugeId, u32>,
    },
    GaugeKilled {
        gauge: GaugeId,
    },
    EmissionShareGranted {
        account: AccountId,
        bps: u32,
    },
    EmissionsDistributed {
        epoch: u64,
        gauge_amounts: BTreeMap<GaugeId, Units>,
        /// Final per-account token credits (LP splits and treaty shares
        /// already resolved), minted on apply.
        credits: BTreeMap<AccountId, Units>,
        withheld_after: Units,
    },
    SwapRecorded {
        pool: LiquidityPoolId,
        volume: Units,
        revenue: Units,
    },
}

impl Event {
    /// Short human-readable tag for timelines and CSV output.
    pub fn kind(&self) -> &'static str {
        match self {
            Event::BlocksAdvanced { .. } => "blocks_advanced",
            Event::TxCommitted { .. } => "tx_committed",
            Event::TxReverted { .. } => "tx_reverted",
            Event::GasCharged { .. } => "gas_charged",
            Event::Transfer { .. } => "transfer",
            Event::DelegateChanged { .. } => "delegate_changed",
            Event::Minted { .. } => "minted",
            Event::Burned { .. } => "burned",
            Event::FlashBorrowed { .. } => "flash_borrowed",
            Event::FlashRepaid { .. } => "flash_repaid",
            Event::ImplementationRegistered { .. } => "implementation_registered",
            Event::ProxyCreated { .. } => "proxy_created",
            Event::ImplementationSet { .. } => "implementation_set",
            Event::AdminSet { .. } => "admin_set",
            Event::ProxyStorageWritten { .. } => "proxy_storage_written",
            Event::ProposalCreated { .. } => "proposal_created",
            Event::VoteCast { .. } => "vote_cast",
            Event::ProposalQueued { .. } => "proposal_queued",
            Event::ProposalExecuted { .. } => "proposal_executed",
            Event::ActionExecuted { .. } => "action_executed",
            Event::ProposalCanceled { .. } => "proposal_canceled",
            Event::TallyCorrupted { .. } => "tally_corrupted",
            Event::TokenListed { .. } => "token_listed",
            Event::TokenFrozen { .. } => "token_frozen",
            Event::LockCreated { .. } => "lock_created",
            Event::PoolRegistered { .. } => "pool_registered",
            Event::GaugeCreated { .. } => "gauge_created",
            Event::GaugeVoted { .. } => "gauge_voted",
            Event::GaugeKilled { .. } => "gauge_killed",
            Event::EmissionShareGranted { .. } => "emission_share_granted",
            Event::EmissionsDistributed { .. } => "emissions_distributed",
            Event::SwapRecorded { .. } => "swap_recorded",
        }
    }
}

/// Accounts touched by an event, used by profit accounting.
pub fn touched_accounts(event: &Event) -> BTreeSet<&AccountId> {
    let mut out = BTreeSet::new();
    match event {
        Event::Transfer { from, to, .. } => {
            out.insert(from);
            out.insert(to);
        }
        Event::Minted { to, .. } => {
            out.insert(to);
        }
        Event::Burned { from, .. } => {
            out.insert(from);
        }
        _ => {}
    }
    out
}
