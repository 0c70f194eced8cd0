//! Block clock, gas pricing, and atomic transaction execution.
//!
//! A [`World`] owns the whole simulated state plus the append-only event
//! log. All mutation flows through [`World::commit`], which applies the
//! event via the single transition function and records it, so replaying
//! the log over the genesis snapshot reconstructs the final state exactly.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contracts::Registry;
use crate::escrow::EscrowState;
use crate::event::{Event, LogEntry};
use crate::governor::{Action, Governor};
use crate::ledger::{FlashPool, TokenLedger};
use crate::types::*;

/// Deterministic gas-price process. Identical descriptor (including seed)
/// always yields the identical series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GasGenerator {
    Constant {
        #[serde(with = "crate::types::u64_units")]
        price: Units,
    },
    /// Steps of (start_block, price); the first start must be 0.
    Piecewise { steps: Vec<(BlockHeight, u64)> },
    /// Seeded random walk, precomputed up to `horizon` blocks.
    Walk {
        seed: u64,
        #[serde(with = "crate::types::u64_units")]
        start: Units,
        #[serde(with = "crate::types::u64_units")]
        max_step: Units,
        horizon: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasSeries {
    pub generator: GasGenerator,
    walk: Vec<Units>,
}

impl GasSeries {
    pub fn new(generator: GasGenerator) -> SimResult<Self> {
        let walk = match &generator {
            GasGenerator::Piecewise { steps } => {
                if steps.first().map(|s| s.0) != Some(0) {
                    return Err(SimError::Config("piecewise gas steps must start at block 0".into()));
                }
                if !steps.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(SimError::Config("piecewise gas steps must be strictly increasing".into()));
                }
                Vec::new()
            }
            GasGenerator::Walk { seed, start, max_step, horizon } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut price = *start as i128;
                let mut walk = Vec::with_capacity(*horizon as usize);
                let span = 2 * *max_step as i128;
                for _ in 0..*horizon {
                    walk.push(price.max(0) as Units);
                    let delta = rng.gen_range(0..=span) - span / 2;
                    price = (price + delta).max(0);
                }
                walk
            }
            GasGenerator::Constant { .. } => Vec::new(),
        };
        Ok(GasSeries { generator, walk })
    }

    pub fn price_at(&self, b: BlockHeight) -> SimResult<Units> {
        match &self.generator {
            GasGenerator::Constant { price } => Ok(*price),
            GasGenerator::Piecewise { steps } => {
                let idx = steps.partition_point(|s| s.0 <= b);
                Ok(steps[idx - 1].1 as Units)
            }
            GasGenerator::Walk { .. } => self
                .walk
                .get(b as usize)
                .copied()
                .ok_or_else(|| SimError::Precondition("gas walk queried past its horizon".into())),
        }
    }
}

/// One call inside a transaction script. Scripts drive every governance
/// surface so scenarios and property tests exercise the same code paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Call {
    Transfer { token: TokenId, to: AccountId, amount: Units },
    Delegate { token: TokenId, delegatee: AccountId, kind: PowerKind },
    Mint { token: TokenId, to: AccountId, amount: Units },
    Burn { token: TokenId, from: AccountId, amount: Units },
    FlashBorrow { pool: PoolId, amount: Units, body: Vec<Call> },
    FlashRepay { pool: PoolId, amount: Units },
    Propose { governor: ContractId, actions: Vec<Action>, metadata_hash: String },
    CastVote { governor: ContractId, proposal: ProposalId, support: bool },
    Queue { governor: ContractId, proposal: ProposalId },
    Execute { governor: ContractId, proposal: ProposalId },
    EmergencyExecute { governor: ContractId, proposal: ProposalId },
    Cancel { governor: ContractId, proposal: ProposalId, signatures: BTreeSet<AccountId> },
    SetImplementation { proxy: ContractId, new_impl: ContractId },
    SetAdmin { proxy: ContractId, new_admin: AccountId },
    DelegateCall { proxy: ContractId, operation: String, args: Vec<String> },
    CreateLock { amount: Units, unlock_time: Timestamp },
    VoteGaugeWeight { allocations: BTreeMap<GaugeId, u32> },
    /// Unconditional failure, used to inject faults in atomicity tests.
    Fail { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TxScript {
    pub sender: AccountId,
    pub calls: Vec<Call>,
    pub gas_budget: Units,
}

impl TxScript {
    pub fn new(sender: impl Into<AccountId>, calls: Vec<Call>) -> Self {
        TxScript { sender: sender.into(), calls, gas_budget: Units::MAX }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TxOutcome {
    Committed { gas: Units, events: usize },
    Reverted { reason: String, gas: Units },
}

impl TxOutcome {
    pub fn is_committed(&self) -> bool {
        matches!(self, TxOutcome::Committed { .. })
    }
}

/// Listing status of an asset on the simulated host platform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ListingState {
    Listed,
    Frozen,
}

/// Everything the event log folds over. Single-owner, mutated
/// single-threaded; run independent instances for parallelism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub height: BlockHeight,
    /// Seconds per block (default 12).
    pub block_interval: u64,
    pub genesis_time: Timestamp,
    /// Flat gas units charged per call; cost = unit * gas price.
    pub per_call_gas_unit: Units,
    pub gas: GasSeries,
    /// Native (gas) currency; no delegation, no checkpoints.
    pub native: BTreeMap<AccountId, Units>,
    pub tokens: BTreeMap<TokenId, TokenLedger>,
    pub flash_pools: BTreeMap<PoolId, FlashPool>,
    pub registry: Registry,
    pub governors: BTreeMap<ContractId, Governor>,
    pub escrow: EscrowState,
    pub listings: BTreeMap<String, ListingState>,
}

impl SimState {
    pub fn new(gas: GasSeries) -> Self {
        SimState {
            height: 0,
            block_interval: 12,
            genesis_time: 0,
            per_call_gas_unit: 1,
            gas,
            native: BTreeMap::new(),
            tokens: BTreeMap::new(),
            flash_pools: BTreeMap::new(),
            registry: Registry::default(),
            governors: BTreeMap::new(),
            escrow: EscrowState::default(),
            listings: BTreeMap::new(),
        }
    }

    pub fn timestamp(&self) -> Timestamp {
        self.genesis_time + self.height * self.block_interval
    }

    pub fn timestamp_at(&self, b: BlockHeight) -> Timestamp {
        self.genesis_time + b * self.block_interval
    }

    /// The single state-transition function. `block` is the height the event
    /// was recorded at (checkpoints are written against it).
    pub fn apply(&mut self, block: BlockHeight, event: &Event) {
        match event {
            Event::BlocksAdvanced { n } => self.height += n,
            Event::TxCommitted { .. }
            | Event::TxReverted { .. }
            | Event::FlashBorrowed { .. }
            | Event::FlashRepaid { .. }
            | Event::ActionExecuted { .. } => {}
            Event::GasCharged { account, amount } => {
                let bal = self.native.entry(account.clone()).or_insert(0);
                *bal = bal.saturating_sub(*amount);
            }
            Event::Transfer { token, from, to, amount } => {
                self.tokens.get_mut(token).expect("token").apply_transfer(block, from, to, *amount);
            }
            Event::DelegateChanged { token, holder, kind, to } => {
                self.tokens.get_mut(token).expect("token").apply_delegate(block, holder, *kind, to);
            }
            Event::Minted { token, to, amount } => {
                self.tokens.get_mut(token).expect("token").apply_mint(block, to, *amount);
            }
            Event::Burned { token, from, amount } => {
                self.tokens.get_mut(token).expect("token").apply_burn(block, from, *amount);
            }
            Event::ImplementationRegistered { id, implementation } => {
                self.registry.implementations.insert(id.clone(), implementation.clone());
            }
            Event::ProxyCreated { id, admin, implementation } => {
                self.registry.proxies.insert(
                    id.clone(),
                    crate::contracts::Proxy {
                        admin: admin.clone(),
                        implementation: implementation.clone(),
                        storage: BTreeMap::new(),
                    },
                );
            }
            Event::ImplementationSet { proxy, new, .. } => {
                self.registry.proxies.get_mut(proxy).expect("proxy").implementation = new.clone();
            }
            Event::AdminSet { proxy, new, .. } => {
                self.registry.proxies.get_mut(proxy).expect("proxy").admin = new.clone();
            }
            Event::ProxyStorageWritten { proxy, key, value } => {
                self.registry
                    .proxies
                    .get_mut(proxy)
                    .expect("proxy")
                    .storage
                    .insert(key.clone(), value.clone());
            }
            Event::ProposalCreated { governor, proposal, .. } => {
                let gov = self.governors.get_mut(governor).expect("governor");
                gov.next_id = gov.next_id.max(proposal.id + 1);
                gov.proposals.insert(proposal.id, proposal.clone());
            }
            Event::VoteCast { governor, proposal, voter, support, weight } => {
                let gov = self.governors.get_mut(governor).expect("governor");
                let prop = gov.proposals.get_mut(proposal).expect("proposal");
                if *support {
                    prop.for_votes += weight;
                } else {
                    prop.against_votes += weight;
                }
                prop.receipts.insert(
                    voter.clone(),
                    crate::governor::VoteReceipt { voter: voter.clone(), support: *support, weight: *weight },
                );
            }
            Event::ProposalQueued { governor, proposal, eta } => {
                let gov = self.governors.get_mut(governor).expect("governor");
                gov.proposals.get_mut(proposal).expect("proposal").eta = Some(*eta);
            }
            Event::ProposalExecuted { governor, proposal } => {
                let gov = self.governors.get_mut(governor).expect("governor");
                gov.proposals.get_mut(proposal).expect("proposal").executed = true;
            }
            Event::ProposalCanceled { governor, proposal, .. } => {
                let gov = self.governors.get_mut(governor).expect("governor");
                gov.proposals.get_mut(proposal).expect("proposal").canceled = true;
            }
            Event::TallyCorrupted { governor, proposal, added_for } => {
                let gov = self.governors.get_mut(governor).expect("governor");
                gov.proposals.get_mut(proposal).expect("proposal").for_votes += added_for;
            }
            Event::TokenListed { symbol } => {
                self.listings.insert(symbol.clone(), ListingState::Listed);
            }
            Event::TokenFrozen { symbol } => {
                self.listings.insert(symbol.clone(), ListingState::Frozen);
            }
            Event::LockCreated { id, owner, amount, lock_start, unlock_time } => {
                let vault = self.escrow.vault_account.clone();
                let token = self.escrow.token.clone();
                self.tokens.get_mut(&token).expect("escrow token").apply_transfer(
                    block, owner, &vault, *amount,
                );
                self.escrow.next_lock_id = self.escrow.next_lock_id.max(id + 1);
                self.escrow.locks.insert(
                    *id,
                    crate::escrow::EscrowLock {
                        owner: owner.clone(),
                        amount: *amount,
                        lock_start: *lock_start,
                        unlock_time: *unlock_time,
                    },
                );
            }
            Event::PoolRegistered { id, swap_fee_bps, protocol_fee_share_bps, lp_shares } => {
                self.escrow.pools.insert(
                    id.clone(),
                    crate::escrow::Pool {
                        swap_fee_bps: *swap_fee_bps,
                        protocol_fee_share_bps: *protocol_fee_share_bps,
                        cumulative_volume: 0,
                        protocol_revenue: 0,
                        lp_shares: lp_shares.clone(),
                    },
                );
            }
            Event::GaugeCreated { id, pool } => {
                self.escrow.gauges.insert(
                    id.clone(),
                    crate::escrow::Gauge { pool: pool.clone(), killed: false },
                );
            }
            Event::GaugeVoted { voter, effective_epoch, allocations } => {
                self.escrow
                    .allocations
                    .entry(voter.clone())
                    .or_default()
                    .push((*effective_epoch, allocations.clone()));
            }
            Event::GaugeKilled { gauge } => {
                self.escrow.gauges.get_mut(gauge).expect("gauge").killed = true;
            }
            Event::EmissionShareGranted { account, bps } => {
                self.escrow.emission_shares.insert(account.clone(), *bps);
            }
            Event::EmissionsDistributed { epoch, credits, withheld_after, .. } => {
                let token = self.escrow.token.clone();
                let ledger = self.tokens.get_mut(&token).expect("escrow token");
                for (account, amount) in credits {
                    ledger.apply_mint(block, account, *amount);
                }
                self.escrow.withheld = *withheld_after;
                self.escrow.last_epoch = Some(*epoch);
            }
            Event::SwapRecorded { pool, volume, revenue } => {
                let p = self.escrow.pools.get_mut(pool).expect("pool");
                p.cumulative_volume += volume;
                p.protocol_revenue += revenue;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct World {
    pub state: SimState,
    pub log: Vec<LogEntry>,
    genesis: SimState,
}

struct FlashDebt {
    pool: PoolId,
    borrower: AccountId,
    outstanding: Units,
}

impl World {
    /// Seals `state` as the genesis snapshot; every later mutation is logged.
    pub fn new(state: SimState) -> Self {
        World { genesis: state.clone(), state, log: Vec::new() }
    }

    pub fn genesis(&self) -> &SimState {
        &self.genesis
    }

    pub fn height(&self) -> BlockHeight {
        self.state.height
    }

    /// Apply an event at the current height and record it.
    pub(crate) fn commit(&mut self, event: Event) {
        let block = self.state.height;
        self.state.apply(block, &event);
        self.log.push(LogEntry { block, event });
    }

    /// Fold the log over the genesis snapshot.
    pub fn replay(&self) -> SimState {
        let mut s = self.genesis.clone();
        for entry in &self.log {
            s.apply(entry.block, &entry.event);
        }
        s
    }

    pub fn advance_blocks(&mut self, n: u64) -> SimResult<()> {
        if n == 0 {
            return Err(SimError::Precondition("advance_blocks requires n >= 1".into()));
        }
        self.commit(Event::BlocksAdvanced { n });
        Ok(())
    }

    pub fn gas_price_at(&self, b: BlockHeight) -> SimResult<Units> {
        self.state.gas.price_at(b)
    }

    /// Execute a script with all-or-nothing semantics. Gas is charged on
    /// commit and on revert alike.
    pub fn execute_atomic(&mut self, tx: &TxScript) -> SimResult<TxOutcome> {
        if tx.calls.is_empty() {
            return Err(SimError::Precondition("transaction script has no calls".into()));
        }
        if !self.state.native.contains_key(&tx.sender) {
            return Err(SimError::Precondition(format!("unknown sender {}", tx.sender)));
        }
        let n_calls = count_calls(&tx.calls);
        let gas =
            self.gas_price_at(self.state.height)? * self.state.per_call_gas_unit * n_calls as Units;
        if gas > tx.gas_budget {
            return Err(SimError::Precondition("gas budget exceeded".into()));
        }

        let snapshot = self.state.clone();
        let log_len = self.log.len();
        let mut debts: Vec<FlashDebt> = Vec::new();
        let mut result = Ok(());
        for call in &tx.calls {
            result = self.exec_call(&tx.sender, call, &mut debts);
            if result.is_err() {
                break;
            }
        }
        match result {
            Ok(()) => {
                self.commit(Event::GasCharged { account: tx.sender.clone(), amount: gas });
                self.commit(Event::TxCommitted { sender: tx.sender.clone(), calls: n_calls });
                Ok(TxOutcome::Committed { gas, events: self.log.len() - log_len })
            }
            Err(err) => {
                let reason = match err {
                    SimError::Revert(r) => r,
                    SimError::Unknown { .. } => "unknown target".into(),
                    other => other.to_string(),
                };
                self.state = snapshot;
                self.log.truncate(log_len);
                self.commit(Event::GasCharged { account: tx.sender.clone(), amount: gas });
                self.commit(Event::TxReverted { sender: tx.sender.clone(), reason: reason.clone() });
                Ok(TxOutcome::Reverted { reason, gas })
            }
        }
    }

    fn exec_call(
        &mut self,
        sender: &AccountId,
        call: &Call,
        debts: &mut Vec<FlashDebt>,
    ) -> SimResult<()> {
        match call {
            Call::Transfer { token, to, amount } => self.transfer(token, sender, to, *amount),
            Call::Delegate { token, delegatee, kind } => {
                self.delegate(token, sender, delegatee, *kind)
            }
            Call::Mint { token, to, amount } => self.mint(token, sender, to, *amount),
            Call::Burn { token, from, amount } => self.burn(token, sender, from, *amount),
            Call::FlashBorrow { pool, amount, body } => {
                let fp = self.state.flash_pools.get(pool).cloned().ok_or(SimError::Unknown {
                    kind: "flash pool",
                    name: pool.0.clone(),
                })?;
                let reserve = self.token(&fp.token)?.balance(&fp.account);
                if *amount > reserve {
                    return Err(SimError::revert("insufficient liquidity"));
                }
                let fee = fp.fee(*amount);
                self.commit(Event::FlashBorrowed {
                    pool: pool.clone(),
                    borrower: sender.clone(),
                    amount: *amount,
                    fee,
                });
                self.commit(Event::Transfer {
                    token: fp.token.clone(),
                    from: fp.account.clone(),
                    to: sender.clone(),
                    amount: *amount,
                });
                debts.push(FlashDebt {
                    pool: pool.clone(),
                    borrower: sender.clone(),
                    outstanding: *amount + fee,
                });
                for inner in body {
                    self.exec_call(sender, inner, debts)?;
                }
                let debt = debts.pop().expect("flash debt frame");
                if debt.outstanding > 0 {
                    return Err(SimError::revert("flashloan not repaid"));
                }
                Ok(())
            }
            Call::FlashRepay { pool, amount } => {
                let fp = self.state.flash_pools.get(pool).cloned().ok_or(SimError::Unknown {
                    kind: "flash pool",
                    name: pool.0.clone(),
                })?;
                self.transfer(&fp.token, sender, &fp.account, *amount)?;
                self.commit(Event::FlashRepaid {
                    pool: pool.clone(),
                    borrower: sender.clone(),
                    amount: *amount,
                });
                if let Some(debt) = debts
                    .iter_mut()
                    .rev()
                    .find(|d| d.pool == *pool && d.borrower == *sender)
                {
                    debt.outstanding = debt.outstanding.saturating_sub(*amount);
                }
                Ok(())
            }
            Call::Propose { governor, actions, metadata_hash } => self
                .propose(governor, sender, actions.clone(), metadata_hash.clone())
                .map(|_| ()),
            Call::CastVote { governor, proposal, support } => {
                self.cast_vote(governor, sender, *proposal, *support)
            }
            Call::Queue { governor, proposal } => self.queue(governor, *proposal),
            Call::Execute { governor, proposal } => self.execute(governor, *proposal),
            Call::EmergencyExecute { governor, proposal } => {
                self.emergency_execute(governor, sender, *proposal)
            }
            Call::Cancel { governor, proposal, signatures } => {
                self.cancel(governor, sender, *proposal, signatures)
            }
            Call::SetImplementation { proxy, new_impl } => {
                self.set_implementation(sender, proxy, new_impl)
            }
            Call::SetAdmin { proxy, new_admin } => self.set_admin(sender, proxy, new_admin),
            Call::DelegateCall { proxy, operation, args } => self
                .delegate_call(sender, proxy, operation, args)
                .map(|_| ()),
            Call::CreateLock { amount, unlock_time } => {
                self.create_lock(sender, *amount, *unlock_time).map(|_| ())
            }
            Call::VoteGaugeWeight { allocations } => self.vote_gauge_weight(sender, allocations),
            Call::Fail { reason } => Err(SimError::revert(reason.clone())),
        }
    }
}

fn count_calls(calls: &[Call]) -> u64 {
    calls
        .iter()
        .map(|c| match c {
            Call::FlashBorrow { body, .. } => 1 + count_calls(body),
            _ => 1,
        })
        .sum()
}
