//! Vote-escrow subsystem: time-locked deposits with linearly decaying,
//! weekly-quantized voting power, gauge-weight voting, periodic emissions,
//! and pool fee accounting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::World;
use crate::event::Event;
use crate::types::*;

pub const WEEK: u64 = 7 * 86_400;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscrowLock {
    pub owner: AccountId,
    pub amount: Units,
    pub lock_start: Timestamp,
    pub unlock_time: Timestamp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub pool: LiquidityPoolId,
    pub killed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pool {
    pub swap_fee_bps: u32,
    /// Share of swap fees accruing to the protocol, in basis points.
    pub protocol_fee_share_bps: u32,
    pub cumulative_volume: Units,
    pub protocol_revenue: Units,
    /// LP ownership in basis points; emissions credited proportionally.
    pub lp_shares: BTreeMap<AccountId, u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscrowState {
    pub token: TokenId,
    /// Account holding escrowed (non-transferable) tokens.
    pub vault_account: AccountId,
    pub max_lock_duration: u64,
    pub epoch_length: u64,
    pub tokens_per_epoch: Units,
    pub locks: BTreeMap<LockId, EscrowLock>,
    pub next_lock_id: LockId,
    pub gauges: BTreeMap<GaugeId, Gauge>,
    /// Per-voter allocation history: (effective epoch, gauge -> bps).
    pub allocations: BTreeMap<AccountId, Vec<(u64, BTreeMap<GaugeId, u32>)>>,
    pub pools: BTreeMap<LiquidityPoolId, Pool>,
    /// Off-the-top emission grants (peace-treaty style), account -> bps.
    pub emission_shares: BTreeMap<AccountId, u32>,
    /// Emissions carried over from epochs with zero gauge weight.
    pub withheld: Units,
    pub last_epoch: Option<u64>,
}

impl Default for EscrowState {
    fn default() -> Self {
        EscrowState {
            token: TokenId::new("gov"),
            vault_account: AccountId::new("escrow-vault"),
            max_lock_duration: 52 * WEEK,
            epoch_length: WEEK,
            tokens_per_epoch: 0,
            locks: BTreeMap::new(),
            next_lock_id: 0,
            gauges: BTreeMap::new(),
            allocations: BTreeMap::new(),
            pools: BTreeMap::new(),
            emission_shares: BTreeMap::new(),
            withheld: 0,
            last_epoch: None,
        }
    }
}

impl EscrowState {
    pub fn epoch_of(&self, t: Timestamp) -> u64 {
        t / self.epoch_length
    }

    fn epoch_floor(&self, t: Timestamp) -> Timestamp {
        t - t % self.epoch_length
    }

    /// Decaying voting power of one lock: amount scaled by remaining lock
    /// time over the maximum, with the query time quantized down to the
    /// containing weekly epoch. Exactly zero at and after unlock.
    fn lock_power(&self, lock: &EscrowLock, t: Timestamp) -> Units {
        if t >= lock.unlock_time {
            return 0;
        }
        let remaining = (lock.unlock_time - self.epoch_floor(t)) as Units;
        (lock.amount * remaining / self.max_lock_duration as Units).min(lock.amount)
    }

    pub fn ve_power(&self, user: &AccountId, t: Timestamp) -> Units {
        self.locks
            .values()
            .filter(|l| l.owner == *user)
            .map(|l| self.lock_power(l, t))
            .sum()
    }

    /// Latest gauge allocation effective at or before `epoch`.
    pub fn allocation_at(&self, user: &AccountId, epoch: u64) -> Option<&BTreeMap<GaugeId, u32>> {
        self.allocations
            .get(user)?
            .iter()
            .rev()
            .find(|(eff, _)| *eff <= epoch)
            .map(|(_, alloc)| alloc)
    }

    /// ve-weighted gauge weights at the start of `epoch`; killed gauges are
    /// excluded from the denominator.
    pub fn gauge_weights(&self, epoch: u64) -> BTreeMap<GaugeId, Units> {
        let t_start = epoch * self.epoch_length;
        let mut weights: BTreeMap<GaugeId, Units> = BTreeMap::new();
        for user in self.allocations.keys() {
            let Some(alloc) = self.allocation_at(user, epoch) else { continue };
            let power = self.ve_power(user, t_start);
            if power == 0 {
                continue;
            }
            for (gauge, bps) in alloc {
                if self.gauges.get(gauge).map(|g| g.killed).unwrap_or(true) {
                    continue;
                }
                *weights.entry(gauge.clone()).or_insert(0) += power * *bps as Units / 10_000;
            }
        }
        weights
    }
}

/// Split `total` across keys in proportion to `weights`, exact in integer
/// units: floor division plus largest-remainder correction.
pub fn split_proportional<K: Clone + Ord>(
    total: Units,
    weights: &BTreeMap<K, Units>,
) -> BTreeMap<K, Units> {
    let sum: Units = weights.values().sum();
    let mut out: BTreeMap<K, Units> = BTreeMap::new();
    if sum == 0 {
        return out;
    }
    let mut assigned = 0;
    let mut remainders: Vec<(Units, K)> = Vec::new();
    for (k, w) in weights {
        let exact = total * w;
        let share = exact / sum;
        assigned += share;
        out.insert(k.clone(), share);
        remainders.push((exact % sum, k.clone()));
    }
    // Leftover goes to the largest remainders, largest key breaking ties
    // deterministically.
    remainders.sort_by(|a, b| b.cmp(a));
    let mut leftover = total - assigned;
    for (_, k) in remainders {
        if leftover == 0 {
            break;
        }
        *out.get_mut(&k).unwrap() += 1;
        leftover -= 1;
    }
    out
}

impl World {
    pub fn ve_power(&self, user: &AccountId, t: Timestamp) -> Units {
        self.state.escrow.ve_power(user, t)
    }

    pub fn create_lock(
        &mut self,
        user: &AccountId,
        amount: Units,
        unlock_time: Timestamp,
    ) -> SimResult<LockId> {
        let now = self.state.timestamp();
        if unlock_time <= now {
            return Err(SimError::revert("unlock time not in the future"));
        }
        if unlock_time - now > self.state.escrow.max_lock_duration {
            return Err(SimError::revert("lock exceeds max duration"));
        }
        let token = self.state.escrow.token.clone();
        if self.token(&token)?.balance(user) < amount {
            return Err(SimError::revert("insufficient balance"));
        }
        let id = self.state.escrow.next_lock_id;
        self.commit(Event::LockCreated {
            id,
            owner: user.clone(),
            amount,
            lock_start: now,
            unlock_time,
        });
        Ok(id)
    }

    pub fn register_pool(
        &mut self,
        id: &LiquidityPoolId,
        swap_fee_bps: u32,
        protocol_fee_share_bps: u32,
        lp_shares: BTreeMap<AccountId, u32>,
    ) -> SimResult<()> {
        if swap_fee_bps > 10_000 || protocol_fee_share_bps > 10_000 {
            return Err(SimError::revert("fee exceeds 100%"));
        }
        if self.state.escrow.pools.contains_key(id) {
            return Err(SimError::revert("pool already registered"));
        }
        self.commit(Event::PoolRegistered {
            id: id.clone(),
            swap_fee_bps,
            protocol_fee_share_bps,
            lp_shares,
        });
        Ok(())
    }

    pub fn create_gauge(&mut self, id: &GaugeId, pool: &LiquidityPoolId) -> SimResult<()> {
        if !self.state.escrow.pools.contains_key(pool) {
            return Err(SimError::Unknown { kind: "pool", name: pool.0.clone() });
        }
        if self.state.escrow.gauges.contains_key(id) {
            return Err(SimError::revert("gauge already exists"));
        }
        self.commit(Event::GaugeCreated { id: id.clone(), pool: pool.clone() });
        Ok(())
    }

    /// Apportion the voter's ve-power across gauges (basis points summing
    /// to at most 10,000). A first vote takes effect in the current epoch;
    /// a re-vote replaces the prior allocation at the next epoch boundary.
    pub fn vote_gauge_weight(
        &mut self,
        user: &AccountId,
        allocations: &BTreeMap<GaugeId, u32>,
    ) -> SimResult<()> {
        let total: u64 = allocations.values().map(|b| *b as u64).sum();
        if total > 10_000 {
            return Err(SimError::revert("allocation exceeds 100%"));
        }
        for gauge in allocations.keys() {
            if !self.state.escrow.gauges.contains_key(gauge) {
                return Err(SimError::Unknown { kind: "gauge", name: gauge.0.clone() });
            }
        }
        let now_epoch = self.state.escrow.epoch_of(self.state.timestamp());
        let effective_epoch = if self.state.escrow.allocations.contains_key(user) {
            now_epoch + 1
        } else {
            now_epoch
        };
        self.commit(Event::GaugeVoted {
            voter: user.clone(),
            effective_epoch,
            allocations: allocations.clone(),
        });
        Ok(())
    }

    /// Mint and distribute one epoch's emissions: off-the-top grant shares
    /// first, the rest across non-killed gauges by epoch-start weights,
    /// then down to each pool's LPs. Conservation is exact in integer
    /// units; with zero total gauge weight the emissions are withheld and
    /// carried over.
    pub fn distribute_emissions(&mut self, epoch: u64) -> SimResult<BTreeMap<GaugeId, Units>> {
        let escrow = &self.state.escrow;
        let now_epoch = escrow.epoch_of(self.state.timestamp());
        if epoch >= now_epoch {
            return Err(SimError::Precondition(format!("epoch {epoch} is not complete")));
        }
        if let Some(last) = escrow.last_epoch {
            if epoch <= last {
                return Err(SimError::Precondition(format!("epoch {epoch} already distributed")));
            }
        }
        let emissions = escrow.tokens_per_epoch + escrow.withheld;
        let mut credits: BTreeMap<AccountId, Units> = BTreeMap::new();

        let mut granted = 0;
        for (account, bps) in &escrow.emission_shares {
            let take = emissions * *bps as Units / 10_000;
            if take > 0 {
                *credits.entry(account.clone()).or_insert(0) += take;
                granted += take;
            }
        }
        let remaining = emissions - granted;

        let weights = escrow.gauge_weights(epoch);
        let total_weight: Units = weights.values().sum();
        let (gauge_amounts, withheld_after) = if total_weight == 0 {
            (BTreeMap::new(), remaining)
        } else {
            (split_proportional(remaining, &weights), 0)
        };
        for (gauge, amount) in &gauge_amounts {
            let pool_id = &escrow.gauges[gauge].pool;
            let pool = &escrow.pools[pool_id];
            let shares: BTreeMap<AccountId, Units> =
                pool.lp_shares.iter().map(|(a, bps)| (a.clone(), *bps as Units)).collect();
            for (account, credit) in split_proportional(*amount, &shares) {
                *credits.entry(account).or_insert(0) += credit;
            }
        }

        self.commit(Event::EmissionsDistributed {
            epoch,
            gauge_amounts: gauge_amounts.clone(),
            credits,
            withheld_after,
        });
        Ok(gauge_amounts)
    }

    pub fn record_swap_volume(&mut self, pool: &LiquidityPoolId, volume: Units) -> SimResult<()> {
        let p = self.state.escrow.pools.get(pool).ok_or(SimError::Unknown {
            kind: "pool",
            name: pool.0.clone(),
        })?;
        let fees = volume * p.swap_fee_bps as Units / 10_000;
        let revenue = fees * p.protocol_fee_share_bps as Units / 10_000;
        self.commit(Event::SwapRecorded { pool: pool.clone(), volume, revenue });
        Ok(())
    }

    /// Grant an off-the-top emission share (peace-treaty style). Gated the
    /// same way as [`World::kill_gauge`]: governance only.
    pub fn grant_emission_share(
        &mut self,
        caller: &AccountId,
        account: &AccountId,
        bps: u32,
    ) -> SimResult<()> {
        let caller_contract = ContractId(caller.0.clone());
        if !self.state.governors.contains_key(&caller_contract) {
            return Err(SimError::revert("grant_emission_share requires governance"));
        }
        if bps > 10_000 {
            return Err(SimError::revert("emission share exceeds 100%"));
        }
        self.commit(Event::EmissionShareGranted { account: account.clone(), bps });
        Ok(())
    }

    /// Kill a gauge. Only a governor contract may do this directly; the
    /// usual path is an executed governance action.
    pub fn kill_gauge(&mut self, caller: &AccountId, gauge: &GaugeId) -> SimResult<()> {
        let caller_contract = ContractId(caller.0.clone());
        if !self.state.governors.contains_key(&caller_contract) {
            return Err(SimError::revert("kill_gauge requires governance"));
        }
        if !self.state.escrow.gauges.contains_key(gauge) {
            return Err(SimError::Unknown { kind: "gauge", name: gauge.0.clone() });
        }
        self.commit(Event::GaugeKilled { gauge: gauge.clone() });
        Ok(())
    }
}
