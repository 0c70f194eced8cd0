//! Governance-token ledger: checkpointed historical balances, dual
//! delegation (voting vs. proposition power), and flashloan pools.
//!
//! Every balance-moving event writes checkpoints at the current block for
//! the affected accounts and their delegatees, so `power_at` can answer
//! historical snapshot queries with a binary search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::World;
use crate::event::Event;
use crate::types::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub block: BlockHeight,
    pub value: Units,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenLedger {
    pub total_supply: Units,
    pub balances: BTreeMap<AccountId, Units>,
    pub balance_checkpoints: BTreeMap<AccountId, Vec<Checkpoint>>,
    /// One checkpoint stream per power kind, indexed by `PowerKind::index`.
    pub power_checkpoints: [BTreeMap<AccountId, Vec<Checkpoint>>; 2],
    /// Standing delegation per holder; absent means self-delegated.
    pub delegation: BTreeMap<AccountId, [AccountId; 2]>,
    /// Account allowed to mint/burn (a governor or the scenario harness).
    pub authority: Option<AccountId>,
}

impl TokenLedger {
    pub fn new(authority: Option<AccountId>) -> Self {
        TokenLedger {
            total_supply: 0,
            balances: BTreeMap::new(),
            balance_checkpoints: BTreeMap::new(),
            power_checkpoints: [BTreeMap::new(), BTreeMap::new()],
            delegation: BTreeMap::new(),
            authority,
        }
    }

    pub fn balance(&self, account: &AccountId) -> Units {
        self.balances.get(account).copied().unwrap_or(0)
    }

    pub fn delegatee(&self, holder: &AccountId, kind: PowerKind) -> AccountId {
        self.delegation
            .get(holder)
            .map(|d| d[kind.index()].clone())
            .unwrap_or_else(|| holder.clone())
    }

    /// Power recorded at the greatest checkpoint with block <= `b`; 0 if the
    /// account has no checkpoint that early.
    pub fn power_at(&self, account: &AccountId, kind: PowerKind, b: BlockHeight) -> Units {
        lookup(&self.power_checkpoints[kind.index()], account, b)
    }

    pub fn balance_at(&self, account: &AccountId, b: BlockHeight) -> Units {
        lookup(&self.balance_checkpoints, account, b)
    }

    /// Current (latest-checkpoint) power.
    pub fn power_now(&self, account: &AccountId, kind: PowerKind) -> Units {
        self.power_checkpoints[kind.index()]
            .get(account)
            .and_then(|cps| cps.last())
            .map(|cp| cp.value)
            .unwrap_or(0)
    }

    // --- transition helpers (unchecked; validation happens in the ops) ---

    pub(crate) fn apply_transfer(
        &mut self,
        block: BlockHeight,
        from: &AccountId,
        to: &AccountId,
        amount: Units,
    ) {
        self.debit(block, from, amount);
        self.credit(block, to, amount);
    }

    pub(crate) fn apply_delegate(
        &mut self,
        block: BlockHeight,
        holder: &AccountId,
        kind: PowerKind,
        to: &AccountId,
    ) {
        let old = self.delegatee(holder, kind);
        let amount = self.balance(holder);
        if old != *to {
            self.adjust_power(block, kind, &old, amount, false);
            self.adjust_power(block, kind, to, amount, true);
        }
        let entry = self
            .delegation
            .entry(holder.clone())
            .or_insert_with(|| [holder.clone(), holder.clone()]);
        entry[kind.index()] = to.clone();
    }

    pub(crate) fn apply_mint(&mut self, block: BlockHeight, to: &AccountId, amount: Units) {
        self.total_supply += amount;
        self.credit(block, to, amount);
    }

    pub(crate) fn apply_burn(&mut self, block: BlockHeight, from: &AccountId, amount: Units) {
        self.debit(block, from, amount);
        self.total_supply -= amount;
    }

    fn credit(&mut self, block: BlockHeight, to: &AccountId, amount: Units) {
        let bal = self.balance(to) + amount;
        self.balances.insert(to.clone(), bal);
        write_checkpoint(self.balance_checkpoints.entry(to.clone()).or_default(), block, bal);
        for kind in PowerKind::ALL {
            let d = self.delegatee(to, kind);
            self.adjust_power(block, kind, &d, amount, true);
        }
    }

    fn debit(&mut self, block: BlockHeight, from: &AccountId, amount: Units) {
        let bal = self.balance(from) - amount;
        self.balances.insert(from.clone(), bal);
        write_checkpoint(self.balance_checkpoints.entry(from.clone()).or_default(), block, bal);
        for kind in PowerKind::ALL {
            let d = self.delegatee(from, kind);
            self.adjust_power(block, kind, &d, amount, false);
        }
    }

    fn adjust_power(
        &mut self,
        block: BlockHeight,
        kind: PowerKind,
        account: &AccountId,
        amount: Units,
        add: bool,
    ) {
        if amount == 0 {
            return;
        }
        let current = self.power_now(account, kind);
        let next = if add { current + amount } else { current - amount };
        write_checkpoint(
            self.power_checkpoints[kind.index()].entry(account.clone()).or_default(),
            block,
            next,
        );
    }
}

fn write_checkpoint(list: &mut Vec<Checkpoint>, block: BlockHeight, value: Units) {
    match list.last_mut() {
        Some(last) if last.block == block => last.value = value,
        _ => list.push(Checkpoint { block, value }),
    }
}

fn lookup(map: &BTreeMap<AccountId, Vec<Checkpoint>>, account: &AccountId, b: BlockHeight) -> Units {
    let Some(cps) = map.get(account) else { return 0 };
    let idx = cps.partition_point(|cp| cp.block <= b);
    if idx == 0 {
        0
    } else {
        cps[idx - 1].value
    }
}

/// A flashloan pool. Its reserve is the pool account's ledger balance, so
/// token conservation covers pooled funds too.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlashPool {
    pub token: TokenId,
    pub account: AccountId,
    pub fee_bps: u32,
}

impl FlashPool {
    /// Flat fee in token units, basis points with floor rounding.
    pub fn fee(&self, amount: Units) -> Units {
        amount * self.fee_bps as Units / 10_000
    }
}

// --- ledger operations on the world ---

impl World {
    pub fn token(&self, token: &TokenId) -> SimResult<&TokenLedger> {
        self.state.tokens.get(token).ok_or_else(|| SimError::Unknown {
            kind: "token",
            name: token.0.clone(),
        })
    }

    pub fn transfer(
        &mut self,
        token: &TokenId,
        from: &AccountId,
        to: &AccountId,
        amount: Units,
    ) -> SimResult<()> {
        let ledger = self.token(token)?;
        if ledger.balance(from) < amount {
            return Err(SimError::revert("insufficient balance"));
        }
        self.commit(Event::Transfer {
            token: token.clone(),
            from: from.clone(),
            to: to.clone(),
            amount,
        });
        Ok(())
    }

    pub fn delegate(
        &mut self,
        token: &TokenId,
        holder: &AccountId,
        delegatee: &AccountId,
        kind: PowerKind,
    ) -> SimResult<()> {
        self.token(token)?;
        self.commit(Event::DelegateChanged {
            token: token.clone(),
            holder: holder.clone(),
            kind,
            to: delegatee.clone(),
        });
        Ok(())
    }

    pub fn mint(
        &mut self,
        token: &TokenId,
        caller: &AccountId,
        to: &AccountId,
        amount: Units,
    ) -> SimResult<()> {
        let ledger = self.token(token)?;
        if ledger.authority.as_ref() != Some(caller) {
            return Err(SimError::revert("not mint authority"));
        }
        self.commit(Event::Minted { token: token.clone(), to: to.clone(), amount });
        Ok(())
    }

    pub fn burn(
        &mut self,
        token: &TokenId,
        caller: &AccountId,
        from: &AccountId,
        amount: Units,
    ) -> SimResult<()> {
        let ledger = self.token(token)?;
        if ledger.authority.as_ref() != Some(caller) {
            return Err(SimError::revert("not mint authority"));
        }
        if ledger.balance(from) < amount {
            return Err(SimError::revert("burn exceeds balance"));
        }
        self.commit(Event::Burned { token: token.clone(), from: from.clone(), amount });
        Ok(())
    }

    pub fn power_at(
        &self,
        token: &TokenId,
        account: &AccountId,
        kind: PowerKind,
        b: BlockHeight,
    ) -> Units {
        self.state
            .tokens
            .get(token)
            .map(|l| l.power_at(account, kind, b))
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{GasGenerator, GasSeries, SimState};

    fn world_with_token(balances: &[(&str, Units)]) -> World {
        let mut state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 1 }).unwrap());
        let mut ledger = TokenLedger::new(Some(AccountId::new("authority")));
        for (name, amount) in balances {
            ledger.apply_mint(0, &AccountId::new(*name), *amount);
        }
        state.tokens.insert(TokenId::new("gov"), ledger);
        World::new(state)
    }

    #[test]
    fn transfer_moves_balance_and_power() {
        let mut w = world_with_token(&[("alice", 100), ("bob", 30)]);
        let gov = TokenId::new("gov");
        w.advance_blocks(1).unwrap();
        w.transfer(&gov, &"alice".into(), &"bob".into(), 40).unwrap();
        let ledger = w.token(&gov).unwrap();
        assert_eq!(ledger.balance(&"alice".into()), 60);
        assert_eq!(ledger.balance(&"bob".into()), 70);
        // default self-delegation: power follows balance, both streams
        for kind in PowerKind::ALL {
            assert_eq!(ledger.power_now(&"alice".into(), kind), 60);
            assert_eq!(ledger.power_now(&"bob".into(), kind), 70);
        }
        // history is preserved
        assert_eq!(ledger.power_at(&"alice".into(), PowerKind::Voting, 0), 100);
    }

    #[test]
    fn transfer_insufficient_balance_reverts() {
        let mut w = world_with_token(&[("alice", 10)]);
        let err = w.transfer(&"gov".into(), &"alice".into(), &"bob".into(), 11).unwrap_err();
        assert!(err.is_revert());
    }

    #[test]
    fn delegation_moves_one_stream_only() {
        let mut w = world_with_token(&[("alice", 100)]);
        let gov = TokenId::new("gov");
        w.advance_blocks(1).unwrap();
        w.delegate(&gov, &"alice".into(), &"carol".into(), PowerKind::Voting).unwrap();
        let ledger = w.token(&gov).unwrap();
        assert_eq!(ledger.power_now(&"alice".into(), PowerKind::Voting), 0);
        assert_eq!(ledger.power_now(&"carol".into(), PowerKind::Voting), 100);
        // proposition power untouched
        assert_eq!(ledger.power_now(&"alice".into(), PowerKind::Proposition), 100);
        assert_eq!(ledger.power_now(&"carol".into(), PowerKind::Proposition), 0);
        // balance does not move with delegation
        assert_eq!(ledger.balance(&"alice".into()), 100);
        assert_eq!(ledger.balance(&"carol".into()), 0);
    }

    #[test]
    fn delegatee_receives_future_transfers() {
        let mut w = world_with_token(&[("alice", 50), ("bob", 20)]);
        let gov = TokenId::new("gov");
        w.advance_blocks(1).unwrap();
        w.delegate(&gov, &"alice".into(), &"carol".into(), PowerKind::Voting).unwrap();
        w.transfer(&gov, &"bob".into(), &"alice".into(), 20).unwrap();
        assert_eq!(w.token(&gov).unwrap().power_now(&"carol".into(), PowerKind::Voting), 70);
    }

    #[test]
    fn mint_burn_gated_on_authority() {
        let mut w = world_with_token(&[("alice", 10)]);
        let gov = TokenId::new("gov");
        assert!(w.mint(&gov, &"alice".into(), &"alice".into(), 5).unwrap_err().is_revert());
        w.mint(&gov, &"authority".into(), &"alice".into(), 5).unwrap();
        assert_eq!(w.token(&gov).unwrap().total_supply, 15);
        w.burn(&gov, &"authority".into(), &"alice".into(), 15).unwrap();
        assert_eq!(w.token(&gov).unwrap().total_supply, 0);
        assert!(w.burn(&gov, &"authority".into(), &"alice".into(), 1).unwrap_err().is_revert());
    }

    #[test]
    fn same_block_checkpoints_collapse() {
        let mut cps = Vec::new();
        write_checkpoint(&mut cps, 5, 10);
        write_checkpoint(&mut cps, 5, 20);
        write_checkpoint(&mut cps, 7, 30);
        assert_eq!(cps, vec![Checkpoint { block: 5, value: 20 }, Checkpoint { block: 7, value: 30 }]);
    }

    #[test]
    fn power_before_first_checkpoint_is_zero() {
        let w = world_with_token(&[("alice", 100)]);
        // genesis checkpoints are at block 0; nothing earlier exists
        let ledger = w.token(&"gov".into()).unwrap();
        assert_eq!(ledger.power_at(&"nobody".into(), PowerKind::Voting, 100), 0);
    }

    #[test]
    fn flash_fee_floors() {
        let pool = FlashPool { token: "gov".into(), account: "pool".into(), fee_bps: 9 };
        assert_eq!(pool.fee(1_000_000), 900);
        assert_eq!(pool.fee(1_111), 0); // 0.9999 floors to 0
        assert_eq!(pool.fee(0), 0);
    }

    // Randomized ops against a brute-force oracle that recomputes expected
    // power from the raw op history at every queried block.
    #[test]
    fn checkpoint_history_matches_brute_force_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let accounts: Vec<AccountId> =
            (0..5).map(|i| AccountId::new(format!("acct-{i}"))).collect();
        for _ in 0..30 {
            let mut w = world_with_token(&[
                ("acct-0", 1000), ("acct-1", 1000), ("acct-2", 1000),
                ("acct-3", 1000), ("acct-4", 1000),
            ]);
            let gov = TokenId::new("gov");
            // (block, op) history for the oracle
            #[derive(Clone)]
            enum Op { Xfer(usize, usize, Units), Del(usize, usize, PowerKind) }
            let mut history: Vec<(BlockHeight, Op)> = Vec::new();
            for _ in 0..40 {
                w.advance_blocks(rng.gen_range(1..4)).unwrap();
                let b = w.height();
                if rng.gen_bool(0.7) {
                    let from = rng.gen_range(0..5);
                    let to = rng.gen_range(0..5);
                    let max = w.token(&gov).unwrap().balance(&accounts[from]);
                    if max == 0 { continue; }
                    let amount = rng.gen_range(1..=max);
                    w.transfer(&gov, &accounts[from], &accounts[to], amount).unwrap();
                    history.push((b, Op::Xfer(from, to, amount)));
                } else {
                    let holder = rng.gen_range(0..5);
                    let to = rng.gen_range(0..5);
                    let kind = if rng.gen_bool(0.5) { PowerKind::Voting } else { PowerKind::Proposition };
                    w.delegate(&gov, &accounts[holder], &accounts[to], kind).unwrap();
                    history.push((b, Op::Del(holder, to, kind)));
                }
            }
            let final_block = w.height();
            // oracle: replay history up to each queried block from scratch
            for probe in [0, final_block / 3, final_block / 2, final_block] {
                let mut bal = [1000u128; 5];
                let mut deleg = [[0usize, 0], [1, 1], [2, 2], [3, 3], [4, 4]];
                for (b, op) in &history {
                    if *b > probe { break; }
                    match op {
                        Op::Xfer(f, t, a) => { bal[*f] -= a; bal[*t] += a; }
                        Op::Del(h, t, k) => deleg[*h][k.index()] = *t,
                    }
                }
                for (i, account) in accounts.iter().enumerate() {
                    for kind in PowerKind::ALL {
                        let expected: Units = (0..5)
                            .filter(|h| deleg[*h][kind.index()] == i)
                            .map(|h| bal[h])
                            .sum();
                        assert_eq!(
                            w.token(&gov).unwrap().power_at(account, kind, probe),
                            expected,
                            "power mismatch at block {probe}"
                        );
                    }
                    assert_eq!(w.token(&gov).unwrap().balance_at(account, probe), bal[i]);
                }
            }
        }
    }
}
