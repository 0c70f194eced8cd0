//! Voting-pattern metrics over event logs, plus an agent-based turnout
//! model. Metrics are pure functions of the log: same log, same summary.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{Call, TxScript, World};
use crate::event::{Event, LogEntry};
use crate::governor::{Action, ActionKind};
use crate::types::*;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub proposals_count: usize,
    pub participation_mean: f64,
    pub participation_std: f64,
    pub participation_min: f64,
    pub participation_median: f64,
    pub participation_max: f64,
    /// Largest integer h such that at least h% of proposals won at least
    /// h% of the cast votes.
    pub h_index: u32,
    /// Fraction of decided proposals whose for-share of cast tokens is at
    /// least 99%.
    pub supermajority_rate: f64,
    /// Pearson r over (gas price at proposal start, votes cast).
    pub turnout_gas_corr: f64,
}

/// Per-proposal view folded out of an event log.
#[derive(Clone, Debug, Default)]
pub struct ProposalStats {
    pub governor: Option<ContractId>,
    pub proposer: Option<AccountId>,
    pub created_block: BlockHeight,
    pub start_block: BlockHeight,
    pub end_block: BlockHeight,
    pub gas_at_start: Units,
    pub for_votes: Units,
    pub against_votes: Units,
    pub weight_cast: Units,
    pub votes_cast: usize,
    pub executed: bool,
    pub canceled: bool,
    pub executed_block: Option<BlockHeight>,
}

impl ProposalStats {
    pub fn decided(&self, final_height: BlockHeight) -> bool {
        self.executed || self.canceled || final_height > self.end_block
    }

    /// For-share of cast tokens, as a percent. None when nothing was cast.
    pub fn for_share_percent(&self) -> Option<f64> {
        let total = self.for_votes + self.against_votes;
        if total == 0 {
            return None;
        }
        Some(self.for_votes as f64 / total as f64 * 100.0)
    }
}

pub fn fold_proposals(log: &[LogEntry]) -> BTreeMap<ProposalId, ProposalStats> {
    let mut out: BTreeMap<ProposalId, ProposalStats> = BTreeMap::new();
    for entry in log {
        match &entry.event {
            Event::ProposalCreated { governor, proposal, gas_at_start } => {
                let stats = out.entry(proposal.id).or_default();
                stats.governor = Some(governor.clone());
                stats.proposer = Some(proposal.proposer.clone());
                stats.created_block = proposal.created_block;
                stats.start_block = proposal.start_block;
                stats.end_block = proposal.end_block;
                stats.gas_at_start = *gas_at_start;
            }
            Event::VoteCast { proposal, support, weight, .. } => {
                let stats = out.entry(*proposal).or_default();
                if *support {
                    stats.for_votes += weight;
                } else {
                    stats.against_votes += weight;
                }
                stats.weight_cast += weight;
                stats.votes_cast += 1;
            }
            Event::TallyCorrupted { proposal, added_for, .. } => {
                out.entry(*proposal).or_default().for_votes += added_for;
            }
            Event::ProposalExecuted { proposal, .. } => {
                let stats = out.entry(*proposal).or_default();
                stats.executed = true;
                stats.executed_block = Some(entry.block);
            }
            Event::ProposalCanceled { proposal, .. } => {
                out.entry(*proposal).or_default().canceled = true;
            }
            _ => {}
        }
    }
    out
}

pub fn final_height(log: &[LogEntry]) -> BlockHeight {
    log.iter()
        .map(|e| match e.event {
            Event::BlocksAdvanced { n } => e.block + n,
            _ => e.block,
        })
        .max()
        .unwrap_or(0)
}

/// Fraction of circulating supply cast on one decided proposal.
pub fn participation_rate(
    log: &[LogEntry],
    proposal: ProposalId,
    circulating_supply: Units,
) -> SimResult<f64> {
    let stats = fold_proposals(log);
    let s = stats
        .get(&proposal)
        .ok_or(SimError::Unknown { kind: "proposal", name: proposal.to_string() })?;
    if !s.decided(final_height(log)) {
        return Err(SimError::Precondition("proposal not decided".into()));
    }
    if circulating_supply == 0 {
        return Ok(0.0);
    }
    Ok(s.weight_cast as f64 / circulating_supply as f64)
}

/// Largest integer h in [0, 100] such that at least h% of proposals have a
/// for-share of at least h percent. Counts are taken against a descending
/// sort so each candidate h costs one binary search.
pub fn h_index(for_share_percents: &[f64]) -> u32 {
    let n = for_share_percents.len();
    if n == 0 {
        return 0;
    }
    let mut sorted = for_share_percents.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for h in (1..=100u32).rev() {
        // number of proposals with share >= h
        let count = sorted.partition_point(|s| *s >= h as f64);
        if count * 100 >= h as usize * n {
            return h;
        }
    }
    0
}

/// Fraction of decided proposals whose for-share of cast tokens is at
/// least `threshold` (a fraction, e.g. 0.99).
pub fn supermajority_rate(log: &[LogEntry], threshold: f64) -> f64 {
    let stats = fold_proposals(log);
    let fh = final_height(log);
    let decided: Vec<&ProposalStats> = stats.values().filter(|s| s.decided(fh)).collect();
    if decided.is_empty() {
        return 0.0;
    }
    let qualifying = decided
        .iter()
        .filter(|s| s.for_share_percent().map(|p| p >= threshold * 100.0).unwrap_or(false))
        .count();
    qualifying as f64 / decided.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldingInterval {
    pub acquire_block: BlockHeight,
    /// None when the account still holds a balance at the end of the log.
    pub dispose_block: Option<BlockHeight>,
    pub overlapped: Vec<ProposalId>,
    pub voted: Vec<ProposalId>,
    pub proposed: Vec<ProposalId>,
}

/// Intervals during which `account` held a positive balance of `token`,
/// annotated with the proposals whose lifecycle overlapped the interval.
pub fn holding_duration(log: &[LogEntry], token: &TokenId, account: &AccountId) -> Vec<HoldingInterval> {
    let mut intervals: Vec<(BlockHeight, Option<BlockHeight>)> = Vec::new();
    let mut balance: Units = 0;
    let mut open: Option<BlockHeight> = None;
    let delta = |block: BlockHeight, add: Units, sub: Units, balance: &mut Units, open: &mut Option<BlockHeight>, intervals: &mut Vec<(BlockHeight, Option<BlockHeight>)>| {
        *balance = *balance + add - sub;
        if *balance > 0 && open.is_none() {
            *open = Some(block);
        } else if *balance == 0 {
            if let Some(start) = open.take() {
                intervals.push((start, Some(block)));
            }
        }
    };
    for entry in log {
        match &entry.event {
            Event::Transfer { token: t, from, to, amount } if t == token => {
                if from == account {
                    delta(entry.block, 0, *amount, &mut balance, &mut open, &mut intervals);
                }
                if to == account {
                    delta(entry.block, *amount, 0, &mut balance, &mut open, &mut intervals);
                }
            }
            Event::Minted { token: t, to, amount } if t == token && to == account => {
                delta(entry.block, *amount, 0, &mut balance, &mut open, &mut intervals);
            }
            Event::Burned { token: t, from, amount } if t == token && from == account => {
                delta(entry.block, 0, *amount, &mut balance, &mut open, &mut intervals);
            }
            Event::LockCreated { owner, amount, .. } if owner == account => {
                // locked tokens leave the transferable balance
                delta(entry.block, 0, *amount, &mut balance, &mut open, &mut intervals);
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        intervals.push((start, None));
    }

    let stats = fold_proposals(log);
    let mut voted_by: BTreeMap<ProposalId, bool> = BTreeMap::new();
    for entry in log {
        if let Event::VoteCast { proposal, voter, .. } = &entry.event {
            if voter == account {
                voted_by.insert(*proposal, true);
            }
        }
    }
    intervals
        .into_iter()
        .map(|(start, end)| {
            let overlaps = |s: &ProposalStats| {
                let prop_end = s.executed_block.unwrap_or(s.end_block);
                let iv_end = end.unwrap_or(BlockHeight::MAX);
                s.created_block <= iv_end && prop_end >= start
            };
            let overlapped: Vec<ProposalId> =
                stats.iter().filter(|(_, s)| overlaps(s)).map(|(id, _)| *id).collect();
            let voted = overlapped.iter().copied().filter(|id| voted_by.contains_key(id)).collect();
            let proposed = overlapped
                .iter()
                .copied()
                .filter(|id| stats[id].proposer.as_ref() == Some(account))
                .collect();
            HoldingInterval { acquire_block: start, dispose_block: end, overlapped, voted, proposed }
        })
        .collect()
}

pub fn pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return 0.0;
    }
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Full metrics summary from a log. Participation is computed over decided
/// proposals only.
pub fn compute_metrics(log: &[LogEntry], circulating_supply: Units) -> MetricsSummary {
    let stats = fold_proposals(log);
    let fh = final_height(log);
    let decided: Vec<&ProposalStats> = stats.values().filter(|s| s.decided(fh)).collect();
    let mut participation: Vec<f64> = decided
        .iter()
        .map(|s| {
            if circulating_supply == 0 {
                0.0
            } else {
                s.weight_cast as f64 / circulating_supply as f64
            }
        })
        .collect();
    participation.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let shares: Vec<f64> = decided.iter().filter_map(|s| s.for_share_percent()).collect();
    let corr_pairs: Vec<(f64, f64)> = decided
        .iter()
        .map(|s| (s.gas_at_start as f64, s.votes_cast as f64))
        .collect();

    let n = participation.len();
    let mean = if n == 0 { 0.0 } else { participation.iter().sum::<f64>() / n as f64 };
    let std = if n == 0 {
        0.0
    } else {
        (participation.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n as f64).sqrt()
    };
    let median = if n == 0 {
        0.0
    } else if n % 2 == 1 {
        participation[n / 2]
    } else {
        (participation[n / 2 - 1] + participation[n / 2]) / 2.0
    };
    MetricsSummary {
        proposals_count: n,
        participation_mean: mean,
        participation_std: std,
        participation_min: participation.first().copied().unwrap_or(0.0),
        participation_median: median,
        participation_max: participation.last().copied().unwrap_or(0.0),
        h_index: h_index(&shares),
        supermajority_rate: supermajority_rate(log, 0.99),
        turnout_gas_corr: pearson(&corr_pairs),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoterAgent {
    pub id: AccountId,
    pub stake: Units,
    /// Private benefit of casting one vote, in gas-currency units.
    pub value_per_vote: Units,
    /// Probability of voting 'for'.
    pub alignment: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurnoutOutcome {
    /// (proposal id, gas price at start, votes cast)
    pub per_proposal: Vec<(ProposalId, Units, usize)>,
    pub summary: MetricsSummary,
}

/// Agent-based turnout model: during each proposal's voting window an
/// agent casts a vote iff its private value covers the per-vote gas cost
/// at the start block; support is drawn from its alignment with the run's
/// seeded generator. Votes go through the governor, so snapshot and
/// receipt rules apply.
pub fn simulate_turnout(
    world: &mut World,
    gov: &ContractId,
    proposers: &[AccountId],
    agents: &[VoterAgent],
    seed: u64,
) -> SimResult<TurnoutOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = world.governor(gov)?.params.clone();
    let mut per_proposal = Vec::with_capacity(proposers.len());
    for (i, proposer) in proposers.iter().enumerate() {
        let id = world.propose(
            gov,
            proposer,
            vec![Action::new(ActionKind::Noop, format!("parameter update {i}"))],
            format!("ipfs://{i:064x}"),
        )?;
        world.advance_blocks(params.voting_delay + 1)?;
        let start = world.height();
        let price = world.gas_price_at(start)?;
        let cost = price * world.state.per_call_gas_unit;
        let mut votes = 0;
        for agent in agents {
            let support = rng.gen_bool(agent.alignment.clamp(0.0, 1.0));
            if agent.value_per_vote < cost {
                continue;
            }
            let tx = TxScript::new(
                agent.id.clone(),
                vec![Call::CastVote { governor: gov.clone(), proposal: id, support }],
            );
            if world.execute_atomic(&tx)?.is_committed() {
                votes += 1;
            }
        }
        per_proposal.push((id, price, votes));
        world.advance_blocks(params.voting_period + 1)?;
    }
    let supply = world.token(&world.governor(gov)?.token.clone())?.total_supply;
    let summary = compute_metrics(&world.log, supply);
    Ok(TurnoutOutcome { per_proposal, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;

    /// Reference h-index: scan candidates high-to-low, counting qualifying
    /// shares directly each time.
    fn h_index_brute(shares: &[f64]) -> u32 {
        let n = shares.len();
        for h in (1..=100u32).rev() {
            let count = shares.iter().filter(|s| **s >= h as f64).count();
            if count * 100 >= h as usize * n && n > 0 {
                return h;
            }
        }
        0
    }

    fn entry(block: BlockHeight, event: Event) -> LogEntry {
        LogEntry { block, event }
    }

    fn proposal_entries(
        id: ProposalId,
        start: BlockHeight,
        votes: &[(&str, bool, Units)],
    ) -> Vec<LogEntry> {
        let mut out = vec![entry(
            start,
            Event::ProposalCreated {
                governor: "gov".into(),
                proposal: crate::governor::Proposal {
                    id,
                    proposer: "p".into(),
                    actions: vec![],
                    metadata_hash: String::new(),
                    created_block: start,
                    start_block: start,
                    end_block: start + 10,
                    snapshot_block: start,
                    for_votes: 0,
                    against_votes: 0,
                    receipts: std::collections::BTreeMap::new(),
                    eta: None,
                    canceled: false,
                    executed: false,
                },
                gas_at_start: 30,
            },
        )];
        for (voter, support, weight) in votes {
            out.push(entry(
                start + 1,
                Event::VoteCast {
                    governor: "gov".into(),
                    proposal: id,
                    voter: AccountId::new(*voter),
                    support: *support,
                    weight: *weight,
                },
            ));
        }
        out
    }

    #[test]
    fn h_index_matches_brute_force_on_random_inputs() {
        let mut rng = StdRng::seed_from_u64(7);
        for case in 0..1000 {
            let n = rng.gen_range(0..40);
            let shares: Vec<f64> =
                (0..n).map(|_| rng.gen_range(0.0..100.0_f64)).collect();
            assert_eq!(h_index(&shares), h_index_brute(&shares), "case {case}: {shares:?}");
        }
    }

    #[test]
    fn h_index_known_values() {
        assert_eq!(h_index(&[]), 0);
        assert_eq!(h_index(&[100.0]), 100);
        assert_eq!(h_index(&[0.0]), 0);
        // 4 proposals, shares 90/80/50/10: h=75 needs 3 of 4 at >=75 (only 2);
        // h=50 needs 2 of 4 at >=50 (3 qualify).
        assert_eq!(h_index(&[90.0, 80.0, 50.0, 10.0]), 50);
        assert_eq!(h_index(&[76.0; 100]), 76);
    }

    #[test]
    fn pearson_known_values() {
        assert_eq!(pearson(&[]), 0.0);
        assert_eq!(pearson(&[(1.0, 2.0)]), 0.0);
        // constant series has no defined correlation; we report 0
        assert_eq!(pearson(&[(1.0, 5.0), (2.0, 5.0), (3.0, 5.0)]), 0.0);
        let up: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * i as f64 + 1.0)).collect();
        assert!((pearson(&up) - 1.0).abs() < 1e-12);
        let down: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, -2.0 * i as f64)).collect();
        assert!((pearson(&down) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn fold_and_participation() {
        let mut log = proposal_entries(0, 5, &[("a", true, 600), ("b", false, 200)]);
        log.push(entry(16, Event::BlocksAdvanced { n: 5 }));
        let stats = fold_proposals(&log);
        let s = &stats[&0];
        assert_eq!(s.for_votes, 600);
        assert_eq!(s.against_votes, 200);
        assert_eq!(s.weight_cast, 800);
        assert_eq!(s.votes_cast, 2);
        assert_eq!(s.for_share_percent(), Some(75.0));
        assert_eq!(final_height(&log), 21);
        assert!(s.decided(21));
        assert_eq!(participation_rate(&log, 0, 8_000).unwrap(), 0.1);
        assert!(matches!(participation_rate(&log, 9, 8_000), Err(SimError::Unknown { .. })));
    }

    #[test]
    fn undecided_proposal_rejected_for_participation() {
        let log = proposal_entries(0, 5, &[("a", true, 600)]);
        // log ends at block 6, proposal ends at 15: not decided
        assert!(matches!(
            participation_rate(&log, 0, 1_000),
            Err(SimError::Precondition(_))
        ));
    }

    #[test]
    fn supermajority_rate_counts_only_qualifying_decided() {
        let mut log = Vec::new();
        log.extend(proposal_entries(0, 0, &[("a", true, 990), ("b", false, 10)])); // exactly 99%
        log.extend(proposal_entries(1, 0, &[("a", true, 989), ("b", false, 11)])); // 98.9%
        log.extend(proposal_entries(2, 0, &[("a", true, 100)])); // 100%
        log.push(entry(50, Event::BlocksAdvanced { n: 1 }));
        assert_eq!(supermajority_rate(&log, 0.99), 2.0 / 3.0);
        assert_eq!(supermajority_rate(&[], 0.99), 0.0);
    }

    #[test]
    fn holding_duration_tracks_intervals_and_overlaps() {
        let token = TokenId::new("t");
        let acct = AccountId::new("x");
        let mut log = vec![entry(
            3,
            Event::Minted { token: token.clone(), to: acct.clone(), amount: 100 },
        )];
        log.extend(proposal_entries(0, 4, &[("x", true, 100)]));
        log.push(entry(
            8,
            Event::Transfer { token: token.clone(), from: acct.clone(), to: "y".into(), amount: 100 },
        ));
        // second, still-open interval beginning after proposal 0 concluded
        log.push(entry(
            40,
            Event::Minted { token: token.clone(), to: acct.clone(), amount: 5 },
        ));
        let intervals = holding_duration(&log, &token, &acct);
        assert_eq!(intervals.len(), 2);
        assert_eq!(intervals[0].acquire_block, 3);
        assert_eq!(intervals[0].dispose_block, Some(8));
        assert_eq!(intervals[0].overlapped, vec![0]);
        assert_eq!(intervals[0].voted, vec![0]);
        assert!(intervals[0].proposed.is_empty());
        assert_eq!(intervals[1].acquire_block, 40);
        assert_eq!(intervals[1].dispose_block, None);
        assert!(intervals[1].overlapped.is_empty());
    }

    #[test]
    fn compute_metrics_summary_fields() {
        let mut log = Vec::new();
        log.extend(proposal_entries(0, 0, &[("a", true, 400)]));
        log.extend(proposal_entries(1, 0, &[("a", true, 100), ("b", false, 100)]));
        log.push(entry(50, Event::BlocksAdvanced { n: 1 }));
        let m = compute_metrics(&log, 1_000);
        assert_eq!(m.proposals_count, 2);
        assert!((m.participation_mean - 0.3).abs() < 1e-12);
        assert!((m.participation_min - 0.2).abs() < 1e-12);
        assert!((m.participation_max - 0.4).abs() < 1e-12);
        assert!((m.participation_median - 0.3).abs() < 1e-12);
        assert_eq!(m.supermajority_rate, 0.5);
        assert_eq!(m.h_index, h_index(&[100.0, 50.0]));
    }
}
