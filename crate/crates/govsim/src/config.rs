//! Scenario configuration schema.
//!
//! Configs are accepted in two forms: human-editable TOML and canonical
//! JSON. The fully-resolved config (defaults filled in) serializes to the
//! canonical JSON form, whose SHA-256 is recorded in the run manifest.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain::GasGenerator;
use crate::types::*;

pub const SCENARIO_KINDS: [&str; 6] = [
    "accidental_delegation",
    "beanstalk_flashloan",
    "humpy_gauge",
    "meta_governance",
    "negative_interest",
    "snapshot_proposer",
];

pub fn scenario_description(kind: &str) -> &'static str {
    match kind {
        "accidental_delegation" => "internal transfer lands on a self-delegated wallet, silently shifting voting power",
        "beanstalk_flashloan" => "flash-borrowed governance majority attempts propose+vote+execute in one transaction",
        "humpy_gauge" => "vote-escrow whale directs gauge emissions to its own high-fee pool",
        "meta_governance" => "index token pass-through votes its own listing onto a host platform",
        "negative_interest" => "reward emissions make borrowing the governance token net-negative interest",
        "snapshot_proposer" => "buy tokens just before proposing, vote the proposal through, dump right after",
        _ => "unknown scenario",
    }
}

fn default_seed() -> u64 {
    0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSection {
    pub kind: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainSection {
    pub block_interval: u64,
    #[serde(with = "crate::types::u64_units")]
    pub per_call_gas_unit: Units,
    pub gas: GasGenerator,
}

impl Default for ChainSection {
    fn default() -> Self {
        ChainSection {
            block_interval: 12,
            per_call_gas_unit: 1,
            gas: GasGenerator::Constant { price: 30 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BeanstalkConfig {
    /// Emergency-commit path enabled (no voting delay, no timelock).
    pub instant_execution: bool,
    #[serde(with = "crate::types::u64_units")]
    pub supply: Units,
    /// Flash pool reserve as a fraction of supply.
    pub pool_liquidity_fraction: f64,
    pub quorum_fraction: f64,
    #[serde(with = "crate::types::u64_units")]
    pub collateral_value: Units,
    pub flash_fee_bps: u32,
    /// Attacker's own pre-held tokens (covers the flash fee).
    #[serde(with = "crate::types::u64_units")]
    pub attacker_initial: Units,
}

impl Default for BeanstalkConfig {
    fn default() -> Self {
        BeanstalkConfig {
            instant_execution: false,
            supply: 100_000_000,
            pool_liquidity_fraction: 0.67,
            quorum_fraction: 0.50,
            collateral_value: 182_000_000,
            flash_fee_bps: 9,
            attacker_initial: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommunityResponse {
    None,
    /// Kill the attacker's gauge; `epoch` is the first distribution the
    /// kill affects.
    KillGauge { epoch: u32 },
    /// Grant the attacker a fixed share of all subsequent emissions and
    /// decommission its gauge; `epoch` is the first affected distribution.
    PeaceTreaty { fraction_bps: u32, epoch: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HumpyConfig {
    pub attacker_ve_fraction: f64,
    pub n_attacker_addresses: u32,
    /// Total tokens locked into escrow across all parties.
    #[serde(with = "crate::types::u64_units")]
    pub total_locked: Units,
    pub pool_fee_bps: u32,
    pub protocol_fee_share_bps: u32,
    #[serde(with = "crate::types::u64_units")]
    pub tokens_per_epoch: Units,
    pub epochs: u32,
    #[serde(with = "crate::types::u64_units")]
    pub volume_per_epoch: Units,
    pub community_response: CommunityResponse,
}

impl Default for HumpyConfig {
    fn default() -> Self {
        HumpyConfig {
            attacker_ve_fraction: 0.35,
            n_attacker_addresses: 4,
            total_locked: 1_040_000,
            pool_fee_bps: 1_000,
            protocol_fee_share_bps: 10_000,
            tokens_per_epoch: 514_286,
            epochs: 10,
            volume_per_epoch: 17_000,
            community_response: CommunityResponse::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SnapshotProposerConfig {
    pub target_platform_preset: String,
    #[serde(with = "crate::types::u64_units")]
    pub supply: Units,
    #[serde(with = "crate::types::u64_units")]
    pub attacker_weight: Units,
    #[serde(with = "crate::types::u64_units")]
    pub other_for_votes: Units,
    /// Blocks between acquiring tokens and proposing.
    pub acquire_block_offset: u64,
    /// Blocks after execution at which the attacker dumps; negative means
    /// the dump happens that many blocks after queueing, before execution.
    pub dump_block_offset: i64,
    pub listed_symbol: String,
}

impl Default for SnapshotProposerConfig {
    fn default() -> Self {
        SnapshotProposerConfig {
            target_platform_preset: "aave_short".into(),
            supply: 14_000_000,
            attacker_weight: 230_900,
            other_for_votes: 256_800,
            acquire_block_offset: 1,
            dump_block_offset: 1,
            listed_symbol: "UST".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NegativeInterestConfig {
    #[serde(with = "crate::types::u64_units")]
    pub supply: Units,
    #[serde(with = "crate::types::u64_units")]
    pub borrow_amount: Units,
    pub interest_bps_per_epoch: u32,
    pub reward_bps_per_epoch: u32,
    pub epochs: u32,
}

impl Default for NegativeInterestConfig {
    fn default() -> Self {
        NegativeInterestConfig {
            supply: 10_000_000,
            borrow_amount: 1_000_000,
            interest_bps_per_epoch: 10,
            reward_bps_per_epoch: 25,
            epochs: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetaGovernanceConfig {
    pub host_preset: String,
    #[serde(with = "crate::types::u64_units")]
    pub supply: Units,
    pub index_holdings_fraction: f64,
    /// Internal index-member tally deciding how the whole block votes.
    pub member_for_weight: u64,
    pub member_against_weight: u64,
    pub listed_symbol: String,
}

impl Default for MetaGovernanceConfig {
    fn default() -> Self {
        MetaGovernanceConfig {
            host_preset: "compound".into(),
            supply: 10_000_000,
            index_holdings_fraction: 0.45,
            member_for_weight: 60,
            member_against_weight: 40,
            listed_symbol: "DPI".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AccidentalDelegationConfig {
    #[serde(with = "crate::types::u64_units")]
    pub supply: Units,
    #[serde(with = "crate::types::u64_units")]
    pub transfer_amount: Units,
    pub recipient_has_standing_self_delegation: bool,
    /// Competing delegate powers, used for the power ranking.
    pub other_delegates: Vec<(String, u64)>,
}

impl Default for AccidentalDelegationConfig {
    fn default() -> Self {
        AccidentalDelegationConfig {
            supply: 1_000_000_000,
            transfer_amount: 13_000_000,
            recipient_has_standing_self_delegation: true,
            other_delegates: vec![("delegate-a".into(), 9_000_000), ("delegate-b".into(), 5_000_000)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub chain: ChainSection,
    #[serde(default)]
    pub beanstalk: BeanstalkConfig,
    #[serde(default)]
    pub humpy: HumpyConfig,
    #[serde(default)]
    pub snapshot_proposer: SnapshotProposerConfig,
    #[serde(default)]
    pub negative_interest: NegativeInterestConfig,
    #[serde(default)]
    pub meta_governance: MetaGovernanceConfig,
    #[serde(default)]
    pub accidental_delegation: AccidentalDelegationConfig,
}

impl ScenarioConfig {
    pub fn with_kind(kind: &str) -> Self {
        ScenarioConfig {
            scenario: ScenarioSection { kind: kind.into(), seed: 0 },
            chain: ChainSection::default(),
            beanstalk: BeanstalkConfig::default(),
            humpy: HumpyConfig::default(),
            snapshot_proposer: SnapshotProposerConfig::default(),
            negative_interest: NegativeInterestConfig::default(),
            meta_governance: MetaGovernanceConfig::default(),
            accidental_delegation: AccidentalDelegationConfig::default(),
        }
    }

    pub fn validate(&self) -> SimResult<()> {
        if !SCENARIO_KINDS.contains(&self.scenario.kind.as_str()) {
            return Err(SimError::Unknown { kind: "scenario", name: self.scenario.kind.clone() });
        }
        let frac_ok = |f: f64| (0.0..=1.0).contains(&f);
        if !frac_ok(self.beanstalk.pool_liquidity_fraction)
            || !frac_ok(self.beanstalk.quorum_fraction)
        {
            return Err(SimError::Config("beanstalk fractions must lie in [0, 1]".into()));
        }
        if !frac_ok(self.humpy.attacker_ve_fraction) {
            return Err(SimError::Config("humpy.attacker_ve_fraction must lie in [0, 1]".into()));
        }
        if self.humpy.n_attacker_addresses == 0 {
            return Err(SimError::Config("humpy.n_attacker_addresses must be positive".into()));
        }
        if !frac_ok(self.meta_governance.index_holdings_fraction) {
            return Err(SimError::Config("meta_governance.index_holdings_fraction must lie in [0, 1]".into()));
        }
        if self.chain.block_interval == 0 {
            return Err(SimError::Config("chain.block_interval must be positive".into()));
        }
        Ok(())
    }

    /// Canonical machine form: JSON of the fully-resolved config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn canonical_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        hex::encode(digest)
    }

    /// Parse TOML or JSON, keyed on which parser accepts the text.
    pub fn parse(text: &str) -> SimResult<Self> {
        if let Ok(cfg) = serde_json::from_str::<ScenarioConfig>(text) {
            return Ok(cfg);
        }
        toml::from_str(text).map_err(|e| SimError::Config(format!("config parse error: {e}")))
    }
}

/// Helper for converting config fractions to basis points without float
/// drift on representable values.
pub fn fraction_to_bps(f: f64) -> u32 {
    (f * 10_000.0).round() as u32
}
