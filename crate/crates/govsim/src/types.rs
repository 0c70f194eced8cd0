//! Shared identifiers and the simulator error type.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Smallest-denomination token amount. All token math is exact integer
/// arithmetic; fees use basis points with floor rounding.
pub type Units = u128;

/// Block index. The chain clock is a plain counter; wall time is derived as
/// `genesis_time + height * block_interval`.
pub type BlockHeight = u64;

/// Seconds since genesis.
pub type Timestamp = u64;

/// Serde adapter for `Units` fields that must round-trip through formats
/// without native 128-bit integers (TOML). Values beyond `u64::MAX` fail
/// to serialize rather than silently truncating.
pub mod u64_units {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        let small: u64 =
            (*v).try_into().map_err(|_| serde::ser::Error::custom("value exceeds u64 range"))?;
        s.serialize_u64(small)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        Ok(u64::deserialize(d)? as u128)
    }
}

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

string_id!(
    /// An externally-owned or contract account. Contracts hold balances like
    /// any other account, so contract ids convert freely into account ids.
    AccountId
);
string_id!(
    /// A registered contract (implementation or proxy) in the registry.
    ContractId
);
string_id!(
    /// A token ledger name (e.g. the governance token or a collateral token).
    TokenId
);
string_id!(
    /// A flashloan pool.
    PoolId
);
string_id!(
    /// An emission gauge.
    GaugeId
);
string_id!(
    /// A liquidity pool tracked by the escrow subsystem.
    LiquidityPoolId
);

impl From<&ContractId> for AccountId {
    fn from(c: &ContractId) -> Self {
        AccountId(c.0.clone())
    }
}

impl From<ContractId> for AccountId {
    fn from(c: ContractId) -> Self {
        AccountId(c.0)
    }
}

pub type ProposalId = u64;
pub type LockId = u64;

/// The two balance-derived power streams. Voting power decides votes,
/// proposition power gates proposal creation. Platforms without the split
/// read the voting stream for both purposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PowerKind {
    Voting,
    Proposition,
}

impl PowerKind {
    pub const ALL: [PowerKind; 2] = [PowerKind::Voting, PowerKind::Proposition];

    pub fn index(self) -> usize {
        match self {
            PowerKind::Voting => 0,
            PowerKind::Proposition => 1,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    /// A failed on-chain call. Inside an atomic transaction this rolls the
    /// whole transaction back; it is a normal outcome, not a fault.
    #[error("reverted: {0}")]
    Revert(String),
    /// Caller violated an operation precondition (harness-level misuse).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Bad scenario configuration.
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },
}

use thiserror::Error;

impl SimError {
    pub fn revert(msg: impl Into<String>) -> Self {
        SimError::Revert(msg.into())
    }

    pub fn is_revert(&self) -> bool {
        matches!(self, SimError::Revert(_))
    }
}

pub type SimResult<T> = Result<T, SimError>;
