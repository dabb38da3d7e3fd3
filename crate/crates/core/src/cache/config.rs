use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L1,
    L2,
    L3,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::L1 => "L1",
            Level::L2 => "L2",
            Level::L3 => "L3",
        })
    }
}

/// How a level relates to the levels closer to the core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inclusion {
    /// Filled on misses; evicting a line back-invalidates inner copies.
    #[default]
    Inclusive,
    /// Filled only by lines evicted from the next inner level; a hit moves
    /// the line inward and drops it here. Only valid for the last level.
    VictimNoninclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    TrueLru,
    TreePlru,
    /// New lines go into way 0 only; hits in way 0 promote into the
    /// tree-PLRU-managed remaining ways.
    StreamOneWay,
    /// Set dueling between [`PolicyKind::TreePlru`] and
    /// [`PolicyKind::StreamOneWay`].
    AdaptiveDueling,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::TrueLru,
        PolicyKind::TreePlru,
        PolicyKind::StreamOneWay,
        PolicyKind::AdaptiveDueling,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::TrueLru => "true-lru",
            PolicyKind::TreePlru => "tree-plru",
            PolicyKind::StreamOneWay => "stream-one-way",
            PolicyKind::AdaptiveDueling => "adaptive-dueling",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.as_str() == norm)
            .or(match norm.as_str() {
                "lru" => Some(PolicyKind::TrueLru),
                "plru" => Some(PolicyKind::TreePlru),
                "adaptive" => Some(PolicyKind::AdaptiveDueling),
                _ => None,
            })
            .ok_or_else(|| Error::Unknown {
                what: "replacement policy",
                name: s.to_string(),
            })
    }
}

/// Set-dueling parameters for [`PolicyKind::AdaptiveDueling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuelingConfig {
    /// Leader sets dedicated to each of the two candidate policies.
    pub leader_sets: u32,
    /// Width of the saturating policy-selection counter.
    pub psel_bits: u32,
}

impl Default for DuelingConfig {
    fn default() -> Self {
        DuelingConfig {
            leader_sets: 32,
            psel_bits: 10,
        }
    }
}

fn default_line_size() -> u32 {
    64
}

/// Geometry and behavior of one cache level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheConfig {
    pub level: Level,
    /// Bytes.
    pub capacity: u64,
    pub ways: u32,
    #[serde(default = "default_line_size")]
    pub line_size: u32,
    #[serde(default)]
    pub inclusion: Inclusion,
    pub policy: PolicyKind,
    /// Permit a set count that is not a power of two (modulo indexing).
    #[serde(default)]
    pub non_pow2_sets: bool,
    #[serde(default)]
    pub dueling: DuelingConfig,
}

impl CacheConfig {
    pub fn new(level: Level, capacity: u64, ways: u32, policy: PolicyKind) -> Self {
        CacheConfig {
            level,
            capacity,
            ways,
            line_size: 64,
            inclusion: Inclusion::Inclusive,
            policy,
            non_pow2_sets: false,
            dueling: DuelingConfig::default(),
        }
    }

    pub fn victim(mut self) -> Self {
        self.inclusion = Inclusion::VictimNoninclusive;
        self
    }

    pub fn allow_non_pow2(mut self) -> Self {
        self.non_pow2_sets = true;
        self
    }

    /// Same level with `sets` sets, keeping ways and line size.
    pub fn with_sets(mut self, sets: u64) -> Self {
        self.capacity = sets * u64::from(self.ways) * u64::from(self.line_size);
        self
    }

    pub fn sets(&self) -> u64 {
        let way_bytes = u64::from(self.ways) * u64::from(self.line_size);
        self.capacity.checked_div(way_bytes).unwrap_or(0)
    }

    pub fn lines(&self) -> u64 {
        self.sets() * u64::from(self.ways)
    }

    pub fn validate(&self) -> Result<()> {
        let name = self.level;
        if self.line_size == 0 || !self.line_size.is_power_of_two() {
            return Err(Error::Geometry(format!(
                "{name}: line size {} is not a power of two",
                self.line_size
            )));
        }
        if self.ways == 0 || self.ways > 64 {
            return Err(Error::Geometry(format!("{name}: ways must be in 1..=64, got {}", self.ways)));
        }
        let way_bytes = u64::from(self.ways) * u64::from(self.line_size);
        if self.capacity == 0 || !self.capacity.is_multiple_of(way_bytes) {
            return Err(Error::Geometry(format!(
                "{name}: capacity {} is not divisible by ways x line size ({way_bytes})",
                self.capacity
            )));
        }
        let sets = self.sets();
        if !sets.is_power_of_two() && !self.non_pow2_sets {
            return Err(Error::Geometry(format!(
                "{name}: {sets} sets is not a power of two (set non_pow2_sets to allow)"
            )));
        }
        if self.dueling.psel_bits == 0 || self.dueling.psel_bits > 31 {
            return Err(Error::Geometry(format!(
                "{name}: psel_bits must be in 1..=31, got {}",
                self.dueling.psel_bits
            )));
        }
        Ok(())
    }
}
