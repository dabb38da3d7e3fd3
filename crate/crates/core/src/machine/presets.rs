use super::MachineModel;
use crate::cache::{CacheConfig, Level, PolicyKind};
use crate::error::{Error, Result};

const KIB: u64 = 1024;
const MIB: u64 = 1024 * 1024;

pub const PRESET_NAMES: [&str; 2] = ["bdw", "clx"];

/// Xeon E5-2697 v4 (Broadwell-EP), one socket. Clock is the 2.0 GHz AVX
/// base used for single-core measurements. Caches: per-core L1/L2 and the
/// full inclusive 20-way L3.
pub fn bdw() -> MachineModel {
    MachineModel {
        name: "bdw".into(),
        cores: 18,
        freq_ghz: 2.0,
        flops_per_cycle_per_core: 16.0,
        bw_load_only: 68.0,
        bw_stream_triad_nt: None,
        theoretical_mem_bw: 76.8,
        l1_bytes_per_cycle: 64.0,
        cache_levels: vec![
            CacheConfig::new(Level::L1, 32 * KIB, 8, PolicyKind::TreePlru),
            CacheConfig::new(Level::L2, 256 * KIB, 8, PolicyKind::TreePlru),
            CacheConfig::new(Level::L3, 45 * MIB, 20, PolicyKind::TreePlru).allow_non_pow2(),
        ],
    }
}

/// Xeon Gold 6248 (Cascade Lake-SP), one socket, at the 1.6 GHz AVX-512
/// base clock. The 20 L3 slices are modeled as one 11-way non-inclusive
/// victim cache with adaptive replacement.
pub fn clx() -> MachineModel {
    MachineModel {
        name: "clx".into(),
        cores: 20,
        freq_ghz: 1.6,
        flops_per_cycle_per_core: 32.0,
        bw_load_only: 115.0,
        bw_stream_triad_nt: None,
        theoretical_mem_bw: 140.8,
        l1_bytes_per_cycle: 128.0,
        cache_levels: vec![
            CacheConfig::new(Level::L1, 32 * KIB, 8, PolicyKind::TreePlru),
            CacheConfig::new(Level::L2, MIB, 16, PolicyKind::TreePlru),
            CacheConfig::new(Level::L3, 55 * MIB / 2, 11, PolicyKind::AdaptiveDueling)
                .allow_non_pow2()
                .victim(),
        ],
    }
}

pub fn preset(name: &str) -> Result<MachineModel> {
    match name.to_ascii_lowercase().as_str() {
        "bdw" | "broadwell" => Ok(bdw()),
        "clx" | "cascadelake" | "cascade-lake" => Ok(clx()),
        _ => Err(Error::Unknown {
            what: "machine preset",
            name: name.to_string(),
        }),
    }
}

impl MachineModel {
    /// The hierarchy one core sees when all cores share the last level
    /// evenly: private levels unchanged, last level divided by `cores`.
    pub fn per_core_caches(&self) -> Vec<CacheConfig> {
        let mut levels = self.cache_levels.clone();
        if let Some(last) = levels.last_mut() {
            let sets = last.sets() / u64::from(self.cores);
            *last = last.clone().with_sets(sets.max(1));
        }
        levels
    }
}

/// Shrinks every level by `2^shift` sets (at least one set), keeping
/// associativity and policies.
pub fn scale_caches(levels: &[CacheConfig], shift: u32) -> Vec<CacheConfig> {
    levels
        .iter()
        .map(|c| c.clone().with_sets((c.sets() >> shift).max(1)))
        .collect()
}
