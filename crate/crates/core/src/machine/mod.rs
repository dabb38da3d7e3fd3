//! Machine descriptors and the analytic performance models built on them:
//! unit conversion, peak performance, the code-balance catalog, Roofline
//! predictions, the composite (time-weighted) HPCG model and parallel
//! efficiency of measured scaling series.
//!
//! Bandwidths are in GB/s with GB = 10^9 bytes, frequencies in GHz,
//! code balances in bytes per unit of work (row, iteration or nonzero).

mod balance;
mod presets;
mod roofline;

pub use balance::{code_balance, code_balance_with, crs_footprint, crs_footprint_with, CrsLayout, KernelKind};
pub use presets::{bdw, clx, preset, scale_caches, PRESET_NAMES};
pub use roofline::{
    hpcg_composite, hpcg_kernels, parallel_efficiency, roofline_perf, stream_corrected_bandwidth,
    CompositePrediction, EfficiencyReport, KernelModel, KernelShare, RooflinePrediction, ScalingSeries,
    PUBLISHED_DOT_BALANCE, STREAM_NT_BALANCE, STREAM_WA_BALANCE,
};

use serde::{Deserialize, Serialize};

use crate::cache::CacheConfig;
use crate::error::{Error, Result};

/// A named machine descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineModel {
    pub name: String,
    pub cores: u32,
    /// Core clock for the scenario being modeled.
    pub freq_ghz: f64,
    pub flops_per_cycle_per_core: f64,
    /// Saturated load-only memory bandwidth (b_s).
    pub bw_load_only: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bw_stream_triad_nt: Option<f64>,
    pub theoretical_mem_bw: f64,
    pub l1_bytes_per_cycle: f64,
    /// Per-core view of the cache hierarchy (informational for the models,
    /// used by the simulator front ends).
    #[serde(default)]
    pub cache_levels: Vec<CacheConfig>,
}

impl MachineModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("freq_ghz", self.freq_ghz),
            ("flops_per_cycle_per_core", self.flops_per_cycle_per_core),
            ("bw_load_only", self.bw_load_only),
            ("theoretical_mem_bw", self.theoretical_mem_bw),
            ("l1_bytes_per_cycle", self.l1_bytes_per_cycle),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{}: {field} must be positive, got {v}", self.name)));
            }
        }
        if let Some(bw) = self.bw_stream_triad_nt {
            if !(bw > 0.0) {
                return Err(Error::domain(format!("{}: bw_stream_triad_nt must be positive", self.name)));
            }
        }
        if self.cores == 0 {
            return Err(Error::domain(format!("{}: cores must be at least 1", self.name)));
        }
        if self.bw_load_only > self.theoretical_mem_bw {
            return Err(Error::domain(format!(
                "{}: load-only bandwidth {} exceeds theoretical {}",
                self.name, self.bw_load_only, self.theoretical_mem_bw
            )));
        }
        Ok(())
    }

    /// Theoretical single-core L1 bandwidth at `freq_ghz`.
    pub fn l1_bandwidth_gbs(&self) -> f64 {
        self.l1_bytes_per_cycle * self.freq_ghz
    }

    pub fn peak_gflops(&self) -> f64 {
        f64::from(self.cores) * self.freq_ghz * self.flops_per_cycle_per_core
    }
}

/// Converts a per-cycle bandwidth to GB/s at the given clock.
pub fn bandwidth_from_bytes_per_cycle(bytes_per_cycle: f64, freq_ghz: f64) -> Result<f64> {
    if !(bytes_per_cycle > 0.0) || !(freq_ghz > 0.0) {
        return Err(Error::domain(format!(
            "bandwidth conversion needs positive inputs, got {bytes_per_cycle} B/cy @ {freq_ghz} GHz"
        )));
    }
    Ok(bytes_per_cycle * freq_ghz)
}

/// Peak floating-point throughput in GF/s: cores x clock x flops per cycle.
pub fn peak_flops(cores: u32, freq_ghz: f64, flops_per_cycle: f64) -> Result<f64> {
    if cores == 0 || !(freq_ghz > 0.0) || !(flops_per_cycle > 0.0) {
        return Err(Error::domain(format!(
            "peak needs positive inputs, got {cores} cores, {freq_ghz} GHz, {flops_per_cycle} flops/cy"
        )));
    }
    Ok(f64::from(cores) * freq_ghz * flops_per_cycle)
}
