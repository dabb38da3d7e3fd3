use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::CacheConfig;
use super::hierarchy::CacheHierarchy;
use super::report::TrafficReport;
use crate::error::{Error, Result};
use crate::kernels::{emit_stream, StreamBases, StreamKernelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Data set size over last-level capacity.
    pub ratio: f64,
    pub dataset_bytes: u64,
    /// Steady-state hit rate of the last level over the measured passes.
    pub l3_hit_rate: f64,
    /// Share of L1 misses served by any outer level. Equals `l3_hit_rate`
    /// when the inner levels keep nothing, and stays meaningful when the
    /// data set fits in them and the last level sees no references.
    pub outer_hit_rate: f64,
    /// Memory bytes per measured pass.
    pub mem_bytes_per_pass: f64,
}

fn outer_hit_rate(rep: &TrafficReport) -> f64 {
    match rep.levels.as_slice() {
        [] => 0.0,
        [only] => only.hit_rate(),
        [first, .., last] if first.misses > 0 => 1.0 - last.misses as f64 / first.misses as f64,
        _ => 1.0,
    }
}

/// Streams a data set of `ratio x last-level capacity` bytes `passes`
/// times through a fresh copy of `template` and reports the last-level
/// hit rate of every pass after the first. Ratios run in parallel; the
/// output keeps the input order.
pub fn hit_rate_curve(
    template: &[CacheConfig],
    pattern: StreamKernelKind,
    ratios: &[f64],
    passes: u32,
) -> Result<Vec<CurvePoint>> {
    if passes < 2 {
        return Err(Error::domain("hit-rate curve needs at least two passes (one warm-up)"));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::domain(format!("size ratio must be positive, got {r}")));
    }
    // validates the geometry once up front
    CacheHierarchy::new(template)?;
    let last = template.last().expect("validated non-empty");
    let capacity = last.capacity as f64;
    let line = u64::from(last.line_size);

    ratios
        .par_iter()
        .map(|&ratio| {
            let mut h = CacheHierarchy::new(template)?;
            let arrays = pattern.arrays() as u64;
            let bytes_per_array = ((ratio * capacity / arrays as f64 / line as f64).round() as u64).max(1) * line;
            let n = bytes_per_array / 8;
            let bases = StreamBases::packed(pattern, n);
            emit_stream(pattern, n, &bases, &mut h)?;
            let measured = h.measure(None, |h| {
                for _ in 1..passes {
                    // bases were validated by the warm-up pass
                    let _ = emit_stream(pattern, n, &bases, h);
                }
            });
            Ok(CurvePoint {
                ratio,
                dataset_bytes: bytes_per_array * arrays,
                l3_hit_rate: measured.l3_hit_rate(),
                outer_hit_rate: outer_hit_rate(&measured),
                mem_bytes_per_pass: measured.mem_bytes() as f64 / f64::from(passes - 1),
            })
        })
        .collect()
}
