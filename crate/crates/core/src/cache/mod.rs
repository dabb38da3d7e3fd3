//! Trace-driven, set-associative multi-level cache simulator.
//!
//! Addresses are treated as physical. Lines are identified by
//! `addr / line_size`; all levels of a hierarchy share one line size.
//!
//! Load and store lookups walk L1 outward. On a full miss the line is
//! read from memory and installed in every non-victim level; a victim last
//! level is only filled with lines evicted from the level before it, and a
//! hit there moves the line inward and drops it from the victim level.
//! Evictions from an inclusive level back-invalidate inner copies. Dirty
//! lines reaching memory add one line to the written bytes.

mod config;
mod curve;
mod hierarchy;
mod level;
pub mod policy;
mod report;

pub use config::{CacheConfig, DuelingConfig, Inclusion, Level, PolicyKind};
pub use curve::{hit_rate_curve, CurvePoint};
pub use hierarchy::{Access, AccessKind, CacheHierarchy, Outcome, TraceSink, WC_BUFFERS};
pub use level::{CacheLevel, Evicted, LevelStats};
pub use report::{LevelReport, TrafficReport};

/// Builds a cold hierarchy from level configs ordered L1 first.
pub fn build_hierarchy(configs: &[CacheConfig]) -> crate::Result<CacheHierarchy> {
    CacheHierarchy::new(configs)
}
