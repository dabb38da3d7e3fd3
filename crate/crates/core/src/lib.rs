//! Roofline and cache-simulation toolkit for memory-bound sparse kernels.
//!
//! * [`machine`]: machine descriptors, code balances, Roofline and the
//!   composite HPCG model.
//! * [`cache`]: a trace-driven multi-level cache simulator.
//! * [`kernels`]: STREAM, SpMV and SpMPV kernels with execute and trace
//!   modes, CRS storage, Matrix Market input and RCM reordering.
//! * [`hpcg`]: a small HPCG (symGS, multigrid, CG) with flop accounting.
//! * [`config`]: TOML machine and kernel descriptions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod config;
mod error;
pub mod hpcg;
pub mod kernels;
pub mod machine;

pub use cache::{
    build_hierarchy, hit_rate_curve, Access, AccessKind, CacheConfig, CacheHierarchy, CurvePoint, Inclusion, Level,
    PolicyKind, TraceSink, TrafficReport,
};
pub use error::{Error, Result};
pub use kernels::{SparseMatrixCrs, StreamKernelKind, Trace};
pub use machine::{code_balance, hpcg_composite, roofline_perf, KernelKind, KernelModel, MachineModel};
