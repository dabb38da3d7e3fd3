//! A small HPCG: 27-point stencil problem, symmetric Gauss-Seidel smoother,
//! geometric multigrid V-cycle and preconditioned CG, with call and flop
//! accounting and a cache-simulated check of the code-balance model.

mod blas;
mod cg;
mod mg;
mod symgs;
mod validate;

pub use blas::{dot, dot_trace, waxpby, waxpby_in_place, waxpby_in_place_trace, waxpby_into};
pub use cg::{cg_solve, CgOptions, CgResult, HpcgKernel, KernelAccounting, LoggedCall, Preconditioner, Tally};
pub use mg::{MgFlops, MgHierarchy, MgLevel};
pub use symgs::{diagonal_positions, symgs, symgs_trace};
pub use validate::{
    desk_scale_shift, mg_finest_trace, simulate_iteration_traffic, validate_against_model, KernelTraffic,
    ValidationReport, ValidationRow,
};
