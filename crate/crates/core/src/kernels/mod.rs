//! Reference kernels and the address streams they issue.
//!
//! Every kernel has an execute mode that computes on real data and a trace
//! mode that feeds the scalar access sequence of a straightforward
//! implementation into a [`TraceSink`](crate::cache::TraceSink).

mod crs;
mod mtx;
mod rcm;
mod spmv;
mod stencil;
mod stream;
mod trace;

pub use crs::{check_permutation, SparseMatrixCrs};
pub use mtx::{load_matrix_market, parse_matrix_market};
pub use rcm::{rcm_ordering, rcm_permute};
pub use spmv::{min_spmv_traffic, spmpv, spmpv_trace, spmv, spmv_into, spmv_trace, CrsAddrs, SpmpvAddrs};
pub(crate) use spmv::elem;
pub use stencil::{stencil27_matrix, Grid, STENCIL_DIAGONAL, STENCIL_OFF_DIAGONAL};
pub use stream::{emit_stream, gen_stream_trace, run_stream, StreamBases, StreamKernelKind};
pub use trace::{AccessCounter, AddressSpace, Trace, PAGE, RECORD_BYTES};
