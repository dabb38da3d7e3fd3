use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use roofsim_core::cache::{build_hierarchy, PolicyKind};
use roofsim_core::kernels::{load_matrix_market, min_spmv_traffic, rcm_permute, spmpv_trace, AddressSpace, SpmpvAddrs};
use roofsim_core::machine::scale_caches;

use super::machine;
use crate::error::CliError;
use crate::output::{csv, table, Output};

#[derive(Debug, Args)]
pub struct SpmvTrafficArgs {
    /// MatrixMarket file.
    #[arg(required_unless_present = "bound_only")]
    matrix: Option<PathBuf>,
    /// Reorder with reverse Cuthill-McKee before simulating.
    #[arg(long)]
    rcm: bool,
    /// Chained SpMVs per run (y_i = A y_{i-1}).
    #[arg(long, default_value_t = 4)]
    power: usize,
    /// Machine whose per-core cache hierarchy is simulated.
    #[arg(long, default_value = "clx")]
    machine: String,
    /// Shrink every cache level by 2^scale sets.
    #[arg(long, default_value_t = 0)]
    scale: u32,
    /// Replacement policy of the last level (default: the machine's).
    #[arg(long)]
    policy: Option<String>,
    /// Only print the minimum-traffic bound for --nnzr.
    #[arg(long, requires = "nnzr")]
    bound_only: bool,
    /// Nonzeros per row for --bound-only.
    #[arg(long)]
    nnzr: Option<f64>,
}

#[derive(Debug, Serialize)]
struct TrafficRow {
    matrix: String,
    rcm: bool,
    n_rows: usize,
    nnz: usize,
    nnzr: f64,
    bandwidth: usize,
    power: usize,
    bytes_per_nnz: f64,
    bound_bytes_per_nnz: f64,
    ratio_to_bound: f64,
}

#[derive(Debug, Serialize)]
struct Bound {
    nnzr: f64,
    bound_bytes_per_nnz: f64,
}

pub fn run(a: SpmvTrafficArgs, out: &Output) -> Result<(), CliError> {
    if a.bound_only {
        let nnzr = a.nnzr.expect("required by clap");
        let b = Bound {
            nnzr,
            bound_bytes_per_nnz: min_spmv_traffic(nnzr)?,
        };
        return out.emit(
            &b,
            || format!("nnzr {}: minimum traffic {:.3} B/nnz", b.nnzr, b.bound_bytes_per_nnz),
            || csv("nnzr,bound_bytes_per_nnz", [format!("{},{:.6}", b.nnzr, b.bound_bytes_per_nnz)]),
        );
    }
    if a.power == 0 {
        return Err(CliError::Usage("--power must be at least 1".into()));
    }
    let path = a.matrix.as_ref().expect("required by clap");
    let mut caches = scale_caches(&machine(&a.machine)?.per_core_caches(), a.scale);
    if let (Some(p), Some(last)) = (&a.policy, caches.last_mut()) {
        last.policy = p.parse::<PolicyKind>()?;
    }
    let mut m = load_matrix_market(path)?;
    if !m.is_square() {
        return Err(CliError::Data(format!(
            "{}: matrix powers need a square matrix, got {}x{}",
            path.display(),
            m.n_rows(),
            m.n_cols()
        )));
    }
    if a.rcm {
        m = rcm_permute(&m)?.0;
    }
    let mut space = AddressSpace::new();
    let addrs = SpmpvAddrs::alloc(&m, a.power, &mut space);
    let mut h = build_hierarchy(&caches)?;
    let rep = h.measure(None, |h| spmpv_trace(&m, &addrs, h));
    let per_nnz = rep.mem_bytes() as f64 / (a.power as f64 * m.nnz().max(1) as f64);
    let bound = min_spmv_traffic(m.nnzr())?;
    let row = TrafficRow {
        matrix: path.display().to_string(),
        rcm: a.rcm,
        n_rows: m.n_rows(),
        nnz: m.nnz(),
        nnzr: m.nnzr(),
        bandwidth: m.bandwidth(),
        power: a.power,
        bytes_per_nnz: per_nnz,
        bound_bytes_per_nnz: bound,
        ratio_to_bound: per_nnz / bound,
    };
    out.emit(
        &row,
        || {
            table(
                &["matrix", "rows", "nnz", "nnzr", "bandwidth", "B/nnz", "bound", "ratio"],
                &[vec![
                    row.matrix.clone(),
                    row.n_rows.to_string(),
                    row.nnz.to_string(),
                    format!("{:.2}", row.nnzr),
                    row.bandwidth.to_string(),
                    format!("{:.3}", row.bytes_per_nnz),
                    format!("{:.3}", row.bound_bytes_per_nnz),
                    format!("{:.3}", row.ratio_to_bound),
                ]],
            )
        },
        || {
            csv(
                "matrix,rcm,n_rows,nnz,nnzr,bandwidth,power,bytes_per_nnz,bound_bytes_per_nnz,ratio_to_bound",
                [format!(
                    "{},{},{},{},{:.6},{},{},{:.6},{:.6},{:.6}",
                    row.matrix,
                    row.rcm,
                    row.n_rows,
                    row.nnz,
                    row.nnzr,
                    row.bandwidth,
                    row.power,
                    row.bytes_per_nnz,
                    row.bound_bytes_per_nnz,
                    row.ratio_to_bound
                )],
            )
        },
    )
}
