use serde::Serialize;

use super::blas::{dot_trace, waxpby_in_place_trace};
use super::cg::HpcgKernel;
use super::mg::MgHierarchy;
use super::symgs::symgs_trace;
use crate::cache::{build_hierarchy, CacheConfig, TraceSink};
use crate::error::{Error, Result};
use crate::kernels::{elem, spmv_trace, AddressSpace, CrsAddrs};
use crate::machine::{code_balance, hpcg_composite, KernelKind, KernelModel, MachineModel};

/// Simulated memory traffic of one kernel, averaged over its calls in one
/// CG iteration.
#[derive(Debug, Clone, Serialize)]
pub struct KernelTraffic {
    pub kernel: HpcgKernel,
    pub calls: u32,
    pub bytes_per_row: f64,
    /// Flops per row of one call.
    pub flops_per_row: f64,
}

struct Layout {
    a: CrsAddrs,
    x: u64,
    r: u64,
    z: u64,
    p: u64,
    ap: u64,
    axf: u64,
    rc: u64,
    xc: u64,
}

impl Layout {
    fn new(mg: &MgHierarchy) -> Self {
        let fine = mg.finest();
        let n = fine.matrix.n_rows();
        let nc = fine.f2c.len().max(1);
        let mut space = AddressSpace::new();
        let a = CrsAddrs::alloc(&fine.matrix, &mut space);
        let mut v = |len| space.alloc_f64(len);
        Layout {
            x: v(n),
            r: v(n),
            z: v(n),
            p: v(n),
            ap: v(n),
            axf: v(n),
            rc: v(nc),
            xc: v(nc),
            a,
        }
    }
}

/// Finest-grid part of one V-cycle: zeroing, pre-smoothing, residual,
/// restriction reads, prolongation updates and post-smoothing. Work on
/// coarser grids is not emitted.
pub fn mg_finest_trace<S: TraceSink + ?Sized>(mg: &MgHierarchy, sink: &mut S) {
    let lay = Layout::new(mg);
    mg_finest(mg, &lay, sink);
}

fn mg_finest<S: TraceSink + ?Sized>(mg: &MgHierarchy, l: &Layout, sink: &mut S) {
    let fine = mg.finest();
    let m = &fine.matrix;
    for i in 0..m.n_rows() {
        sink.store(elem(l.z, i));
    }
    symgs_trace(m, &l.a, &fine.diag, l.r, l.z, sink);
    if fine.f2c.is_empty() {
        return;
    }
    spmv_trace(m, &l.a, l.z, l.axf, sink);
    for (c, &f) in fine.f2c.iter().enumerate() {
        sink.load(elem(l.r, f));
        sink.load(elem(l.axf, f));
        sink.store(elem(l.rc, c));
    }
    for (c, &f) in fine.f2c.iter().enumerate() {
        sink.load(elem(l.xc, c));
        sink.load(elem(l.z, f));
        sink.store(elem(l.z, f));
    }
    symgs_trace(m, &l.a, &fine.diag, l.r, l.z, sink);
}

/// Runs every kernel call of one CG iteration on the finest grid, each on
/// a cold copy of `caches`, and returns the memory traffic per row.
pub fn simulate_iteration_traffic(mg: &MgHierarchy, caches: &[CacheConfig]) -> Result<Vec<KernelTraffic>> {
    build_hierarchy(caches)?;
    let lay = Layout::new(mg);
    let m = &mg.finest().matrix;
    let n = m.n_rows();
    let nnz = m.nnz() as f64;
    let cold = |emit: &dyn Fn(&mut crate::cache::CacheHierarchy)| -> Result<f64> {
        let mut h = build_hierarchy(caches)?;
        let rep = h.measure(Some(n as u64), |h| emit(h));
        Ok(rep.mem_bytes() as f64 / n as f64)
    };
    let avg = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;

    let mg_bytes = cold(&|h| mg_finest(mg, &lay, h))?;
    let dots = vec![
        cold(&|h| dot_trace(n, lay.r, lay.z, h))?,
        cold(&|h| dot_trace(n, lay.p, lay.ap, h))?,
        cold(&|h| dot_trace(n, lay.r, lay.r, h))?,
    ];
    let waxpbys = vec![
        cold(&|h| waxpby_in_place_trace(n, lay.p, lay.z, h))?,
        cold(&|h| waxpby_in_place_trace(n, lay.x, lay.p, h))?,
        cold(&|h| waxpby_in_place_trace(n, lay.r, lay.ap, h))?,
    ];
    let spmv_bytes = cold(&|h| spmv_trace(m, &lay.a, lay.p, lay.ap, h))?;
    let nf = n as f64;
    Ok(vec![
        KernelTraffic {
            kernel: HpcgKernel::Dot,
            calls: 3,
            bytes_per_row: avg(dots),
            flops_per_row: 2.0,
        },
        KernelTraffic {
            kernel: HpcgKernel::Waxpby,
            calls: 3,
            bytes_per_row: avg(waxpbys),
            flops_per_row: 2.0,
        },
        KernelTraffic {
            kernel: HpcgKernel::Spmv,
            calls: 1,
            bytes_per_row: spmv_bytes,
            flops_per_row: 2.0 * nnz / nf,
        },
        KernelTraffic {
            kernel: HpcgKernel::Mg,
            calls: 1,
            bytes_per_row: mg_bytes,
            flops_per_row: mg.flops().finest / nf,
        },
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationRow {
    pub kernel: HpcgKernel,
    pub calls: u32,
    pub measured: f64,
    pub predicted: f64,
    /// `(measured - predicted) / predicted`.
    pub deviation: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub machine: String,
    pub nnzr: f64,
    pub threshold: f64,
    pub rows: Vec<ValidationRow>,
    /// Composite model with the analytic code balances.
    pub model_gflops: f64,
    /// Composite model with the simulated code balances.
    pub simulated_gflops: f64,
}

impl ValidationReport {
    pub fn row(&self, k: HpcgKernel) -> Option<&ValidationRow> {
        self.rows.iter().find(|r| r.kernel == k)
    }

    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }
}

fn predicted_balance(k: HpcgKernel, nnzr: f64) -> Result<f64> {
    let kind = match k {
        HpcgKernel::Dot => KernelKind::DotHpcgAvg,
        HpcgKernel::Waxpby => KernelKind::Waxpby,
        HpcgKernel::Spmv => KernelKind::Spmv { nnzr },
        HpcgKernel::Mg => KernelKind::MgFinest { nnzr },
        HpcgKernel::Symgs => KernelKind::SymgsSweep { nnzr },
    };
    code_balance(kind)
}

/// Compares simulated code balances against the analytic ones for a
/// problem with `nnzr` nonzeros per row and flags relative deviations
/// above `threshold`.
pub fn validate_against_model(
    measured: &[KernelTraffic],
    machine: &MachineModel,
    nnzr: f64,
    threshold: f64,
) -> Result<ValidationReport> {
    if !(threshold > 0.0) {
        return Err(Error::domain(format!("threshold must be > 0, got {threshold}")));
    }
    let mut rows = Vec::with_capacity(measured.len());
    let mut model = Vec::with_capacity(measured.len());
    let mut simulated = Vec::with_capacity(measured.len());
    for t in measured {
        let predicted = predicted_balance(t.kernel, nnzr)?;
        let deviation = (t.bytes_per_row - predicted) / predicted;
        rows.push(ValidationRow {
            kernel: t.kernel,
            calls: t.calls,
            measured: t.bytes_per_row,
            predicted,
            deviation,
            flagged: deviation.abs() > threshold,
        });
        model.push(KernelModel::new(t.kernel.as_str(), predicted, t.flops_per_row, t.calls)?);
        simulated.push(KernelModel::new(t.kernel.as_str(), t.bytes_per_row, t.flops_per_row, t.calls)?);
    }
    Ok(ValidationReport {
        machine: machine.name.clone(),
        nnzr,
        threshold,
        rows,
        model_gflops: hpcg_composite(&model, machine, 1)?.perf_gflops,
        simulated_gflops: hpcg_composite(&simulated, machine, 1)?.perf_gflops,
    })
}

/// Cache shrink factor (as a power of two) that keeps the ratio of
/// working set to cache of an `n_rows` problem equal to that of a
/// 160^3 grid on unscaled caches.
pub fn desk_scale_shift(n_rows: usize) -> u32 {
    let full = 160f64.powi(3);
    let r = (full / n_rows.max(1) as f64).log2().round();
    if r > 0.0 {
        r as u32
    } else {
        0
    }
}
