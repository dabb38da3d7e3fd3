use serde::{Deserialize, Serialize};

use super::balance::{code_balance, KernelKind};
use super::MachineModel;
use crate::error::{Error, Result};

/// DOT code balance as tabulated for the HPCG model (bytes/row). The exact
/// average `40/3` rounds to 13.33; the tabulated Roofline predictions were
/// computed from 13.30.
pub const PUBLISHED_DOT_BALANCE: f64 = 13.30;

/// STREAM triad bytes per iteration with non-temporal stores.
pub const STREAM_NT_BALANCE: f64 = 24.0;
/// STREAM triad bytes per iteration when the store target is write-allocated.
pub const STREAM_WA_BALANCE: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    pub name: String,
    /// Bytes per row (or per iteration for BLAS-1 and stream kernels).
    pub code_balance: f64,
    pub flops_per_row: f64,
    #[serde(default = "one")]
    pub calls: u32,
}

fn one() -> u32 {
    1
}

impl KernelModel {
    pub fn new(name: impl Into<String>, code_balance: f64, flops_per_row: f64, calls: u32) -> Result<Self> {
        let k = KernelModel {
            name: name.into(),
            code_balance,
            flops_per_row,
            calls,
        };
        k.validate()?;
        Ok(k)
    }

    /// Catalog kernel with its minimum code balance.
    pub fn from_kind(kind: KernelKind, flops_per_row: f64, calls: u32) -> Result<Self> {
        Self::new(kind.name(), code_balance(kind)?, flops_per_row, calls)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.code_balance > 0.0) || !self.code_balance.is_finite() {
            return Err(Error::domain(format!(
                "kernel `{}`: code balance must be positive, got {}",
                self.name, self.code_balance
            )));
        }
        if !(self.flops_per_row >= 0.0) {
            return Err(Error::domain(format!(
                "kernel `{}`: flops per row must be non-negative",
                self.name
            )));
        }
        if self.calls == 0 {
            return Err(Error::domain(format!("kernel `{}`: calls must be >= 1", self.name)));
        }
        Ok(())
    }
}

/// The four HPCG kernels (DOT, WAXPBY, SpMV, finest-grid MG) with their
/// per-iteration call counts. `dot_balance` is usually 40/3 or
/// [`PUBLISHED_DOT_BALANCE`].
pub fn hpcg_kernels(nnzr: f64, dot_balance: f64) -> Result<Vec<KernelModel>> {
    Ok(vec![
        KernelModel::new("dot", dot_balance, 2.0, 3)?,
        KernelModel::from_kind(KernelKind::Waxpby, 2.0, 3)?,
        KernelModel::from_kind(KernelKind::Spmv { nnzr }, 2.0 * nnzr, 1)?,
        KernelModel::from_kind(KernelKind::MgFinest { nnzr }, 10.0 * nnzr, 1)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RooflinePrediction {
    pub kernel: String,
    pub code_balance: f64,
    pub perf_gflops: f64,
    /// Memory time per row in nanoseconds (bytes / (GB/s)).
    pub time_per_row_ns: f64,
}

/// Memory-bound Roofline limit `P = F * b_s / C`.
pub fn roofline_perf(model: &KernelModel, machine: &MachineModel) -> Result<RooflinePrediction> {
    model.validate()?;
    let bs = machine.bw_load_only;
    if !(bs > 0.0) {
        return Err(Error::domain(format!("{}: load-only bandwidth must be positive", machine.name)));
    }
    Ok(RooflinePrediction {
        kernel: model.name.clone(),
        code_balance: model.code_balance,
        perf_gflops: model.flops_per_row * bs / model.code_balance,
        time_per_row_ns: model.code_balance / bs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelShare {
    pub kernel: String,
    pub code_balance: f64,
    pub perf_gflops: f64,
    pub calls: u32,
    /// Seconds spent in all calls of this kernel.
    pub time: f64,
    pub time_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositePrediction {
    pub machine: String,
    pub n_rows: u64,
    /// Seconds.
    pub total_time: f64,
    pub total_flops: f64,
    pub perf_gflops: f64,
    pub breakdown: Vec<KernelShare>,
}

impl CompositePrediction {
    /// `kernel,code_balance,perf_gflops,time_share` plus one row per kernel.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kernel,code_balance,perf_gflops,time_share\n");
        for k in &self.breakdown {
            out.push_str(&format!(
                "{},{:.2},{:.2},{:.4}\n",
                k.kernel, k.code_balance, k.perf_gflops, k.time_share
            ));
        }
        out
    }
}

/// Combines kernel runtimes weighted by their call counts:
/// `T = sum I_x * F_x * N_r / P_x`, performance = total flops / T.
///
/// Everything is accumulated per row and scaled by `n_rows` only at the
/// end, so `perf_gflops` does not depend on `n_rows` at all.
pub fn hpcg_composite(kernels: &[KernelModel], machine: &MachineModel, n_rows: u64) -> Result<CompositePrediction> {
    if kernels.is_empty() {
        return Err(Error::domain("composite prediction needs at least one kernel"));
    }
    let preds = kernels
        .iter()
        .map(|k| roofline_perf(k, machine))
        .collect::<Result<Vec<_>>>()?;

    // ns per row and flops per row, summed over calls
    let times: Vec<f64> = kernels
        .iter()
        .zip(&preds)
        .map(|(k, p)| f64::from(k.calls) * p.time_per_row_ns)
        .collect();
    let row_time_ns: f64 = times.iter().sum();
    let row_flops: f64 = kernels.iter().map(|k| f64::from(k.calls) * k.flops_per_row).sum();
    let rows = n_rows as f64;

    let breakdown = kernels
        .iter()
        .zip(&preds)
        .zip(&times)
        .map(|((k, p), t)| KernelShare {
            kernel: k.name.clone(),
            code_balance: k.code_balance,
            perf_gflops: p.perf_gflops,
            calls: k.calls,
            time: t * rows * 1e-9,
            time_share: t / row_time_ns,
        })
        .collect();

    Ok(CompositePrediction {
        machine: machine.name.clone(),
        n_rows,
        total_time: row_time_ns * rows * 1e-9,
        total_flops: row_flops * rows,
        perf_gflops: row_flops / row_time_ns,
        breakdown,
    })
}

/// Memory-interface bandwidth behind a STREAM-reported triad number. The
/// benchmark assumes 24 B/iteration; without non-temporal stores the
/// interface really moves 32.
pub fn stream_corrected_bandwidth(reported_gbs: f64, nt_used: bool) -> Result<f64> {
    if !(reported_gbs > 0.0) {
        return Err(Error::domain(format!("reported bandwidth must be positive, got {reported_gbs}")));
    }
    Ok(if nt_used {
        reported_gbs
    } else {
        reported_gbs * STREAM_WA_BALANCE / STREAM_NT_BALANCE
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    points: Vec<(u32, f64)>,
}

impl ScalingSeries {
    pub fn new(points: Vec<(u32, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::domain("scaling series core counts must be strictly increasing"));
        }
        if let Some(&(_, v)) = points.iter().find(|(_, v)| !(*v >= 0.0)) {
            return Err(Error::domain(format!("scaling series value {v} is negative")));
        }
        if points.iter().any(|&(c, _)| c == 0) {
            return Err(Error::domain("scaling series core counts must be positive"));
        }
        Ok(ScalingSeries { points })
    }

    pub fn points(&self) -> &[(u32, f64)] {
        &self.points
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub cores: u32,
    pub efficiency: f64,
    /// Efficiency at every point of the series.
    pub per_point: Vec<(u32, f64)>,
}

/// `eps(n) = value(n) / (n * value(1))`, reported at the largest core count.
pub fn parallel_efficiency(series: &ScalingSeries) -> Result<EfficiencyReport> {
    let base = series
        .points
        .iter()
        .find(|(c, _)| *c == 1)
        .map(|&(_, v)| v)
        .ok_or_else(|| Error::domain("scaling series has no single-core point"))?;
    if !(base > 0.0) {
        return Err(Error::domain("single-core value must be positive"));
    }
    let per_point: Vec<(u32, f64)> = series
        .points
        .iter()
        .map(|&(c, v)| (c, v / (f64::from(c) * base)))
        .collect();
    let &(cores, efficiency) = per_point.last().expect("series contains the 1-core point");
    Ok(EfficiencyReport {
        cores,
        efficiency,
        per_point,
    })
}
