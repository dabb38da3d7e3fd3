use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use roofsim_core::config::load_kernels;
use roofsim_core::machine::{bdw, clx, hpcg_kernels, PUBLISHED_DOT_BALANCE};
use roofsim_core::{code_balance, hpcg_composite, roofline_perf, KernelKind, KernelModel, MachineModel};

use super::machine;
use crate::error::CliError;
use crate::output::{csv, table, Output};

const DEFAULT_ROWS: u64 = 160 * 160 * 160;

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Preset name (bdw, clx), machine TOML file, or a name found in
    /// $ROOFSIM_PRESET_DIR.
    #[arg(long, default_value = "clx")]
    machine: String,
    /// Kernel: dot, waxpby, spmv, symgs, mg, triad, triad-nt, spmpv;
    /// sparse kernels also accept `spmv:27`. Repeatable.
    #[arg(long)]
    kernel: Vec<String>,
    /// Nonzeros per row for the sparse kernels.
    #[arg(long)]
    nnzr: Option<f64>,
    /// Use non-temporal stores for the triad.
    #[arg(long)]
    nt: bool,
    /// Flops per row, overriding the kernel's default.
    #[arg(long)]
    flops: Option<f64>,
    /// Calls per iteration.
    #[arg(long, default_value_t = 1)]
    calls: u32,
    /// Composite prediction for the four HPCG kernels.
    #[arg(long)]
    hpcg: bool,
    /// Composite prediction for a TOML list of `[[kernel]]` entries.
    #[arg(long)]
    kernels: Option<PathBuf>,
    /// Use the exact 40/3 B/row dot balance instead of the published 13.30.
    #[arg(long)]
    exact_dot: bool,
    /// Rows of the problem (scales the composite time, not its rate).
    #[arg(long, default_value_t = DEFAULT_ROWS)]
    rows: u64,
    /// Predicted columns of the reference table for both presets.
    #[arg(long)]
    golden_table3: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ModelRow {
    machine: String,
    kernel: String,
    code_balance: Option<f64>,
    flops_per_row: Option<f64>,
    calls: Option<u32>,
    perf_gflops: f64,
    time_share: Option<f64>,
}

fn default_flops(kind: KernelKind) -> f64 {
    match kind {
        KernelKind::DotHpcgAvg | KernelKind::Waxpby | KernelKind::StreamTriad { .. } | KernelKind::SpmpvPerNnz { .. } => {
            2.0
        }
        KernelKind::Spmv { nnzr } | KernelKind::SymgsSweep { nnzr } => 2.0 * nnzr,
        KernelKind::MgFinest { nnzr } => 10.0 * nnzr,
    }
}

fn parse_kernel(spec: &str, nnzr: Option<f64>, nt: bool) -> Result<KernelKind, CliError> {
    let kind = if spec.contains(':') || spec.eq_ignore_ascii_case("triad-nt") {
        spec.parse::<KernelKind>()?
    } else {
        KernelKind::from_name(spec, nnzr, nt)?
    };
    Ok(match kind {
        KernelKind::StreamTriad { nt: k } => KernelKind::StreamTriad { nt: k || nt },
        k => k,
    })
}

fn kernel_model(a: &ModelArgs, spec: &str) -> Result<KernelModel, CliError> {
    let kind = parse_kernel(spec, a.nnzr, a.nt)?;
    let balance = match kind {
        KernelKind::DotHpcgAvg if !a.exact_dot => PUBLISHED_DOT_BALANCE,
        k => code_balance(k)?,
    };
    let flops = a.flops.unwrap_or_else(|| default_flops(kind));
    Ok(KernelModel::new(kind.to_string(), balance, flops, a.calls)?)
}

fn single_rows(kernels: &[KernelModel], m: &MachineModel) -> Result<Vec<ModelRow>, CliError> {
    kernels
        .iter()
        .map(|k| {
            let p = roofline_perf(k, m)?;
            Ok(ModelRow {
                machine: m.name.clone(),
                kernel: k.name.clone(),
                code_balance: Some(k.code_balance),
                flops_per_row: Some(k.flops_per_row),
                calls: Some(k.calls),
                perf_gflops: p.perf_gflops,
                time_share: None,
            })
        })
        .collect()
}

fn composite_rows(kernels: &[KernelModel], m: &MachineModel, rows: u64) -> Result<Vec<ModelRow>, CliError> {
    let c = hpcg_composite(kernels, m, rows)?;
    let mut out: Vec<ModelRow> = kernels
        .iter()
        .zip(&c.breakdown)
        .map(|(k, s)| ModelRow {
            machine: m.name.clone(),
            kernel: k.name.clone(),
            code_balance: Some(k.code_balance),
            flops_per_row: Some(k.flops_per_row),
            calls: Some(k.calls),
            perf_gflops: s.perf_gflops,
            time_share: Some(s.time_share),
        })
        .collect();
    out.push(ModelRow {
        machine: m.name.clone(),
        kernel: "composite".into(),
        code_balance: None,
        flops_per_row: None,
        calls: None,
        perf_gflops: c.perf_gflops,
        time_share: Some(1.0),
    });
    Ok(out)
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$}")).unwrap_or_default()
}

pub fn run(a: ModelArgs, out: &Output) -> Result<(), CliError> {
    let dot = if a.exact_dot { 40.0 / 3.0 } else { PUBLISHED_DOT_BALANCE };
    let rows = if a.golden_table3 {
        let ks = hpcg_kernels(27.0, dot)?;
        let mut rows = composite_rows(&ks, &bdw(), a.rows)?;
        rows.extend(composite_rows(&ks, &clx(), a.rows)?);
        rows
    } else {
        let m = machine(&a.machine)?;
        let mut rows = Vec::new();
        if a.hpcg {
            rows.extend(composite_rows(&hpcg_kernels(a.nnzr.unwrap_or(27.0), dot)?, &m, a.rows)?);
        }
        if let Some(p) = &a.kernels {
            rows.extend(composite_rows(&load_kernels(p)?, &m, a.rows)?);
        }
        let singles = a.kernel.iter().map(|k| kernel_model(&a, k)).collect::<Result<Vec<_>, _>>()?;
        rows.extend(single_rows(&singles, &m)?);
        if rows.is_empty() {
            return Err(CliError::Usage(
                "nothing to model: give --kernel, --hpcg, --kernels or --golden-table3".into(),
            ));
        }
        rows
    };

    out.emit(
        &rows,
        || {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.machine.clone(),
                        r.kernel.clone(),
                        opt(r.code_balance, 2),
                        opt(r.flops_per_row, 2),
                        r.calls.map(|c| c.to_string()).unwrap_or_default(),
                        format!("{:.2}", r.perf_gflops),
                        opt(r.time_share.map(|t| 100.0 * t), 1),
                    ]
                })
                .collect();
            table(&["machine", "kernel", "B/row", "F/row", "calls", "GF/s", "time %"], &cells)
        },
        || {
            csv(
                "machine,kernel,code_balance,flops_per_row,calls,perf_gflops,time_share",
                rows.iter().map(|r| {
                    format!(
                        "{},{},{},{},{},{:.4},{}",
                        r.machine,
                        r.kernel,
                        opt(r.code_balance, 4),
                        opt(r.flops_per_row, 4),
                        r.calls.map(|c| c.to_string()).unwrap_or_default(),
                        r.perf_gflops,
                        opt(r.time_share, 6)
                    )
                }),
            )
        },
    )
}
