use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use roofsim_core::hpcg::{
    cg_solve, desk_scale_shift, simulate_iteration_traffic, validate_against_model, CgOptions, HpcgKernel,
    MgHierarchy, Preconditioner, ValidationReport,
};
use roofsim_core::kernels::{spmv, Grid};
use roofsim_core::machine::scale_caches;

use super::machine;
use crate::error::CliError;
use crate::output::{csv, table, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rhs {
    /// `b = A * 1`, so the exact solution is all ones.
    Ones,
    /// Uniform random entries in [-1, 1) drawn from --seed.
    Random,
}

#[derive(Debug, Args)]
pub struct HpcgArgs {
    /// Points per grid dimension.
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// Grid points in y and z when they differ from --size.
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    nz: Option<usize>,
    /// CG iterations.
    #[arg(long, default_value_t = 25)]
    iters: usize,
    /// Multigrid coarsening steps.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Stop early once the relative residual drops below this.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    #[arg(long, value_enum, default_value = "ones")]
    rhs: Rhs,
    /// Simulate one iteration's memory traffic and compare it to the model.
    #[arg(long)]
    validate: bool,
    /// Machine for --validate.
    #[arg(long, default_value = "clx")]
    machine: String,
    /// Relative deviation above which a kernel is flagged.
    #[arg(long, default_value_t = 0.3)]
    threshold: f64,
    /// Cache shrink (power of two) for --validate; defaults to the one
    /// matching the grid size.
    #[arg(long)]
    scale: Option<u32>,
}

#[derive(Debug, Serialize)]
struct HpcgOutput {
    grid: [usize; 3],
    depth: usize,
    iterations: usize,
    converged: bool,
    residuals: Vec<f64>,
    calls_per_iteration: BTreeMap<HpcgKernel, f64>,
    flops_per_row: BTreeMap<HpcgKernel, f64>,
    total_flops: f64,
    cache_scale: Option<u32>,
    validation: Option<ValidationReport>,
}

pub fn run(a: HpcgArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    let grid = Grid::new(a.size, a.ny.unwrap_or(a.size), a.nz.unwrap_or(a.size))?;
    let mg = MgHierarchy::new(grid, a.depth)?;
    let m = &mg.finest().matrix;
    let n = m.n_rows();
    let b = match a.rhs {
        Rhs::Ones => spmv(m, &vec![1.0; n])?,
        Rhs::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    let res = cg_solve(m, &b, Preconditioner::Multigrid(&mg), &CgOptions { max_iter: a.iters, tol: a.tol })?;
    let acc = &res.accounting;
    let kernels: Vec<HpcgKernel> = acc.kernels.keys().copied().collect();

    let (cache_scale, validation) = if a.validate {
        let target = machine(&a.machine)?;
        let shift = a.scale.unwrap_or_else(|| desk_scale_shift(n));
        let caches = scale_caches(&target.per_core_caches(), shift);
        let traffic = simulate_iteration_traffic(&mg, &caches)?;
        (Some(shift), Some(validate_against_model(&traffic, &target, 27.0, a.threshold)?))
    } else {
        (None, None)
    };

    let report = HpcgOutput {
        grid: [grid.nx, grid.ny, grid.nz],
        depth: a.depth,
        iterations: res.iterations,
        converged: res.converged,
        residuals: res.residuals.clone(),
        calls_per_iteration: kernels.iter().map(|&k| (k, acc.calls_per_iteration(k))).collect(),
        flops_per_row: kernels.iter().map(|&k| (k, acc.flops_per_row(k))).collect(),
        total_flops: acc.total_flops(),
        cache_scale,
        validation,
    };

    out.emit(&report, || human(&report), || csv_output(&report))
}

fn human(r: &HpcgOutput) -> String {
    let [nx, ny, nz] = r.grid;
    let mut s = format!(
        "grid {nx}x{ny}x{nz}, depth {}, {} iterations, residual drop {:.3e}\n\n",
        r.depth,
        r.iterations,
        1.0 / r.residuals.last().copied().unwrap_or(1.0)
    );
    let hist: Vec<Vec<String>> = r
        .residuals
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), format!("{v:.6e}")])
        .collect();
    s.push_str(&table(&["iter", "rel. residual"], &hist));
    s.push('\n');
    let calls: Vec<Vec<String>> = r
        .calls_per_iteration
        .iter()
        .map(|(k, c)| vec![k.to_string(), format!("{c}"), format!("{:.2}", r.flops_per_row[k])])
        .collect();
    s.push_str(&table(&["kernel", "calls/iter", "F/row"], &calls));
    if let Some(v) = &r.validation {
        s.push_str(&format!(
            "\nmodel validation on {} (cache scale 2^-{}, threshold {:.0}%)\n",
            v.machine,
            r.cache_scale.unwrap_or(0),
            100.0 * v.threshold
        ));
        let rows: Vec<Vec<String>> = v
            .rows
            .iter()
            .map(|row| {
                vec![
                    row.kernel.to_string(),
                    row.calls.to_string(),
                    format!("{:.2}", row.measured),
                    format!("{:.2}", row.predicted),
                    format!("{:+.2}", 100.0 * row.deviation),
                    if row.flagged { "FLAG".into() } else { String::new() },
                ]
            })
            .collect();
        s.push_str(&table(&["kernel", "calls", "sim B/row", "model B/row", "dev %", ""], &rows));
        s.push_str(&format!(
            "composite: model {:.2} GF/s, with simulated balances {:.2} GF/s\n",
            v.model_gflops, v.simulated_gflops
        ));
    }
    s
}

/// The deviation table with --validate, the residual history otherwise.
fn csv_output(r: &HpcgOutput) -> String {
    match &r.validation {
        Some(v) => csv(
            "kernel,calls,measured_bytes_per_row,predicted_bytes_per_row,deviation,flagged",
            v.rows.iter().map(|row| {
                format!(
                    "{},{},{:.6},{:.6},{:.6},{}",
                    row.kernel, row.calls, row.measured, row.predicted, row.deviation, row.flagged
                )
            }),
        ),
        None => csv(
            "iteration,relative_residual",
            r.residuals.iter().enumerate().map(|(i, v)| format!("{i},{v:e}")),
        ),
    }
}
