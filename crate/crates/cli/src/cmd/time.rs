use std::hint::black_box;
use std::time::Instant;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use roofsim_core::kernels::{run_stream, spmv_into, stencil27_matrix, Grid, StreamKernelKind};
use roofsim_core::machine::{STREAM_NT_BALANCE, STREAM_WA_BALANCE};
use roofsim_core::{code_balance, KernelKind};

use crate::error::CliError;
use crate::output::{csv, table, Output};

#[derive(Debug, Args)]
pub struct TimeArgs {
    /// Kernel: load, copy, update, triad, spmv.
    #[arg(long, default_value = "triad")]
    kernel: String,
    /// Elements per array for the streaming kernels.
    #[arg(long, default_value_t = 1 << 22)]
    n: usize,
    /// Grid points per dimension for spmv.
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// Keep repeating until this much time has passed.
    #[arg(long, default_value_t = 1.0)]
    min_time: f64,
}

#[derive(Debug, Serialize)]
struct Interpretation {
    label: &'static str,
    bytes_per_unit: f64,
    gbs: f64,
}

#[derive(Debug, Serialize)]
struct TimeReport {
    kernel: String,
    units_per_call: usize,
    reps: usize,
    total_seconds: f64,
    median_seconds: f64,
    min_seconds: f64,
    max_seconds: f64,
    /// `(max - min) / median`.
    spread: f64,
    gflops: f64,
    bandwidth: Vec<Interpretation>,
}

/// Calls `f` until `min_time` seconds have passed (at least three times)
/// and returns the sorted per-call times.
fn repeat(min_time: f64, mut f: impl FnMut()) -> (Vec<f64>, f64) {
    let start = Instant::now();
    let mut times = Vec::new();
    while times.len() < 3 || start.elapsed().as_secs_f64() < min_time {
        let t = Instant::now();
        f();
        times.push(t.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    (times, start.elapsed().as_secs_f64())
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn run(a: TimeArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    if !(a.min_time >= 0.0) {
        return Err(CliError::Usage("--min-time must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (units, flops_per_unit, bandwidth_bytes, (times, total)) = if a.kernel.eq_ignore_ascii_case("spmv") {
        let m = stencil27_matrix(Grid::cube(a.size)?);
        let x: Vec<f64> = (0..m.n_cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; m.n_rows()];
        let timing = repeat(a.min_time, || {
            // dimensions match by construction
            let _ = spmv_into(&m, black_box(&x), &mut y);
            black_box(&y);
        });
        let balance = code_balance(KernelKind::Spmv { nnzr: m.nnzr() })?;
        (m.n_rows(), 2.0 * m.nnzr(), vec![("model", balance)], timing)
    } else {
        let kind: StreamKernelKind = a.kernel.parse()?;
        if a.n == 0 {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        let mut init = |len| (0..len).map(|_| rng.gen_range(0.5..1.5)).collect::<Vec<f64>>();
        let mut x = init(a.n);
        let y = init(a.n);
        let z = init(a.n);
        let timing = repeat(a.min_time, || {
            black_box(run_stream(kind, &mut x, black_box(&y), black_box(&z), black_box(1.0 + 1e-9)));
        });
        let bytes = match kind {
            StreamKernelKind::Triad { .. } => vec![("nt-assumed", STREAM_NT_BALANCE), ("write-allocate", STREAM_WA_BALANCE)],
            StreamKernelKind::Copy => vec![("nt-assumed", 16.0), ("write-allocate", 24.0)],
            k => vec![("application", k.application_bytes() as f64)],
        };
        let flops = match kind {
            StreamKernelKind::Triad { .. } => 2.0,
            StreamKernelKind::Copy => 0.0,
            _ => 1.0,
        };
        (a.n, flops, bytes, timing)
    };

    let med = median(&times);
    let report = TimeReport {
        kernel: a.kernel.to_ascii_lowercase(),
        units_per_call: units,
        reps: times.len(),
        total_seconds: total,
        median_seconds: med,
        min_seconds: times[0],
        max_seconds: times[times.len() - 1],
        spread: (times[times.len() - 1] - times[0]) / med,
        gflops: flops_per_unit * units as f64 / med * 1e-9,
        bandwidth: bandwidth_bytes
            .into_iter()
            .map(|(label, b)| Interpretation {
                label,
                bytes_per_unit: b,
                gbs: b * units as f64 / med * 1e-9,
            })
            .collect(),
    };
    out.emit(
        &report,
        || {
            let mut s = format!(
                "{}: {} reps in {:.2} s, median {:.3} ms, spread {:.1}%, {:.2} GF/s\n",
                report.kernel,
                report.reps,
                report.total_seconds,
                1e3 * report.median_seconds,
                100.0 * report.spread,
                report.gflops
            );
            let rows: Vec<Vec<String>> = report
                .bandwidth
                .iter()
                .map(|b| vec![b.label.to_string(), format!("{}", b.bytes_per_unit), format!("{:.2}", b.gbs)])
                .collect();
            s.push_str(&table(&["interpretation", "B/unit", "GB/s"], &rows));
            s.push_str("(host-dependent timing, not part of any model check)\n");
            s
        },
        || {
            csv(
                "kernel,interpretation,bytes_per_unit,gbs,median_seconds,spread,reps",
                report.bandwidth.iter().map(|b| {
                    format!(
                        "{},{},{},{:.4},{:.6e},{:.4},{}",
                        report.kernel, b.label, b.bytes_per_unit, b.gbs, report.median_seconds, report.spread, report.reps
                    )
                }),
            )
        },
    )
}
