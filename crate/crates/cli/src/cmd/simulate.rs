use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use roofsim_core::cache::{build_hierarchy, hit_rate_curve, CacheConfig, CurvePoint, Inclusion, PolicyKind};
use roofsim_core::kernels::{StreamKernelKind, Trace};
use roofsim_core::machine::scale_caches;
use roofsim_core::TrafficReport;

use super::machine;
use crate::error::CliError;
use crate::output::{csv, table, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HierarchyView {
    /// The machine's L1 in front of its last-level slice, made inclusive,
    /// so the curve shows the last-level policy on its own.
    Isolated,
    /// The machine's per-core hierarchy as modeled (a victim last level
    /// adds the L2 capacity to the effective size).
    Full,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Machine whose per-core cache hierarchy is simulated.
    #[arg(long, default_value = "clx")]
    machine: String,
    #[arg(long, value_enum, default_value = "isolated")]
    hierarchy: HierarchyView,
    /// Replacement policy of the last level (default: the machine's).
    #[arg(long)]
    policy: Option<String>,
    /// Streaming pattern: load, copy, update, triad, triad-nt.
    #[arg(long, default_value = "load")]
    pattern: String,
    /// Single data-set size as a multiple of the last-level capacity.
    #[arg(long, conflicts_with = "ratios")]
    ratio: Option<f64>,
    /// Ratios as `a..b`, `a..b:step` or a comma list.
    #[arg(long, default_value = "0.5..12")]
    ratios: String,
    /// Step for `a..b` ranges without an explicit step.
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    /// Passes per ratio; the first one only warms the caches.
    #[arg(long, default_value_t = 3)]
    passes: u32,
    /// Shrink every cache level by 2^scale sets.
    #[arg(long, default_value_t = 0)]
    scale: u32,
    /// Run a binary trace file instead of a generated stream.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Units of work the trace performs (for bytes per unit).
    #[arg(long, requires = "trace")]
    work: Option<u64>,
}

/// Parses `a..b`, `a..b:step` or `x,y,z` into an ascending list.
pub fn parse_ratios(spec: &str, default_step: f64) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad ratio list `{spec}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if let Some((lo, rest)) = spec.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((h, s)) => (num(h)?, num(s)?),
            None => (num(rest)?, default_step),
        };
        let lo = num(lo)?;
        if !(step > 0.0) || !(hi >= lo) {
            return Err(bad());
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| lo + i as f64 * step).collect());
    }
    spec.split(',').map(num).collect()
}

fn caches(a: &SimulateArgs) -> Result<Vec<CacheConfig>, CliError> {
    let m = machine(&a.machine)?;
    let mut levels = scale_caches(&m.per_core_caches(), a.scale);
    if levels.is_empty() {
        return Err(CliError::Usage(format!("machine `{}` has no cache levels", m.name)));
    }
    if a.hierarchy == HierarchyView::Isolated && levels.len() > 2 {
        let mut last = levels.pop().expect("non-empty");
        last.inclusion = Inclusion::Inclusive;
        levels.truncate(1);
        levels.push(last);
    }
    if let Some(p) = &a.policy {
        let policy: PolicyKind = p.parse()?;
        if let Some(last) = levels.last_mut() {
            last.policy = policy;
        }
    }
    Ok(levels)
}

#[derive(Debug, Serialize)]
struct Curve {
    machine: String,
    hierarchy: HierarchyView,
    policy: PolicyKind,
    pattern: String,
    last_level_bytes: u64,
    passes: u32,
    points: Vec<CurvePoint>,
}

fn run_trace(a: &SimulateArgs, levels: &[CacheConfig], path: &Path, out: &Output) -> Result<(), CliError> {
    let trace = Trace::load(path, a.work.unwrap_or(0))?;
    let work = a.work.filter(|&w| w > 0);
    let report: TrafficReport = build_hierarchy(levels)?.run_trace(&trace.accesses, work);
    out.emit(
        &report,
        || {
            let rows: Vec<Vec<String>> = report
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.level.to_string(),
                        l.hits.to_string(),
                        l.misses.to_string(),
                        format!("{:.2}", 100.0 * l.hit_rate()),
                    ]
                })
                .collect();
            let mut s = table(&["level", "hits", "misses", "hit %"], &rows);
            s.push_str(&format!(
                "memory: {} B read, {} B written",
                report.bytes_read_mem, report.bytes_written_mem
            ));
            if let Some(b) = report.bytes_per_work() {
                s.push_str(&format!(", {b:.3} B per unit of work"));
            }
            s
        },
        || report.to_csv(),
    )
}

pub fn run(a: SimulateArgs, out: &Output) -> Result<(), CliError> {
    let levels = caches(&a)?;
    if let Some(path) = &a.trace {
        return run_trace(&a, &levels, path, out);
    }
    let pattern: StreamKernelKind = a.pattern.parse()?;
    let ratios = match a.ratio {
        Some(r) => vec![r],
        None => parse_ratios(&a.ratios, a.step)?,
    };
    let last = levels.last().expect("checked non-empty");
    let curve = Curve {
        machine: a.machine.clone(),
        hierarchy: a.hierarchy,
        policy: last.policy,
        pattern: pattern.to_string(),
        last_level_bytes: last.capacity,
        passes: a.passes,
        points: hit_rate_curve(&levels, pattern, &ratios, a.passes)?,
    };
    out.emit(
        &curve,
        || {
            let rows: Vec<Vec<String>> = curve
                .points
                .iter()
                .map(|p| {
                    vec![
                        format!("{:.3}", p.ratio),
                        p.dataset_bytes.to_string(),
                        format!("{:.2}", 100.0 * p.l3_hit_rate),
                        format!("{:.2}", 100.0 * p.outer_hit_rate),
                        format!("{:.0}", p.mem_bytes_per_pass),
                    ]
                })
                .collect();
            format!(
                "{} ({}), {} last level, {} pattern\n{}",
                curve.machine,
                if curve.hierarchy == HierarchyView::Full { "full" } else { "isolated" },
                curve.policy,
                curve.pattern,
                table(&["ratio", "bytes", "L3 hit %", "outer hit %", "mem B/pass"], &rows)
            )
        },
        || {
            csv(
                "ratio,dataset_bytes,l3_hit_rate,outer_hit_rate,mem_bytes_per_pass",
                curve.points.iter().map(|p| {
                    format!(
                        "{},{},{:.6},{:.6},{:.1}",
                        p.ratio, p.dataset_bytes, p.l3_hit_rate, p.outer_hit_rate, p.mem_bytes_per_pass
                    )
                }),
            )
        },
    )
}
