use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::blas::{dot, waxpby_in_place, waxpby_into};
use super::mg::MgHierarchy;
use super::symgs::{diagonal_positions, symgs_with};
use crate::error::{Error, Result};
use crate::kernels::{spmv_into, SparseMatrixCrs};

/// Kernels called by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HpcgKernel {
    Dot,
    Waxpby,
    Spmv,
    Mg,
    Symgs,
}

impl HpcgKernel {
    pub fn as_str(self) -> &'static str {
        match self {
            HpcgKernel::Dot => "dot",
            HpcgKernel::Waxpby => "waxpby",
            HpcgKernel::Spmv => "spmv",
            HpcgKernel::Mg => "mg",
            HpcgKernel::Symgs => "symgs",
        }
    }
}

impl fmt::Display for HpcgKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub enum Preconditioner<'a> {
    None,
    /// One symmetric Gauss-Seidel step.
    SymGs,
    Multigrid(&'a MgHierarchy),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub max_iter: usize,
    /// Relative residual `|r_k| / |r_0|` at which to stop.
    pub tol: f64,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { max_iter: 50, tol: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Tally {
    pub calls: u64,
    pub flops: f64,
}

/// Call and flop counts of the main loop. Work done before the first
/// iteration (initial residual) is kept apart in `setup`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct KernelAccounting {
    pub n_rows: usize,
    pub iterations: usize,
    pub kernels: BTreeMap<HpcgKernel, Tally>,
    /// Flops spent on coarse multigrid levels (not part of any tally).
    pub mg_coarse_flops: f64,
    pub setup: BTreeMap<HpcgKernel, Tally>,
}

impl KernelAccounting {
    fn book(map: &mut BTreeMap<HpcgKernel, Tally>, k: HpcgKernel, flops: f64) {
        let t = map.entry(k).or_default();
        t.calls += 1;
        t.flops += flops;
    }

    pub fn tally(&self, k: HpcgKernel) -> Tally {
        self.kernels.get(&k).copied().unwrap_or_default()
    }

    pub fn calls_per_iteration(&self, k: HpcgKernel) -> f64 {
        if self.iterations == 0 {
            return 0.0;
        }
        self.tally(k).calls as f64 / self.iterations as f64
    }

    /// Flops per row for a single call of `k`.
    pub fn flops_per_row(&self, k: HpcgKernel) -> f64 {
        let t = self.tally(k);
        if t.calls == 0 || self.n_rows == 0 {
            return 0.0;
        }
        t.flops / t.calls as f64 / self.n_rows as f64
    }

    pub fn total_flops(&self) -> f64 {
        self.kernels.values().map(|t| t.flops).sum::<f64>() + self.mg_coarse_flops
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoggedCall {
    /// 0 for setup, otherwise the 1-based iteration.
    pub iteration: usize,
    pub kernel: HpcgKernel,
}

#[derive(Debug, Clone, Serialize)]
pub struct CgResult {
    pub x: Vec<f64>,
    /// `|r_k| / |r_0|` for k = 0..=iterations.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub accounting: KernelAccounting,
    pub call_log: Vec<LoggedCall>,
}

impl CgResult {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }

    /// Kernel sequence of one iteration.
    pub fn calls_in(&self, iteration: usize) -> Vec<HpcgKernel> {
        self.call_log.iter().filter(|c| c.iteration == iteration).map(|c| c.kernel).collect()
    }
}

struct Recorder {
    acc: KernelAccounting,
    log: Vec<LoggedCall>,
    iteration: usize,
}

impl Recorder {
    fn record(&mut self, kernel: HpcgKernel, flops: f64) {
        let map = if self.iteration == 0 { &mut self.acc.setup } else { &mut self.acc.kernels };
        KernelAccounting::book(map, kernel, flops);
        self.log.push(LoggedCall {
            iteration: self.iteration,
            kernel,
        });
    }
}

/// Preconditioned conjugate gradients from `x0 = 0`, in the kernel order
/// of HPCG: MG, DOT, WAXPBY, SpMV, DOT, WAXPBY, WAXPBY, DOT.
///
/// The first direction is formed as `p = 1*z + 0*p` so every iteration
/// issues the same calls.
pub fn cg_solve(a: &SparseMatrixCrs, b: &[f64], precond: Preconditioner<'_>, opts: &CgOptions) -> Result<CgResult> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    let n = a.n_rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    if !(opts.tol >= 0.0) {
        return Err(Error::domain(format!("tolerance must be >= 0, got {}", opts.tol)));
    }
    let diag = match precond {
        Preconditioner::SymGs => Some(diagonal_positions(a)?),
        _ => None,
    };
    if let Preconditioner::Multigrid(mg) = precond {
        let fine = &mg.finest().matrix;
        if fine.n_rows() != n || fine.nnz() != a.nnz() {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: fine.n_rows(),
            });
        }
    }
    let nf = n as f64;
    let nnz = a.nnz() as f64;
    let mut rec = Recorder {
        acc: KernelAccounting {
            n_rows: n,
            ..Default::default()
        },
        log: Vec::new(),
        iteration: 0,
    };

    let mut x = vec![0.0; n];
    let mut ap = vec![0.0; n];
    spmv_into(a, &x, &mut ap)?;
    rec.record(HpcgKernel::Spmv, 2.0 * nnz);
    let mut r = vec![0.0; n];
    waxpby_into(1.0, b, -1.0, &ap, &mut r)?;
    rec.record(HpcgKernel::Waxpby, 2.0 * nf);
    let normr0 = dot(&r, &r)?.sqrt();
    rec.record(HpcgKernel::Dot, 2.0 * nf);

    let mut residuals = vec![if normr0 == 0.0 { 0.0 } else { 1.0 }];
    let mut normr = normr0;
    let mut p = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut rtz_old = 0.0;
    let mut k = 1;
    while normr0 > 0.0 && k <= opts.max_iter && normr / normr0 > opts.tol {
        rec.iteration = k;
        match precond {
            Preconditioner::None => z.copy_from_slice(&r),
            Preconditioner::SymGs => {
                z.iter_mut().for_each(|v| *v = 0.0);
                symgs_with(a, diag.as_deref().unwrap_or_default(), &r, &mut z)?;
                rec.record(HpcgKernel::Symgs, 4.0 * nnz);
            }
            Preconditioner::Multigrid(mg) => {
                z = mg.apply(&r)?;
                let f = mg.flops();
                rec.record(HpcgKernel::Mg, f.finest);
                rec.acc.mg_coarse_flops += f.coarse;
            }
        }
        let rtz = dot(&r, &z)?;
        rec.record(HpcgKernel::Dot, 2.0 * nf);
        if k == 1 {
            waxpby_in_place(0.0, &mut p, 1.0, &z)?;
        } else {
            waxpby_in_place(rtz / rtz_old, &mut p, 1.0, &z)?;
        }
        rec.record(HpcgKernel::Waxpby, 2.0 * nf);
        rtz_old = rtz;

        spmv_into(a, &p, &mut ap)?;
        rec.record(HpcgKernel::Spmv, 2.0 * nnz);
        let pap = dot(&p, &ap)?;
        rec.record(HpcgKernel::Dot, 2.0 * nf);
        if !(pap > 0.0) {
            return Err(Error::Breakdown { iteration: k, pap });
        }
        let alpha = rtz / pap;
        waxpby_in_place(1.0, &mut x, alpha, &p)?;
        rec.record(HpcgKernel::Waxpby, 2.0 * nf);
        waxpby_in_place(1.0, &mut r, -alpha, &ap)?;
        rec.record(HpcgKernel::Waxpby, 2.0 * nf);
        normr = dot(&r, &r)?.sqrt();
        rec.record(HpcgKernel::Dot, 2.0 * nf);
        residuals.push(normr / normr0);
        rec.acc.iterations = k;
        k += 1;
    }
    let iterations = rec.acc.iterations;
    Ok(CgResult {
        x,
        converged: normr0 == 0.0 || normr / normr0 <= opts.tol,
        residuals,
        iterations,
        accounting: rec.acc,
        call_log: rec.log,
    })
}
