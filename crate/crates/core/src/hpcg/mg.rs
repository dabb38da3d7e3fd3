use super::symgs::{diagonal_positions, symgs_with};
use crate::error::{Error, Result};
use crate::kernels::{spmv_into, stencil27_matrix, Grid, SparseMatrixCrs};

/// One grid of the multigrid hierarchy.
#[derive(Debug, Clone)]
pub struct MgLevel {
    pub grid: Grid,
    pub matrix: SparseMatrixCrs,
    pub(crate) diag: Vec<usize>,
    /// Fine index of every point of the next coarser grid (empty on the
    /// coarsest level).
    pub f2c: Vec<usize>,
}

/// Geometric multigrid hierarchy over the 27-point stencil.
///
/// `depth` is the number of coarsenings: the hierarchy has `depth + 1`
/// grids and every dimension must be divisible by `2^depth`.
#[derive(Debug, Clone)]
pub struct MgHierarchy {
    levels: Vec<MgLevel>,
}

/// Floating-point operations of one V-cycle, split by grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MgFlops {
    pub finest: f64,
    pub coarse: f64,
}

fn coarse_map(fine: Grid, coarse: Grid) -> Vec<usize> {
    let mut f2c = Vec::with_capacity(coarse.points());
    for iz in 0..coarse.nz {
        for iy in 0..coarse.ny {
            for ix in 0..coarse.nx {
                f2c.push(fine.index(2 * ix, 2 * iy, 2 * iz));
            }
        }
    }
    f2c
}

impl MgHierarchy {
    pub fn new(grid: Grid, depth: usize) -> Result<Self> {
        let factor = 1usize
            .checked_shl(depth as u32)
            .filter(|_| depth < 32)
            .ok_or_else(|| Error::domain(format!("multigrid depth {depth} is too large")))?;
        for (axis, n) in [("x", grid.nx), ("y", grid.ny), ("z", grid.nz)] {
            if n % factor != 0 {
                return Err(Error::domain(format!(
                    "grid dimension {axis}={n} is not divisible by 2^{depth}={factor}"
                )));
            }
        }
        let mut levels = Vec::with_capacity(depth + 1);
        let mut g = grid;
        for l in 0..=depth {
            let matrix = stencil27_matrix(g);
            let diag = diagonal_positions(&matrix)?;
            let next = if l < depth { Some(Grid::new(g.nx / 2, g.ny / 2, g.nz / 2)?) } else { None };
            let f2c = next.map(|c| coarse_map(g, c)).unwrap_or_default();
            levels.push(MgLevel { grid: g, matrix, diag, f2c });
            if let Some(c) = next {
                g = c;
            }
        }
        Ok(MgHierarchy { levels })
    }

    pub fn levels(&self) -> &[MgLevel] {
        &self.levels
    }

    pub fn finest(&self) -> &MgLevel {
        &self.levels[0]
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Applies one V-cycle to `r` with a zero initial guess.
    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let n = self.finest().matrix.n_rows();
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: r.len(),
            });
        }
        let mut x = vec![0.0; n];
        self.cycle(0, r, &mut x)?;
        Ok(x)
    }

    fn cycle(&self, l: usize, r: &[f64], x: &mut [f64]) -> Result<()> {
        let lvl = &self.levels[l];
        x.iter_mut().for_each(|v| *v = 0.0);
        symgs_with(&lvl.matrix, &lvl.diag, r, x)?;
        if l + 1 == self.levels.len() {
            return Ok(());
        }
        let mut axf = vec![0.0; r.len()];
        spmv_into(&lvl.matrix, x, &mut axf)?;
        let rc: Vec<f64> = lvl.f2c.iter().map(|&f| r[f] - axf[f]).collect();
        let mut xc = vec![0.0; rc.len()];
        self.cycle(l + 1, &rc, &mut xc)?;
        for (&f, c) in lvl.f2c.iter().zip(&xc) {
            x[f] += c;
        }
        symgs_with(&lvl.matrix, &lvl.diag, r, x)
    }

    /// Flops of one V-cycle: 4 per nonzero per smoothing step and 2 per
    /// nonzero for the residual. Restriction and prolongation cost one flop
    /// per coarse point each and are booked on the coarse side.
    pub fn flops(&self) -> MgFlops {
        let last = self.levels.len() - 1;
        let mut out = MgFlops::default();
        for (l, lvl) in self.levels.iter().enumerate() {
            let nnz = lvl.matrix.nnz() as f64;
            let (smooth, transfer) = if l == last {
                (4.0 * nnz, 0.0)
            } else {
                (2.0 * 4.0 * nnz + 2.0 * nnz, 2.0 * lvl.f2c.len() as f64)
            };
            if l == 0 {
                out.finest += smooth;
            } else {
                out.coarse += smooth;
            }
            out.coarse += transfer;
        }
        out
    }
}
