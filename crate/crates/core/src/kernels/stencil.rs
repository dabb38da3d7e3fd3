use super::crs::SparseMatrixCrs;
use crate::error::{Error, Result};

pub const STENCIL_DIAGONAL: f64 = 26.0;
pub const STENCIL_OFF_DIAGONAL: f64 = -1.0;

/// Grid dimensions of a structured problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::domain(format!("grid dimensions must be >= 1, got {nx}x{ny}x{nz}")));
        }
        Ok(Grid { nx, ny, nz })
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn points(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.nx * (iy + self.ny * iz)
    }
}

/// 27-point stencil matrix on a `nx x ny x nz` grid, HPCG convention:
/// diagonal 26, every neighbor -1, lexicographic ordering with x fastest.
pub fn stencil27_matrix(grid: Grid) -> SparseMatrixCrs {
    let n = grid.points();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(27 * n);
    let mut values = Vec::with_capacity(27 * n);
    row_ptr.push(0u32);
    let span = |i: usize, len: usize| i.saturating_sub(1)..=(i + 1).min(len - 1);
    for iz in 0..grid.nz {
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let me = grid.index(ix, iy, iz);
                for jz in span(iz, grid.nz) {
                    for jy in span(iy, grid.ny) {
                        for jx in span(ix, grid.nx) {
                            let col = grid.index(jx, jy, jz);
                            col_idx.push(col as u32);
                            values.push(if col == me { STENCIL_DIAGONAL } else { STENCIL_OFF_DIAGONAL });
                        }
                    }
                }
                row_ptr.push(col_idx.len() as u32);
            }
        }
    }
    SparseMatrixCrs::new(n, n, row_ptr, col_idx, values).expect("stencil rows are sorted and in range")
}
