use super::crs::SparseMatrixCrs;
use super::trace::AddressSpace;
use crate::cache::TraceSink;
use crate::error::{Error, Result};
use crate::machine::{code_balance, KernelKind};

/// Simulated addresses of a CRS matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrsAddrs {
    pub values: u64,
    pub col_idx: u64,
    pub row_ptr: u64,
    /// Bytes per stored column index and row pointer (4 by default).
    pub index_bytes: u64,
}

impl CrsAddrs {
    pub fn alloc(m: &SparseMatrixCrs, space: &mut AddressSpace) -> Self {
        Self::alloc_with_index(m, space, 4)
    }

    /// Layout with wider indices; only the simulated addresses change.
    pub fn alloc_with_index(m: &SparseMatrixCrs, space: &mut AddressSpace, index_bytes: u64) -> Self {
        let nnz = m.nnz() as u64;
        CrsAddrs {
            values: space.alloc(8 * nnz),
            col_idx: space.alloc(index_bytes * nnz),
            row_ptr: space.alloc(index_bytes * (m.n_rows() as u64 + 1)),
            index_bytes,
        }
    }

    #[inline]
    pub fn value(&self, k: usize) -> u64 {
        self.values + 8 * k as u64
    }

    #[inline]
    pub fn col(&self, k: usize) -> u64 {
        self.col_idx + self.index_bytes * k as u64
    }

    #[inline]
    pub fn ptr(&self, i: usize) -> u64 {
        self.row_ptr + self.index_bytes * i as u64
    }
}

#[inline]
pub(crate) fn elem(base: u64, i: usize) -> u64 {
    base + 8 * i as u64
}

/// `y = A x`.
pub fn spmv(m: &SparseMatrixCrs, x: &[f64]) -> Result<Vec<f64>> {
    let mut y = vec![0.0; m.n_rows()];
    spmv_into(m, x, &mut y)?;
    Ok(y)
}

pub fn spmv_into(m: &SparseMatrixCrs, x: &[f64], y: &mut [f64]) -> Result<()> {
    if x.len() != m.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: m.n_cols(),
            actual: x.len(),
        });
    }
    if y.len() != m.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: m.n_rows(),
            actual: y.len(),
        });
    }
    for (i, yi) in y.iter_mut().enumerate() {
        let (cols, vals) = m.row(i);
        *yi = cols.iter().zip(vals).map(|(&c, &v)| v * x[c as usize]).sum();
    }
    Ok(())
}

/// Access stream of the straightforward CRS SpMV: per row the two row
/// pointers, per nonzero the value, the column index and the gathered `x`
/// element, then the `y` store.
pub fn spmv_trace<S: TraceSink + ?Sized>(m: &SparseMatrixCrs, a: &CrsAddrs, x: u64, y: u64, sink: &mut S) {
    for i in 0..m.n_rows() {
        sink.load(a.ptr(i));
        sink.load(a.ptr(i + 1));
        let r = m.row_range(i);
        for k in r {
            sink.load(a.value(k));
            sink.load(a.col(k));
            sink.load(elem(x, m.col_idx()[k] as usize));
        }
        sink.store(elem(y, i));
    }
}

/// `y[0] = x`, `y[i] = A y[i-1]` for `i = 1..=p`; returns all `p + 1`
/// vectors.
pub fn spmpv(m: &SparseMatrixCrs, x: &[f64], p: usize) -> Result<Vec<Vec<f64>>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows(),
            cols: m.n_cols(),
        });
    }
    if p == 0 {
        return Err(Error::domain("matrix power must be >= 1"));
    }
    let mut ys = Vec::with_capacity(p + 1);
    ys.push(x.to_vec());
    for i in 1..=p {
        let next = spmv(m, &ys[i - 1])?;
        ys.push(next);
    }
    Ok(ys)
}

/// Simulated addresses for an SpMPV run: the matrix plus `p + 1` vectors.
#[derive(Debug, Clone)]
pub struct SpmpvAddrs {
    pub matrix: CrsAddrs,
    pub vectors: Vec<u64>,
}

impl SpmpvAddrs {
    pub fn alloc(m: &SparseMatrixCrs, p: usize, space: &mut AddressSpace) -> Self {
        SpmpvAddrs {
            matrix: CrsAddrs::alloc(m, space),
            vectors: (0..=p).map(|_| space.alloc_f64(m.n_rows())).collect(),
        }
    }
}

/// Access stream of `p` chained SpMVs.
pub fn spmpv_trace<S: TraceSink + ?Sized>(m: &SparseMatrixCrs, addrs: &SpmpvAddrs, sink: &mut S) {
    for w in addrs.vectors.windows(2) {
        spmv_trace(m, &addrs.matrix, w[0], w[1], sink);
    }
}

/// Lower bound on SpMV memory traffic per nonzero under ideal vector
/// reuse: `12 + 28 / nnzr` bytes.
pub fn min_spmv_traffic(nnzr: f64) -> Result<f64> {
    code_balance(KernelKind::SpmpvPerNnz { nnzr })
}
