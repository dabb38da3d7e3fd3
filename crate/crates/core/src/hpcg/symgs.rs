use crate::cache::TraceSink;
use crate::error::{Error, Result};
use crate::kernels::{elem, CrsAddrs, SparseMatrixCrs};

/// Positions of the diagonal entries; errors on a missing or zero one.
pub fn diagonal_positions(m: &SparseMatrixCrs) -> Result<Vec<usize>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows(),
            cols: m.n_cols(),
        });
    }
    (0..m.n_rows())
        .map(|i| match m.diagonal_index(i) {
            Some(k) if m.values()[k] != 0.0 => Ok(k),
            _ => Err(Error::ZeroDiagonal(i)),
        })
        .collect()
}

#[inline]
fn relax(m: &SparseMatrixCrs, diag: &[usize], r: &[f64], x: &mut [f64], i: usize) {
    let (cols, vals) = m.row(i);
    let d = m.values()[diag[i]];
    let mut sum = r[i];
    for (&c, &v) in cols.iter().zip(vals) {
        sum -= v * x[c as usize];
    }
    sum += x[i] * d;
    x[i] = sum / d;
}

/// One symmetric Gauss-Seidel step on `A x = r`: a forward sweep over rows
/// `0..n` followed by a backward sweep `n..0`, updating `x` in place.
pub fn symgs(m: &SparseMatrixCrs, r: &[f64], x: &mut [f64]) -> Result<()> {
    let diag = diagonal_positions(m)?;
    symgs_with(m, &diag, r, x)
}

pub(crate) fn symgs_with(m: &SparseMatrixCrs, diag: &[usize], r: &[f64], x: &mut [f64]) -> Result<()> {
    let n = m.n_rows();
    for (len, what) in [(r.len(), n), (x.len(), n)] {
        if len != what {
            return Err(Error::DimensionMismatch {
                expected: what,
                actual: len,
            });
        }
    }
    for i in 0..n {
        relax(m, diag, r, x, i);
    }
    for i in (0..n).rev() {
        relax(m, diag, r, x, i);
    }
    Ok(())
}

fn relax_trace<S: TraceSink + ?Sized>(m: &SparseMatrixCrs, a: &CrsAddrs, diag: &[usize], r: u64, x: u64, i: usize, sink: &mut S) {
    sink.load(a.ptr(i));
    sink.load(a.ptr(i + 1));
    sink.load(a.value(diag[i]));
    sink.load(elem(r, i));
    for k in m.row_range(i) {
        sink.load(a.value(k));
        sink.load(a.col(k));
        sink.load(elem(x, m.col_idx()[k] as usize));
    }
    sink.load(elem(x, i));
    sink.store(elem(x, i));
}

/// Access stream of [`symgs`] (both sweeps).
pub fn symgs_trace<S: TraceSink + ?Sized>(m: &SparseMatrixCrs, a: &CrsAddrs, diag: &[usize], r: u64, x: u64, sink: &mut S) {
    for i in 0..m.n_rows() {
        relax_trace(m, a, diag, r, x, i, sink);
    }
    for i in (0..m.n_rows()).rev() {
        relax_trace(m, a, diag, r, x, i, sink);
    }
}
