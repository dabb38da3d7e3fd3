use crate::error::{Error, Result};

/// Compressed row storage with 8-byte values and 4-byte column indices and
/// row pointers. Column indices are strictly increasing within a row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrixCrs {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    col_idx: Vec<u32>,
    row_ptr: Vec<u32>,
}

impl SparseMatrixCrs {
    /// Validating constructor.
    pub fn new(n_rows: usize, n_cols: usize, row_ptr: Vec<u32>, col_idx: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::domain(format!("invalid CRS matrix: {msg}")));
        if row_ptr.len() != n_rows + 1 {
            return bad(format!("row_ptr has {} entries, expected {}", row_ptr.len(), n_rows + 1));
        }
        if row_ptr[0] != 0 {
            return bad("row_ptr[0] must be 0".into());
        }
        if row_ptr[n_rows] as usize != col_idx.len() || col_idx.len() != values.len() {
            return bad(format!(
                "row_ptr[n] = {}, {} column indices, {} values",
                row_ptr[n_rows],
                col_idx.len(),
                values.len()
            ));
        }
        if u32::try_from(n_cols).is_err() || u32::try_from(col_idx.len()).is_err() {
            return bad("matrix exceeds 32-bit index range".into());
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_ptr[i] as usize, row_ptr[i + 1] as usize);
            if hi < lo {
                return bad(format!("row_ptr decreases at row {i}"));
            }
            let row = &col_idx[lo..hi];
            if row.iter().any(|&c| c as usize >= n_cols) {
                return bad(format!("column index out of range in row {i}"));
            }
            if row.windows(2).any(|w| w[1] <= w[0]) {
                return bad(format!("column indices not strictly increasing in row {i}"));
            }
        }
        Ok(SparseMatrixCrs {
            n_rows,
            n_cols,
            values,
            col_idx,
            row_ptr,
        })
    }

    /// Builds from `(row, col, value)` entries in any order; duplicates are
    /// summed.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= n_rows || c >= n_cols) {
            return Err(Error::domain(format!(
                "entry ({r}, {c}) outside a {n_rows}x{n_cols} matrix"
            )));
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0u32; n_rows + 1];
        let mut col_idx: Vec<u32> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((r, c));
            col_idx.push(c as u32);
            values.push(v);
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::new(n_rows, n_cols, row_ptr, col_idx, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect()).expect("identity is valid")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Average nonzeros per row.
    pub fn nnzr(&self) -> f64 {
        self.nnz() as f64 / self.n_rows.max(1) as f64
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn row_ptr(&self) -> &[u32] {
        &self.row_ptr
    }

    #[inline]
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i] as usize..self.row_ptr[i + 1] as usize
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_range(i);
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Position of the diagonal entry of row `i` in the value array.
    pub fn diagonal_index(&self, i: usize) -> Option<usize> {
        let r = self.row_range(i);
        self.col_idx[r.clone()]
            .binary_search(&(i as u32))
            .ok()
            .map(|k| r.start + k)
    }

    /// Largest `|i - j|` over all stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n_rows)
            .flat_map(|i| self.row(i).0.iter().map(move |&c| (c as usize).abs_diff(i)))
            .max()
            .unwrap_or(0)
    }

    /// `P A P^T` where `perm[new] = old`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        check_permutation(perm, self.n_rows)?;
        let mut inverse = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        row_ptr.push(0u32);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        let mut row: Vec<(u32, f64)> = Vec::new();
        for &old in perm {
            let (cols, vals) = self.row(old);
            row.clear();
            row.extend(cols.iter().zip(vals).map(|(&c, &v)| (inverse[c as usize] as u32, v)));
            row.sort_unstable_by_key(|e| e.0);
            col_idx.extend(row.iter().map(|e| e.0));
            values.extend(row.iter().map(|e| e.1));
            row_ptr.push(col_idx.len() as u32);
        }
        Self::new(self.n_rows, self.n_cols, row_ptr, col_idx, values)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c as usize] = v;
            }
        }
        d
    }

    /// Storage bytes of the three CRS arrays.
    pub fn storage_bytes(&self) -> u64 {
        12 * self.nnz() as u64 + 4 * (self.n_rows as u64 + 1)
    }
}

/// `perm` must contain every index below `n` exactly once.
pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::domain(format!("not a permutation: index {p} repeated or out of range")));
        }
    }
    Ok(())
}
