use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Byte widths of the CRS arrays and dense vector entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrsLayout {
    pub value_bytes: u32,
    pub index_bytes: u32,
}

impl Default for CrsLayout {
    fn default() -> Self {
        CrsLayout {
            value_bytes: 8,
            index_bytes: 4,
        }
    }
}

impl CrsLayout {
    fn per_nnz(&self) -> f64 {
        f64::from(self.value_bytes + self.index_bytes)
    }

    /// Per-row traffic outside the matrix entries: one x element, the y
    /// element stored with its write-allocate, and one row pointer.
    fn per_row(&self) -> f64 {
        f64::from(3 * self.value_bytes + self.index_bytes)
    }
}

/// Kernels with a known minimum code balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    /// Average over HPCG's three dot products (two with two input
    /// vectors, one norm).
    DotHpcgAvg,
    /// `w = a*x + b*y` with `w` aliasing `x`: one load, one load+store.
    Waxpby,
    Spmv { nnzr: f64 },
    SymgsSweep { nnzr: f64 },
    /// Finest-grid MG: two symGS (forward+backward each) and one SpMV.
    MgFinest { nnzr: f64 },
    StreamTriad { nt: bool },
    /// Repeated SpMV traffic per nonzero (bytes/nnz, not bytes/row).
    SpmpvPerNnz { nnzr: f64 },
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::DotHpcgAvg => "dot",
            KernelKind::Waxpby => "waxpby",
            KernelKind::Spmv { .. } => "spmv",
            KernelKind::SymgsSweep { .. } => "symgs",
            KernelKind::MgFinest { .. } => "mg",
            KernelKind::StreamTriad { .. } => "triad",
            KernelKind::SpmpvPerNnz { .. } => "spmpv",
        }
    }

    /// Rebuilds a kernel kind from its name plus the parameters it needs.
    pub fn from_name(name: &str, nnzr: Option<f64>, nt: bool) -> Result<Self> {
        let need = |n: Option<f64>| {
            n.ok_or_else(|| Error::domain(format!("kernel `{name}` needs a nonzeros-per-row value")))
        };
        Ok(match name.to_ascii_lowercase().as_str() {
            "dot" | "ddot" => KernelKind::DotHpcgAvg,
            "waxpby" => KernelKind::Waxpby,
            "spmv" => KernelKind::Spmv { nnzr: need(nnzr)? },
            "symgs" => KernelKind::SymgsSweep { nnzr: need(nnzr)? },
            "mg" => KernelKind::MgFinest { nnzr: need(nnzr)? },
            "triad" | "stream" => KernelKind::StreamTriad { nt },
            "spmpv" => KernelKind::SpmpvPerNnz { nnzr: need(nnzr)? },
            _ => {
                return Err(Error::Unknown {
                    what: "kernel",
                    name: name.to_string(),
                })
            }
        })
    }

    fn nnzr(&self) -> Option<f64> {
        match *self {
            KernelKind::Spmv { nnzr }
            | KernelKind::SymgsSweep { nnzr }
            | KernelKind::MgFinest { nnzr }
            | KernelKind::SpmpvPerNnz { nnzr } => Some(nnzr),
            _ => None,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.nnzr() {
            Some(n) => write!(f, "{}({n})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    /// Accepts `dot`, `waxpby`, `triad`, `triad-nt`, and `spmv:27` style
    /// names for the sparse kernels.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        if name.eq_ignore_ascii_case("triad-nt") {
            return Ok(KernelKind::StreamTriad { nt: true });
        }
        let nnzr = arg
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad nonzeros-per-row `{a}`")))
            })
            .transpose()?;
        KernelKind::from_name(name, nnzr, false)
    }
}

/// Minimum code balance with the default CRS layout (8-byte values, 4-byte
/// indices).
pub fn code_balance(kind: KernelKind) -> Result<f64> {
    code_balance_with(kind, CrsLayout::default())
}

pub fn code_balance_with(kind: KernelKind, layout: CrsLayout) -> Result<f64> {
    if let Some(n) = kind.nnzr() {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::domain(format!("nonzeros per row must be >= 1, got {n}")));
        }
    }
    let v = f64::from(layout.value_bytes);
    Ok(match kind {
        KernelKind::DotHpcgAvg => (2.0 * 2.0 * v + v) / 3.0,
        KernelKind::Waxpby => 3.0 * v,
        KernelKind::Spmv { nnzr } | KernelKind::SymgsSweep { nnzr } => layout.per_nnz() * nnzr + layout.per_row(),
        KernelKind::MgFinest { nnzr } => 5.0 * (layout.per_nnz() * nnzr + layout.per_row()),
        KernelKind::StreamTriad { nt: true } => 3.0 * v,
        KernelKind::StreamTriad { nt: false } => 4.0 * v,
        KernelKind::SpmpvPerNnz { nnzr } => layout.per_nnz() + layout.per_row() / nnzr,
    })
}

/// Bytes occupied by a CRS matrix plus `n_vectors` dense vectors of length
/// `n_rows`.
pub fn crs_footprint(n_rows: u64, n_nz: u64, n_vectors: u64) -> Result<u64> {
    crs_footprint_with(n_rows, n_nz, n_vectors, CrsLayout::default())
}

pub fn crs_footprint_with(n_rows: u64, n_nz: u64, n_vectors: u64, layout: CrsLayout) -> Result<u64> {
    if n_rows == 0 || n_nz == 0 {
        return Err(Error::domain("footprint needs at least one row and one nonzero"));
    }
    let v = u64::from(layout.value_bytes);
    let i = u64::from(layout.index_bytes);
    Ok((v + i) * n_nz + i * (n_rows + 1) + v * n_vectors * n_rows)
}
