//! MatrixMarket coordinate-format reader.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::crs::SparseMatrixCrs;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn load_matrix_market(path: &Path) -> Result<SparseMatrixCrs> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(BufReader::new(f), &path.display().to_string())
}

/// Parses a coordinate-format matrix. Symmetric and skew-symmetric files
/// are expanded to full storage; duplicate entries are summed. `name`
/// labels error messages.
pub fn parse_matrix_market<R: BufRead>(reader: R, name: &str) -> Result<SparseMatrixCrs> {
    let err = |line: usize, msg: String| Error::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (ln, header) = match lines.next() {
        Some((ln, Ok(h))) => (ln, h),
        Some((ln, Err(e))) => return Err(err(ln, e.to_string())),
        None => return Err(err(1, "empty file".into())),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(ln, format!("bad header `{header}`")));
    }
    if tokens[2] != "coordinate" {
        return Err(err(ln, format!("unsupported format `{}` (only coordinate)", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" | "integer" => Field::Real,
        "pattern" => Field::Pattern,
        other => return Err(err(ln, format!("unsupported field `{other}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" | "hermitian" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(err(ln, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = 0usize;
    for (ln, line) in lines {
        let line = line.map_err(|e| err(ln, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut parts = t.split_whitespace();
        let Some((rows, cols, nnz)) = size else {
            let nums: Vec<usize> = parts
                .map(|p| p.parse::<usize>().map_err(|_| err(ln, format!("bad size token `{p}`"))))
                .collect::<Result<_>>()?;
            if nums.len() != 3 {
                return Err(err(ln, format!("size line needs 3 integers, got {}", nums.len())));
            }
            size = Some((nums[0], nums[1], nums[2]));
            entries.reserve(if symmetry == Symmetry::General { nums[2] } else { 2 * nums[2] });
            continue;
        };
        let mut index = |what: &str, bound: usize| -> Result<usize> {
            let tok = parts.next().ok_or_else(|| err(ln, format!("missing {what} index")))?;
            let v: usize = tok.parse().map_err(|_| err(ln, format!("bad {what} index `{tok}`")))?;
            if v == 0 || v > bound {
                return Err(err(ln, format!("{what} index {v} out of range 1..={bound}")));
            }
            Ok(v - 1)
        };
        let i = index("row", rows)?;
        let j = index("column", cols)?;
        let v = match field {
            Field::Pattern => 1.0,
            Field::Real => {
                let tok = parts.next().ok_or_else(|| err(ln, "missing value".into()))?;
                tok.parse::<f64>().map_err(|_| err(ln, format!("bad value `{tok}`")))?
            }
        };
        if parts.next().is_some() {
            return Err(err(ln, "trailing tokens after entry".into()));
        }
        seen += 1;
        if seen > nnz {
            return Err(err(ln, format!("more entries than the declared {nnz}")));
        }
        entries.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => entries.push((j, i, v)),
                Symmetry::SkewSymmetric => entries.push((j, i, -v)),
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| err(1, "missing size line".into()))?;
    if seen != nnz {
        return Err(err(0, format!("declared {nnz} entries but found {seen}")));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(0, format!("symmetric matrix must be square, got {rows}x{cols}")));
    }
    SparseMatrixCrs::from_triplets(rows, cols, entries)
}
