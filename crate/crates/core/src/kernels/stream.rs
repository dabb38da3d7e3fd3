use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::trace::{AddressSpace, Trace};
use crate::cache::{AccessKind, TraceSink};
use crate::error::{Error, Result};

/// Streaming micro-kernels over 8-byte elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamKernelKind {
    /// `s += a[i]`
    LoadOnly,
    /// `a[i] = b[i]`
    Copy,
    /// `a[i] = s * a[i]`
    Update,
    /// `a[i] = b[i] + s * c[i]`
    Triad { nt: bool },
}

impl StreamKernelKind {
    /// Number of distinct arrays the kernel touches.
    pub fn arrays(&self) -> usize {
        match self {
            StreamKernelKind::LoadOnly | StreamKernelKind::Update => 1,
            StreamKernelKind::Copy => 2,
            StreamKernelKind::Triad { .. } => 3,
        }
    }

    /// Bytes per iteration the kernel itself reads and writes (no hidden
    /// write-allocate traffic).
    pub fn application_bytes(&self) -> u64 {
        match self {
            StreamKernelKind::LoadOnly => 8,
            StreamKernelKind::Copy | StreamKernelKind::Update => 16,
            StreamKernelKind::Triad { .. } => 24,
        }
    }
}

impl fmt::Display for StreamKernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamKernelKind::LoadOnly => "load",
            StreamKernelKind::Copy => "copy",
            StreamKernelKind::Update => "update",
            StreamKernelKind::Triad { nt: false } => "triad",
            StreamKernelKind::Triad { nt: true } => "triad-nt",
        })
    }
}

impl FromStr for StreamKernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "load" | "load-only" | "loadonly" => StreamKernelKind::LoadOnly,
            "copy" => StreamKernelKind::Copy,
            "update" => StreamKernelKind::Update,
            "triad" => StreamKernelKind::Triad { nt: false },
            "triad-nt" => StreamKernelKind::Triad { nt: true },
            _ => {
                return Err(Error::Unknown {
                    what: "stream pattern",
                    name: s.to_string(),
                })
            }
        })
    }
}

/// Base addresses of the arrays `a`, `b`, `c`. Unused arrays are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamBases {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl StreamBases {
    /// Page-aligned, back-to-back arrays of `n` elements.
    pub fn packed(kind: StreamKernelKind, n: u64) -> Self {
        let mut space = AddressSpace::new();
        let a = space.alloc(8 * n);
        let b = if kind.arrays() >= 2 { space.alloc(8 * n) } else { 0 };
        let c = if kind.arrays() >= 3 { space.alloc(8 * n) } else { 0 };
        StreamBases { a, b, c }
    }

    fn check(&self, kind: StreamKernelKind, n: u64) -> Result<()> {
        let len = 8 * n;
        let used: &[(char, u64)] = match kind {
            StreamKernelKind::LoadOnly | StreamKernelKind::Update => &[('a', self.a)],
            StreamKernelKind::Copy => &[('a', self.a), ('b', self.b)],
            StreamKernelKind::Triad { .. } => &[('a', self.a), ('b', self.b), ('c', self.c)],
        };
        for (i, &(x, xb)) in used.iter().enumerate() {
            for &(y, yb) in &used[i + 1..] {
                if xb < yb + len && yb < xb + len {
                    return Err(Error::domain(format!("stream arrays `{x}` and `{y}` overlap")));
                }
            }
        }
        Ok(())
    }
}

/// Emits the scalar access sequence of a stream kernel over `n` elements.
pub fn emit_stream<S: TraceSink + ?Sized>(kind: StreamKernelKind, n: u64, bases: &StreamBases, sink: &mut S) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("stream kernel needs at least one element"));
    }
    bases.check(kind, n)?;
    let StreamBases { a, b, c } = *bases;
    match kind {
        StreamKernelKind::LoadOnly => {
            for i in 0..n {
                sink.load(a + 8 * i);
            }
        }
        StreamKernelKind::Copy => {
            for i in 0..n {
                sink.load(b + 8 * i);
                sink.store(a + 8 * i);
            }
        }
        StreamKernelKind::Update => {
            for i in 0..n {
                sink.load(a + 8 * i);
                sink.store(a + 8 * i);
            }
        }
        StreamKernelKind::Triad { nt } => {
            let st = if nt { AccessKind::StoreNt } else { AccessKind::Store };
            for i in 0..n {
                sink.load(b + 8 * i);
                sink.load(c + 8 * i);
                sink.access(a + 8 * i, st);
            }
        }
    }
    Ok(())
}

pub fn gen_stream_trace(kind: StreamKernelKind, n: u64, bases: &StreamBases) -> Result<Trace> {
    let mut t = Trace::new(n);
    t.accesses.reserve(n as usize * (kind.arrays() + usize::from(kind != StreamKernelKind::LoadOnly)));
    emit_stream(kind, n, bases, &mut t)?;
    Ok(t)
}

/// Execute mode: runs the kernel on real data. Returns the load-only sum
/// (0 for the other kernels).
pub fn run_stream(kind: StreamKernelKind, a: &mut [f64], b: &[f64], c: &[f64], s: f64) -> f64 {
    match kind {
        StreamKernelKind::LoadOnly => a.iter().sum(),
        StreamKernelKind::Copy => {
            a.copy_from_slice(&b[..a.len()]);
            0.0
        }
        StreamKernelKind::Update => {
            a.iter_mut().for_each(|x| *x *= s);
            0.0
        }
        StreamKernelKind::Triad { .. } => {
            for ((ai, bi), ci) in a.iter_mut().zip(b).zip(c) {
                *ai = bi + s * ci;
            }
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triad_access_order() {
        let bases = StreamBases { a: 0, b: 1 << 20, c: 2 << 20 };
        let t = gen_stream_trace(StreamKernelKind::Triad { nt: true }, 2, &bases).unwrap();
        let kinds: Vec<_> = t.accesses.iter().map(|a| (a.addr, a.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                (1 << 20, AccessKind::Load),
                (2 << 20, AccessKind::Load),
                (0, AccessKind::StoreNt),
                ((1 << 20) + 8, AccessKind::Load),
                ((2 << 20) + 8, AccessKind::Load),
                (8, AccessKind::StoreNt),
            ]
        );
    }

    #[test]
    fn overlapping_arrays_rejected() {
        let bases = StreamBases { a: 0, b: 8, c: 1 << 20 };
        assert!(gen_stream_trace(StreamKernelKind::Copy, 4, &bases).is_err());
        // update only touches `a`
        assert!(gen_stream_trace(StreamKernelKind::Update, 4, &bases).is_ok());
        assert!(gen_stream_trace(StreamKernelKind::LoadOnly, 0, &bases).is_err());
    }

    #[test]
    fn counts_per_kind() {
        for kind in [
            StreamKernelKind::LoadOnly,
            StreamKernelKind::Copy,
            StreamKernelKind::Update,
            StreamKernelKind::Triad { nt: false },
        ] {
            let t = gen_stream_trace(kind, 100, &StreamBases::packed(kind, 100)).unwrap();
            let bytes = 8 * t.len() as u64;
            assert_eq!(bytes, 100 * kind.application_bytes(), "{kind}");
        }
    }

    #[test]
    fn execute_mode() {
        let mut a = vec![1.0; 4];
        let b = vec![2.0; 4];
        let c = vec![3.0; 4];
        run_stream(StreamKernelKind::Triad { nt: false }, &mut a, &b, &c, 2.0);
        assert_eq!(a, vec![8.0; 4]);
        assert_eq!(run_stream(StreamKernelKind::LoadOnly, &mut a, &b, &c, 0.0), 32.0);
    }

    #[test]
    fn parse_patterns() {
        assert_eq!("load".parse::<StreamKernelKind>().unwrap(), StreamKernelKind::LoadOnly);
        assert_eq!("triad-nt".parse::<StreamKernelKind>().unwrap(), StreamKernelKind::Triad { nt: true });
        assert!("scale".parse::<StreamKernelKind>().is_err());
    }
}
