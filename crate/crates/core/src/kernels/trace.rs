use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::cache::{Access, AccessKind, TraceSink};
use crate::error::{Error, Result};

/// Bytes per record in the binary trace format: little-endian `u64`
/// address followed by one kind byte (0 load, 1 store, 2 NT store).
pub const RECORD_BYTES: usize = 9;

/// A recorded address stream plus the amount of work it represents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub accesses: Vec<Access>,
    pub work_count: u64,
}

impl Trace {
    pub fn new(work_count: u64) -> Self {
        Trace {
            accesses: Vec::new(),
            work_count,
        }
    }

    pub fn len(&self) -> usize {
        self.accesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accesses.is_empty()
    }

    pub fn count(&self, kind: AccessKind) -> usize {
        self.accesses.iter().filter(|a| a.kind == kind).count()
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut rec = [0u8; RECORD_BYTES];
        for a in &self.accesses {
            rec[..8].copy_from_slice(&a.addr.to_le_bytes());
            rec[8] = a.kind.to_byte();
            w.write_all(&rec)?;
        }
        w.flush()
    }

    /// Reads records until end of input. `name` only labels errors.
    pub fn read_binary<R: Read>(mut r: R, name: &str) -> Result<Vec<Access>> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf).map_err(|e| Error::io(name, e))?;
        if buf.len() % RECORD_BYTES != 0 {
            return Err(Error::Parse {
                path: name.to_string(),
                line: buf.len() / RECORD_BYTES + 1,
                msg: format!("truncated record ({} trailing bytes)", buf.len() % RECORD_BYTES),
            });
        }
        buf.chunks_exact(RECORD_BYTES)
            .enumerate()
            .map(|(i, rec)| {
                let addr = u64::from_le_bytes(rec[..8].try_into().expect("8-byte slice"));
                let kind = AccessKind::from_byte(rec[8]).ok_or_else(|| Error::Parse {
                    path: name.to_string(),
                    line: i + 1,
                    msg: format!("unknown access kind byte {}", rec[8]),
                })?;
                Ok(Access { addr, kind })
            })
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(BufWriter::new(f)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, work_count: u64) -> Result<Trace> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let accesses = Self::read_binary(BufReader::new(f), &path.display().to_string())?;
        Ok(Trace { accesses, work_count })
    }
}

impl TraceSink for Trace {
    #[inline]
    fn access(&mut self, addr: u64, kind: AccessKind) {
        self.accesses.push(Access { addr, kind });
    }
}

/// Counts accesses per kind without storing them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AccessCounter {
    pub loads: u64,
    pub stores: u64,
    pub nt_stores: u64,
}

impl TraceSink for AccessCounter {
    #[inline]
    fn access(&mut self, _addr: u64, kind: AccessKind) {
        match kind {
            AccessKind::Load => self.loads += 1,
            AccessKind::Store => self.stores += 1,
            AccessKind::StoreNt => self.nt_stores += 1,
        }
    }
}

/// Page size used to align simulated arrays.
pub const PAGE: u64 = 4096;

/// Bump allocator for simulated array base addresses. Arrays start on
/// page boundaries and never overlap.
#[derive(Debug, Clone)]
pub struct AddressSpace {
    next: u64,
}

impl Default for AddressSpace {
    fn default() -> Self {
        AddressSpace { next: 1 << 24 }
    }
}

impl AddressSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alloc(&mut self, bytes: u64) -> u64 {
        let base = self.next;
        self.next = (base + bytes.max(1)).div_ceil(PAGE) * PAGE;
        base
    }

    /// Array of `len` 8-byte reals.
    pub fn alloc_f64(&mut self, len: usize) -> u64 {
        self.alloc(8 * len as u64)
    }
}
