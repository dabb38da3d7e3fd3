use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::config::CacheConfig;
use super::level::{CacheLevel, Evicted};
use super::report::{LevelReport, TrafficReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessKind {
    Load,
    /// Regular store: a miss allocates the line (write-allocate).
    Store,
    /// Non-temporal store: bypasses the caches through write-combining.
    StoreNt,
}

impl AccessKind {
    pub fn to_byte(self) -> u8 {
        match self {
            AccessKind::Load => 0,
            AccessKind::Store => 1,
            AccessKind::StoreNt => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(AccessKind::Load),
            1 => Some(AccessKind::Store),
            2 => Some(AccessKind::StoreNt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Access {
    pub addr: u64,
    pub kind: AccessKind,
}

/// Anything that consumes an address stream: a simulator, a recorded
/// trace, a counter.
pub trait TraceSink {
    fn access(&mut self, addr: u64, kind: AccessKind);

    #[inline]
    fn load(&mut self, addr: u64) {
        self.access(addr, AccessKind::Load);
    }

    #[inline]
    fn store(&mut self, addr: u64) {
        self.access(addr, AccessKind::Store);
    }
}

impl TraceSink for Vec<Access> {
    fn access(&mut self, addr: u64, kind: AccessKind) {
        self.push(Access { addr, kind });
    }
}

/// Where an access was served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Hit in the level with this index (0 = L1).
    Hit(usize),
    /// Missed everywhere and was fetched from memory.
    Memory,
    /// Non-temporal store, no cache level involved.
    Bypass,
}

/// Write-combining buffers in front of memory for non-temporal stores.
/// A line costs one full line write when a buffer is allocated for it.
#[derive(Debug, Clone)]
struct WriteCombiner {
    capacity: usize,
    lines: VecDeque<u64>,
}

impl WriteCombiner {
    fn new(capacity: usize) -> Self {
        WriteCombiner {
            capacity,
            lines: VecDeque::with_capacity(capacity),
        }
    }

    /// Returns true if a new buffer had to be allocated.
    fn write(&mut self, line: u64) -> bool {
        if self.lines.contains(&line) {
            return false;
        }
        if self.lines.len() == self.capacity {
            self.lines.pop_front();
        }
        self.lines.push_back(line);
        true
    }
}

/// Default number of write-combining buffers.
pub const WC_BUFFERS: usize = 12;

/// Multi-level cache hierarchy, L1 first. Levels other than the last are
/// ordinary fill-on-miss caches; the last may be inclusive or a victim
/// cache fed by evictions from the level before it.
#[derive(Debug)]
pub struct CacheHierarchy {
    levels: Vec<CacheLevel>,
    line_shift: u32,
    line_size: u64,
    bytes_read: u64,
    bytes_written: u64,
    wc: WriteCombiner,
}

impl CacheHierarchy {
    pub fn new(configs: &[CacheConfig]) -> Result<Self> {
        if configs.is_empty() {
            return Err(Error::Geometry("hierarchy needs at least one level".into()));
        }
        for c in configs {
            c.validate()?;
        }
        let line_size = configs[0].line_size;
        for (i, w) in configs.windows(2).enumerate() {
            if w[1].level <= w[0].level {
                return Err(Error::Geometry(format!(
                    "levels must be ordered L1 -> L3, got {} after {}",
                    w[1].level, w[0].level
                )));
            }
            if w[1].capacity <= w[0].capacity {
                return Err(Error::Geometry(format!(
                    "{} capacity {} must exceed {} capacity {} (level {})",
                    w[1].level,
                    w[1].capacity,
                    w[0].level,
                    w[0].capacity,
                    i + 1
                )));
            }
        }
        if configs.iter().any(|c| c.line_size != line_size) {
            return Err(Error::Geometry("all levels must share one line size".into()));
        }
        let last = configs.len() - 1;
        for (i, c) in configs.iter().enumerate() {
            if c.inclusion == super::Inclusion::VictimNoninclusive && (i != last || i == 0) {
                return Err(Error::Geometry(format!(
                    "{}: only the last level of a multi-level hierarchy can be a victim cache",
                    c.level
                )));
            }
        }
        Ok(CacheHierarchy {
            levels: configs.iter().cloned().map(CacheLevel::new).collect(),
            line_shift: line_size.trailing_zeros(),
            line_size: u64::from(line_size),
            bytes_read: 0,
            bytes_written: 0,
            wc: WriteCombiner::new(WC_BUFFERS),
        })
    }

    pub fn levels(&self) -> &[CacheLevel] {
        &self.levels
    }

    pub fn line_size(&self) -> u64 {
        self.line_size
    }

    pub fn configs(&self) -> Vec<CacheConfig> {
        self.levels.iter().map(|l| l.config().clone()).collect()
    }

    pub fn bytes_read_mem(&self) -> u64 {
        self.bytes_read
    }

    pub fn bytes_written_mem(&self) -> u64 {
        self.bytes_written
    }

    pub fn line_of(&self, addr: u64) -> u64 {
        addr >> self.line_shift
    }

    /// Simulates one access.
    pub fn access(&mut self, addr: u64, kind: AccessKind) -> Outcome {
        let line = addr >> self.line_shift;
        if kind == AccessKind::StoreNt {
            // the full line is overwritten, cached copies are stale
            for l in &mut self.levels {
                l.invalidate(line);
            }
            if self.wc.write(line) {
                self.bytes_written += self.line_size;
            }
            return Outcome::Bypass;
        }
        let store = kind == AccessKind::Store;

        let mut found = None;
        for (i, lvl) in self.levels.iter_mut().enumerate() {
            if lvl.lookup(line, store && i == 0) {
                found = Some(i);
                break;
            }
        }

        let n = self.levels.len();
        let (fill_below, mut carried_dirty) = match found {
            Some(0) => return Outcome::Hit(0),
            Some(h) if self.levels[h].is_victim() => {
                let d = self.levels[h].invalidate(line).unwrap_or(false);
                (h, d)
            }
            Some(h) => (h, false),
            None => {
                self.bytes_read += self.line_size;
                (n, false)
            }
        };

        // outermost first so inclusive back-invalidation precedes inner fills
        for i in (0..fill_below).rev() {
            if self.levels[i].is_victim() {
                continue;
            }
            let dirty = std::mem::take(&mut carried_dirty) || (store && i == 0);
            if let Some(ev) = self.levels[i].fill(line, dirty) {
                self.evict(i, ev);
            }
        }
        found.map_or(Outcome::Memory, Outcome::Hit)
    }

    fn evict(&mut self, from: usize, ev: Evicted) {
        let mut dirty = ev.dirty;
        if !self.levels[from].is_victim() {
            for inner in &mut self.levels[..from] {
                if let Some(d) = inner.invalidate(ev.line) {
                    dirty |= d;
                }
            }
        }
        let next = from + 1;
        if next < self.levels.len() && self.levels[next].is_victim() {
            if let Some(ev2) = self.levels[next].fill(ev.line, dirty) {
                self.evict(next, ev2);
            }
        } else if dirty {
            self.write_back(from, ev.line);
        }
    }

    fn write_back(&mut self, from: usize, line: u64) {
        for outer in &mut self.levels[from + 1..] {
            if outer.mark_dirty(line) {
                return;
            }
        }
        self.bytes_written += self.line_size;
    }

    /// Writes every dirty line back to memory; lines stay resident and clean.
    pub fn flush(&mut self) {
        let mut dirty: HashSet<u64> = HashSet::new();
        for l in &mut self.levels {
            dirty.extend(l.take_dirty());
        }
        self.bytes_written += dirty.len() as u64 * self.line_size;
    }

    fn snapshot(&self) -> Vec<(u64, u64)> {
        self.levels.iter().map(|l| (l.stats().hits, l.stats().misses)).collect()
    }

    fn report_since(&self, before: &[(u64, u64)], read0: u64, written0: u64, work_count: Option<u64>) -> TrafficReport {
        let levels = self
            .levels
            .iter()
            .zip(before)
            .map(|(l, (h0, m0))| LevelReport {
                level: l.config().level,
                hits: l.stats().hits - h0,
                misses: l.stats().misses - m0,
            })
            .collect();
        TrafficReport {
            levels,
            line_size: self.line_size,
            bytes_read_mem: self.bytes_read - read0,
            bytes_written_mem: self.bytes_written - written0,
            work_count,
        }
    }

    /// Runs `f` against the hierarchy and reports the traffic it caused.
    /// Lines left dirty at the end are written back and charged to the
    /// report.
    pub fn measure<F>(&mut self, work_count: Option<u64>, f: F) -> TrafficReport
    where
        F: FnOnce(&mut Self),
    {
        let before = self.snapshot();
        let (r0, w0) = (self.bytes_read, self.bytes_written);
        f(self);
        self.flush();
        self.report_since(&before, r0, w0, work_count)
    }

    /// Replays a recorded trace; see [`CacheHierarchy::measure`].
    pub fn run_trace(&mut self, trace: &[Access], work_count: Option<u64>) -> TrafficReport {
        self.measure(work_count, |h| {
            for a in trace {
                h.access(a.addr, a.kind);
            }
        })
    }
}

impl TraceSink for CacheHierarchy {
    #[inline]
    fn access(&mut self, addr: u64, kind: AccessKind) {
        CacheHierarchy::access(self, addr, kind);
    }
}
