use serde::{Deserialize, Serialize};

use super::config::{CacheConfig, Inclusion};
use super::policy::{policy_for, ReplacementPolicy};

const INVALID: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub hits: u64,
    pub misses: u64,
}

/// A line pushed out of a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evicted {
    pub line: u64,
    pub dirty: bool,
}

/// One set-associative level. Tags are full line addresses.
pub struct CacheLevel {
    config: CacheConfig,
    sets: usize,
    ways: usize,
    pow2: bool,
    tags: Vec<u64>,
    dirty: Vec<bool>,
    policy: Box<dyn ReplacementPolicy>,
    stats: LevelStats,
}

impl std::fmt::Debug for CacheLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CacheLevel")
            .field("config", &self.config)
            .field("stats", &self.stats)
            .finish_non_exhaustive()
    }
}

impl CacheLevel {
    /// `config` must already be validated.
    pub fn new(config: CacheConfig) -> Self {
        let sets = config.sets() as usize;
        let ways = config.ways as usize;
        let policy = policy_for(&config, sets);
        CacheLevel {
            pow2: sets.is_power_of_two(),
            tags: vec![INVALID; sets * ways],
            dirty: vec![false; sets * ways],
            sets,
            ways,
            policy,
            config,
            stats: LevelStats::default(),
        }
    }

    pub fn config(&self) -> &CacheConfig {
        &self.config
    }

    pub fn stats(&self) -> LevelStats {
        self.stats
    }

    pub fn is_victim(&self) -> bool {
        self.config.inclusion == Inclusion::VictimNoninclusive
    }

    #[inline]
    pub fn set_of(&self, line: u64) -> usize {
        if self.pow2 {
            (line as usize) & (self.sets - 1)
        } else {
            (line % self.sets as u64) as usize
        }
    }

    #[inline]
    fn find(&self, line: u64) -> Option<(usize, usize)> {
        let set = self.set_of(line);
        let base = set * self.ways;
        self.tags[base..base + self.ways]
            .iter()
            .position(|&t| t == line)
            .map(|w| (set, w))
    }

    pub fn contains(&self, line: u64) -> bool {
        self.find(line).is_some()
    }

    /// Counted lookup. On a hit the policy is updated (possibly moving the
    /// line to another way) and `true` is returned.
    pub fn lookup(&mut self, line: u64, store: bool) -> bool {
        match self.find(line) {
            Some((set, way)) => {
                self.stats.hits += 1;
                let mut way = way;
                if let Some(target) = self.policy.on_hit(set, way) {
                    let (a, b) = (set * self.ways + way, set * self.ways + target);
                    self.tags.swap(a, b);
                    self.dirty.swap(a, b);
                    way = target;
                }
                if store {
                    self.dirty[set * self.ways + way] = true;
                }
                true
            }
            None => {
                self.stats.misses += 1;
                let set = self.set_of(line);
                self.policy.on_miss(set);
                false
            }
        }
    }

    /// Inserts a line not currently present; returns the displaced line.
    pub fn fill(&mut self, line: u64, dirty: bool) -> Option<Evicted> {
        debug_assert!(!self.contains(line));
        let set = self.set_of(line);
        let base = set * self.ways;
        let (way, evicted) = match self.tags[base..base + self.ways].iter().position(|&t| t == INVALID) {
            Some(w) => (w, None),
            None => {
                let w = self.policy.victim(set);
                let ev = Evicted {
                    line: self.tags[base + w],
                    dirty: self.dirty[base + w],
                };
                (w, Some(ev))
            }
        };
        self.tags[base + way] = line;
        self.dirty[base + way] = dirty;
        self.policy.on_fill(set, way);
        evicted
    }

    /// Drops the line if present, returning its dirty flag.
    pub fn invalidate(&mut self, line: u64) -> Option<bool> {
        let (set, way) = self.find(line)?;
        let idx = set * self.ways + way;
        self.tags[idx] = INVALID;
        let d = std::mem::take(&mut self.dirty[idx]);
        self.policy.on_invalidate(set, way);
        Some(d)
    }

    /// Marks a resident line dirty without touching recency or stats.
    pub fn mark_dirty(&mut self, line: u64) -> bool {
        match self.find(line) {
            Some((set, way)) => {
                self.dirty[set * self.ways + way] = true;
                true
            }
            None => false,
        }
    }

    /// Cleans every dirty line, returning their addresses.
    pub fn take_dirty(&mut self) -> Vec<u64> {
        let mut out = Vec::new();
        for (t, d) in self.tags.iter().zip(self.dirty.iter_mut()) {
            if *d {
                out.push(*t);
                *d = false;
            }
        }
        out
    }

    pub fn resident_lines(&self) -> impl Iterator<Item = u64> + '_ {
        self.tags.iter().copied().filter(|&t| t != INVALID)
    }

    /// Ways of one set, `None` for invalid entries.
    pub fn set_contents(&self, set: usize) -> Vec<Option<u64>> {
        self.tags[set * self.ways..(set + 1) * self.ways]
            .iter()
            .map(|&t| (t != INVALID).then_some(t))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::{Level, PolicyKind};

    fn level(sets: u64, ways: u32, policy: PolicyKind) -> CacheLevel {
        CacheLevel::new(CacheConfig::new(Level::L1, sets * u64::from(ways) * 64, ways, policy))
    }

    #[test]
    fn fills_invalid_ways_before_evicting() {
        let mut l = level(1, 4, PolicyKind::TrueLru);
        for line in 0..4 {
            assert!(!l.lookup(line, false));
            assert_eq!(l.fill(line, false), None);
        }
        assert_eq!(l.fill(4, false), Some(Evicted { line: 0, dirty: false }));
        assert_eq!(l.stats(), LevelStats { hits: 0, misses: 4 });
    }

    #[test]
    fn dirty_tracking() {
        let mut l = level(2, 2, PolicyKind::TreePlru);
        l.fill(2, false);
        assert!(l.lookup(2, true));
        assert_eq!(l.invalidate(2), Some(true));
        assert_eq!(l.invalidate(2), None);
        l.fill(4, false);
        assert!(l.mark_dirty(4));
        assert_eq!(l.take_dirty(), vec![4]);
        assert!(l.take_dirty().is_empty());
    }

    #[test]
    fn stream_one_way_hit_moves_line_out_of_way_zero() {
        let mut l = level(1, 4, PolicyKind::StreamOneWay);
        for line in 0..4 {
            l.fill(line, false);
        }
        // set full: a new line replaces way 0
        assert_eq!(l.fill(10, false).unwrap().line, 0);
        assert_eq!(l.set_contents(0)[0], Some(10));
        assert!(l.lookup(10, false));
        assert_ne!(l.set_contents(0)[0], Some(10));
        assert!(l.contains(10));
    }
}
