//! Replacement policies.
//!
//! A policy only tracks recency/selection state; the owning
//! [`CacheLevel`](super::CacheLevel) stores tags, fills invalid ways first
//! (lowest index) and asks the policy for a victim only when a set is full.

use super::config::{CacheConfig, PolicyKind};

pub trait ReplacementPolicy: Send {
    /// A lookup hit `way`. Returning `Some(target)` asks the cache to swap
    /// the contents of `way` and `target` (the hit line ends up in `target`).
    fn on_hit(&mut self, set: usize, way: usize) -> Option<usize>;

    /// A new line was placed in `way`.
    fn on_fill(&mut self, set: usize, way: usize);

    /// Way to evict from a full set.
    fn victim(&mut self, set: usize) -> usize;

    /// A lookup in `set` missed.
    fn on_miss(&mut self, _set: usize) {}

    fn on_invalidate(&mut self, _set: usize, _way: usize) {}
}

/// Builds the policy state for a level with `sets` sets.
pub fn policy_for(config: &CacheConfig, sets: usize) -> Box<dyn ReplacementPolicy> {
    let ways = config.ways as usize;
    match config.policy {
        PolicyKind::TrueLru => Box::new(TrueLru::new(sets, ways)),
        PolicyKind::TreePlru => Box::new(TreePlru::new(sets, ways)),
        PolicyKind::StreamOneWay => Box::new(StreamOneWay::new(sets, ways)),
        PolicyKind::AdaptiveDueling => Box::new(AdaptiveDueling::new(
            sets,
            ways,
            config.dueling.leader_sets as usize,
            config.dueling.psel_bits,
        )),
    }
}

/// Exact LRU using per-line access stamps.
#[derive(Debug, Clone)]
pub struct TrueLru {
    ways: usize,
    stamps: Vec<u64>,
    clock: u64,
}

impl TrueLru {
    pub fn new(sets: usize, ways: usize) -> Self {
        TrueLru {
            ways,
            stamps: vec![0; sets * ways],
            clock: 0,
        }
    }

    fn touch(&mut self, set: usize, way: usize) {
        self.clock += 1;
        self.stamps[set * self.ways + way] = self.clock;
    }
}

impl ReplacementPolicy for TrueLru {
    fn on_hit(&mut self, set: usize, way: usize) -> Option<usize> {
        self.touch(set, way);
        None
    }

    fn on_fill(&mut self, set: usize, way: usize) {
        self.touch(set, way);
    }

    fn victim(&mut self, set: usize) -> usize {
        let row = &self.stamps[set * self.ways..(set + 1) * self.ways];
        row.iter()
            .enumerate()
            .min_by_key(|(_, s)| **s)
            .map(|(w, _)| w)
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy)]
enum Child {
    Node(u8),
    Leaf(u8),
}

/// Shape of a binary decision tree over `leaves` leaves. Works for any
/// leaf count: a range splits into `floor(n/2)` and `ceil(n/2)` halves.
#[derive(Debug, Clone)]
struct TreeShape {
    nodes: Vec<[Child; 2]>,
    /// For each leaf, the (node, went_right) steps from the root.
    paths: Vec<Vec<(u8, bool)>>,
}

impl TreeShape {
    fn new(leaves: usize) -> Self {
        assert!((1..=64).contains(&leaves), "tree PLRU supports 1..=64 leaves");
        let mut shape = TreeShape {
            nodes: Vec::with_capacity(leaves.saturating_sub(1)),
            paths: vec![Vec::new(); leaves],
        };
        let mut path = Vec::new();
        shape.build(0, leaves, &mut path);
        shape
    }

    fn build(&mut self, lo: usize, hi: usize, path: &mut Vec<(u8, bool)>) -> Child {
        if hi - lo == 1 {
            self.paths[lo] = path.clone();
            return Child::Leaf(lo as u8);
        }
        let idx = self.nodes.len();
        self.nodes.push([Child::Leaf(0), Child::Leaf(0)]);
        let mid = lo + (hi - lo) / 2;
        path.push((idx as u8, false));
        let left = self.build(lo, mid, path);
        path.pop();
        path.push((idx as u8, true));
        let right = self.build(mid, hi, path);
        path.pop();
        self.nodes[idx] = [left, right];
        Child::Node(idx as u8)
    }

    /// Points every node on the leaf's path away from it.
    fn touch(&self, bits: &mut u64, leaf: usize) {
        for &(node, went_right) in &self.paths[leaf] {
            if went_right {
                *bits &= !(1u64 << node);
            } else {
                *bits |= 1u64 << node;
            }
        }
    }

    fn victim(&self, bits: u64) -> usize {
        if self.nodes.is_empty() {
            return 0;
        }
        let mut node = 0usize;
        loop {
            let dir = ((bits >> node) & 1) as usize;
            match self.nodes[node][dir] {
                Child::Node(n) => node = n as usize,
                Child::Leaf(l) => return l as usize,
            }
        }
    }
}

/// Per-set tree-PLRU bits over a contiguous range of ways starting at
/// `offset`.
#[derive(Debug, Clone)]
struct PlruBits {
    shape: TreeShape,
    bits: Vec<u64>,
    offset: usize,
}

impl PlruBits {
    fn new(sets: usize, leaves: usize, offset: usize) -> Self {
        PlruBits {
            shape: TreeShape::new(leaves),
            bits: vec![0; sets],
            offset,
        }
    }

    fn touch(&mut self, set: usize, way: usize) {
        self.shape.touch(&mut self.bits[set], way - self.offset);
    }

    fn victim(&self, set: usize) -> usize {
        self.shape.victim(self.bits[set]) + self.offset
    }
}

/// Tree pseudo-LRU. Non-power-of-two associativities use an unbalanced
/// tree.
#[derive(Debug, Clone)]
pub struct TreePlru {
    tree: PlruBits,
}

impl TreePlru {
    pub fn new(sets: usize, ways: usize) -> Self {
        TreePlru {
            tree: PlruBits::new(sets, ways, 0),
        }
    }
}

impl ReplacementPolicy for TreePlru {
    fn on_hit(&mut self, set: usize, way: usize) -> Option<usize> {
        self.tree.touch(set, way);
        None
    }

    fn on_fill(&mut self, set: usize, way: usize) {
        self.tree.touch(set, way);
    }

    fn victim(&mut self, set: usize) -> usize {
        self.tree.victim(set)
    }
}

/// Streaming insertion: once a set is full, new lines only ever replace
/// way 0. A hit on the line in way 0 swaps it into the tree-PLRU victim
/// among ways `1..ways`, so reused data leaves the insertion way while
/// everything else in ways `1..ways` survives streaming.
#[derive(Debug, Clone)]
pub struct StreamOneWay {
    ways: usize,
    normal: Option<PlruBits>,
}

impl StreamOneWay {
    pub const INSERTION_WAY: usize = 0;

    pub fn new(sets: usize, ways: usize) -> Self {
        StreamOneWay {
            ways,
            normal: (ways > 1).then(|| PlruBits::new(sets, ways - 1, 1)),
        }
    }
}

impl ReplacementPolicy for StreamOneWay {
    fn on_hit(&mut self, set: usize, way: usize) -> Option<usize> {
        let normal = self.normal.as_mut()?;
        if way == Self::INSERTION_WAY {
            let target = normal.victim(set);
            normal.touch(set, target);
            Some(target)
        } else {
            normal.touch(set, way);
            None
        }
    }

    fn on_fill(&mut self, set: usize, way: usize) {
        if let Some(normal) = self.normal.as_mut() {
            if way != Self::INSERTION_WAY {
                normal.touch(set, way);
            }
        }
    }

    fn victim(&mut self, _set: usize) -> usize {
        debug_assert!(self.ways >= 1);
        Self::INSERTION_WAY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRole {
    LeaderPlru,
    LeaderStream,
    Follower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuelMode {
    Plru,
    Stream,
}

/// Set dueling between tree-PLRU and streaming insertion. Leader sets
/// always use their policy; a miss in a PLRU leader increments the
/// saturating selector, a miss in a streaming leader decrements it, and
/// followers use streaming insertion while the selector is above its
/// midpoint.
#[derive(Debug, Clone)]
pub struct AdaptiveDueling {
    plru: PlruBits,
    stream: StreamOneWay,
    constituency: usize,
    leaders: usize,
    psel: u32,
    psel_max: u32,
    midpoint: u32,
}

impl AdaptiveDueling {
    pub fn new(sets: usize, ways: usize, leader_sets: usize, psel_bits: u32) -> Self {
        let leaders = leader_sets.min(sets / 2);
        let constituency = sets.checked_div(leaders).unwrap_or(0);
        let psel_max = (1u32 << psel_bits) - 1;
        let midpoint = 1u32 << (psel_bits - 1);
        AdaptiveDueling {
            plru: PlruBits::new(sets, ways, 0),
            stream: StreamOneWay::new(sets, ways),
            constituency,
            leaders,
            psel: midpoint,
            psel_max,
            midpoint,
        }
    }

    pub fn role(&self, set: usize) -> SetRole {
        if self.leaders == 0 || set / self.constituency >= self.leaders {
            return SetRole::Follower;
        }
        match set % self.constituency {
            0 => SetRole::LeaderPlru,
            o if o == self.constituency / 2 => SetRole::LeaderStream,
            _ => SetRole::Follower,
        }
    }

    pub fn mode(&self, set: usize) -> DuelMode {
        match self.role(set) {
            SetRole::LeaderPlru => DuelMode::Plru,
            SetRole::LeaderStream => DuelMode::Stream,
            SetRole::Follower if self.psel > self.midpoint => DuelMode::Stream,
            SetRole::Follower => DuelMode::Plru,
        }
    }

    pub fn selector(&self) -> u32 {
        self.psel
    }
}

impl ReplacementPolicy for AdaptiveDueling {
    fn on_hit(&mut self, set: usize, way: usize) -> Option<usize> {
        self.plru.touch(set, way);
        match self.mode(set) {
            DuelMode::Stream => {
                let moved = self.stream.on_hit(set, way);
                if let Some(target) = moved {
                    self.plru.touch(set, target);
                }
                moved
            }
            DuelMode::Plru => {
                // keep the streaming tree current in case the set switches
                self.stream.on_fill(set, way);
                None
            }
        }
    }

    fn on_fill(&mut self, set: usize, way: usize) {
        self.plru.touch(set, way);
        self.stream.on_fill(set, way);
    }

    fn victim(&mut self, set: usize) -> usize {
        match self.mode(set) {
            DuelMode::Stream => self.stream.victim(set),
            DuelMode::Plru => self.plru.victim(set),
        }
    }

    fn on_miss(&mut self, set: usize) {
        match self.role(set) {
            SetRole::LeaderPlru => self.psel = (self.psel + 1).min(self.psel_max),
            SetRole::LeaderStream => self.psel = self.psel.saturating_sub(1),
            SetRole::Follower => {}
        }
    }
}
