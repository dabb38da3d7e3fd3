use serde::{Deserialize, Serialize};

use super::config::Level;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: Level,
    pub hits: u64,
    pub misses: u64,
}

impl LevelReport {
    pub fn references(&self) -> u64 {
        self.hits + self.misses
    }

    pub fn hit_rate(&self) -> f64 {
        match self.references() {
            0 => 0.0,
            n => self.hits as f64 / n as f64,
        }
    }
}

/// Hits, misses and memory traffic of one measured run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficReport {
    pub levels: Vec<LevelReport>,
    pub line_size: u64,
    pub bytes_read_mem: u64,
    pub bytes_written_mem: u64,
    /// Iterations, rows or nonzeros the run performed, if known.
    pub work_count: Option<u64>,
}

impl TrafficReport {
    pub fn mem_bytes(&self) -> u64 {
        self.bytes_read_mem + self.bytes_written_mem
    }

    pub fn last_level(&self) -> Option<&LevelReport> {
        self.levels.last()
    }

    /// Hit rate of the last level (the L3 in the usual three-level setup).
    pub fn l3_hit_rate(&self) -> f64 {
        self.last_level().map_or(0.0, LevelReport::hit_rate)
    }

    /// Memory bytes per unit of work.
    pub fn bytes_per_work(&self) -> Option<f64> {
        match self.work_count {
            Some(w) if w > 0 => Some(self.mem_bytes() as f64 / w as f64),
            _ => None,
        }
    }

    pub fn with_work(mut self, work_count: u64) -> Self {
        self.work_count = Some(work_count);
        self
    }

    /// Element-wise sum of two reports over the same hierarchy shape.
    pub fn merged(&self, other: &TrafficReport) -> TrafficReport {
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| LevelReport {
                level: a.level,
                hits: a.hits + b.hits,
                misses: a.misses + b.misses,
            })
            .collect();
        TrafficReport {
            levels,
            line_size: self.line_size,
            bytes_read_mem: self.bytes_read_mem + other.bytes_read_mem,
            bytes_written_mem: self.bytes_written_mem + other.bytes_written_mem,
            work_count: match (self.work_count, other.work_count) {
                (Some(a), Some(b)) => Some(a + b),
                (a, b) => a.or(b),
            },
        }
    }

    pub const CSV_HEADER: &'static str =
        "level,hits,misses,hit_rate,bytes_read_mem,bytes_written_mem,work_count,bytes_per_work";

    /// One row per level; memory columns repeat on every row.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        let work = self.work_count.map(|w| w.to_string()).unwrap_or_default();
        let per = self.bytes_per_work().map(|b| format!("{b:.4}")).unwrap_or_default();
        for l in &self.levels {
            out.push_str(&format!(
                "{},{},{},{:.6},{},{},{},{}\n",
                l.level,
                l.hits,
                l.misses,
                l.hit_rate(),
                self.bytes_read_mem,
                self.bytes_written_mem,
                work,
                per
            ));
        }
        out
    }
}
