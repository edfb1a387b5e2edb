use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

/// A scheduled closing of one gap. `gap_index` is zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub time: f64,
    pub gap_index: usize,
    pub version: u64,
}

impl Eq for CrossingEvent {}

impl Ord for CrossingEvent {
    // Equal times resolve by ascending gap index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.gap_index.cmp(&other.gap_index))
            .then(self.version.cmp(&other.version))
    }
}

impl PartialOrd for CrossingEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Min-heap of crossing events with per-gap version stamps. Rescheduling a
/// gap bumps its version, so superseded entries are dropped when they
/// surface instead of being searched for.
#[derive(Clone, Debug)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<CrossingEvent>>,
    versions: Vec<u64>,
}

impl EventQueue {
    pub fn new(gaps: usize) -> Self {
        Self {
            heap: BinaryHeap::with_capacity(2 * gaps),
            versions: vec![0; gaps],
        }
    }

    /// Replaces whatever was scheduled for `gap`.
    pub fn schedule(&mut self, gap: usize, time: Option<f64>) {
        self.versions[gap] += 1;
        if let Some(time) = time {
            self.heap.push(Reverse(CrossingEvent {
                time,
                gap_index: gap,
                version: self.versions[gap],
            }));
        }
        if self.heap.len() > 4 * self.versions.len() + 16 {
            self.compact();
        }
    }

    pub fn version(&self, gap: usize) -> u64 {
        self.versions[gap]
    }

    fn is_current(&self, e: &CrossingEvent) -> bool {
        self.versions[e.gap_index] == e.version
    }

    /// Earliest live event, discarding stale entries on the way.
    pub fn peek(&mut self) -> Option<CrossingEvent> {
        while let Some(&Reverse(e)) = self.heap.peek() {
            if self.is_current(&e) {
                return Some(e);
            }
            self.heap.pop();
        }
        None
    }

    /// Pops the earliest live event if it is strictly before `limit`.
    pub fn pop_before(&mut self, limit: f64) -> Option<CrossingEvent> {
        let e = self.peek()?;
        if e.time < limit {
            self.heap.pop();
            Some(e)
        } else {
            None
        }
    }

    /// Number of heap entries, stale ones included.
    pub fn raw_len(&self) -> usize {
        self.heap.len()
    }

    pub fn compact(&mut self) {
        let versions = &self.versions;
        self.heap.retain(|Reverse(e)| versions[e.gap_index] == e.version);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_by_time_then_gap() {
        let mut q = EventQueue::new(4);
        q.schedule(3, Some(1.0));
        q.schedule(1, Some(1.0));
        q.schedule(2, Some(0.5));
        q.schedule(0, None);
        let order: Vec<usize> = std::iter::from_fn(|| q.pop_before(f64::INFINITY))
            .map(|e| e.gap_index)
            .collect();
        assert_eq!(order, vec![2, 1, 3]);
    }

    #[test]
    fn stale_entries_are_skipped() {
        let mut q = EventQueue::new(2);
        q.schedule(0, Some(1.0));
        q.schedule(0, Some(3.0));
        q.schedule(1, Some(2.0));
        q.schedule(1, None);
        assert_eq!(q.pop_before(2.5), None);
        let e = q.pop_before(4.0).unwrap();
        assert_eq!((e.gap_index, e.time, e.version), (0, 3.0, 2));
        assert!(q.peek().is_none());
    }

    #[test]
    fn limit_is_exclusive() {
        let mut q = EventQueue::new(1);
        q.schedule(0, Some(2.0));
        assert!(q.pop_before(2.0).is_none());
        assert!(q.pop_before(2.0 + 1e-15).is_some());
    }

    #[test]
    fn compaction_bounds_the_heap() {
        let mut q = EventQueue::new(3);
        for k in 0..1000 {
            q.schedule(k % 3, Some(k as f64));
        }
        assert!(q.raw_len() <= 4 * 3 + 16);
        q.compact();
        assert_eq!(q.raw_len(), 3);
        assert_eq!(q.peek().unwrap().time, 997.0);
    }
}
