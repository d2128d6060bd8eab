//! Indexed binary min-heap over point ids `0..capacity`.
//!
//! Keys are `f64` ordered by `total_cmp`; equal keys are ordered by ascending
//! id so that pop order is fully deterministic.

use alloc::vec;
use alloc::vec::Vec;

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct IndexedMinHeap {
    slots: Vec<usize>,
    pos: Vec<usize>,
    keys: Vec<f64>,
}

impl IndexedMinHeap {
    pub fn new(capacity: usize) -> Self {
        Self { slots: Vec::new(), pos: vec![ABSENT; capacity], keys: vec![f64::INFINITY; capacity] }
    }

    /// Builds a heap from `(id, key)` pairs bottom-up in `O(k)`.
    pub fn from_items(capacity: usize, items: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut h = Self::new(capacity);
        for (id, key) in items {
            debug_assert_eq!(h.pos[id], ABSENT);
            h.pos[id] = h.slots.len();
            h.slots.push(id);
            h.keys[id] = key;
        }
        for s in (0..h.slots.len() / 2).rev() {
            h.sift_down(s);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.pos[id] != ABSENT
    }

    /// Last key stored for `id`, whether or not it is still queued.
    pub fn key(&self, id: usize) -> f64 {
        self.keys[id]
    }

    pub fn peek(&self) -> Option<(usize, f64)> {
        self.slots.first().map(|&id| (id, self.keys[id]))
    }

    pub fn push(&mut self, id: usize, key: f64) {
        debug_assert_eq!(self.pos[id], ABSENT);
        self.keys[id] = key;
        self.pos[id] = self.slots.len();
        self.slots.push(id);
        self.sift_up(self.slots.len() - 1);
    }

    pub fn pop(&mut self) -> Option<(usize, f64)> {
        let top = *self.slots.first()?;
        self.remove(top);
        Some((top, self.keys[top]))
    }

    pub fn remove(&mut self, id: usize) -> bool {
        let s = self.pos[id];
        if s == ABSENT {
            return false;
        }
        let last = self.slots.len() - 1;
        self.swap(s, last);
        self.slots.pop();
        self.pos[id] = ABSENT;
        if s < self.slots.len() {
            self.sift_down(s);
            self.sift_up(s);
        }
        true
    }

    /// Changes the key of a queued id (decrease or increase).
    pub fn update(&mut self, id: usize, key: f64) {
        let s = self.pos[id];
        debug_assert_ne!(s, ABSENT);
        let old = self.keys[id];
        self.keys[id] = key;
        match key.total_cmp(&old) {
            core::cmp::Ordering::Less => self.sift_up(s),
            core::cmp::Ordering::Greater => self.sift_down(s),
            core::cmp::Ordering::Equal => {}
        }
    }

    #[inline]
    fn less(&self, a: usize, b: usize) -> bool {
        let (ia, ib) = (self.slots[a], self.slots[b]);
        match self.keys[ia].total_cmp(&self.keys[ib]) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Greater => false,
            core::cmp::Ordering::Equal => ia < ib,
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.slots.swap(a, b);
        self.pos[self.slots[a]] = a;
        self.pos[self.slots[b]] = b;
    }

    fn sift_up(&mut self, mut s: usize) {
        while s > 0 {
            let p = (s - 1) / 2;
            if !self.less(s, p) {
                break;
            }
            self.swap(s, p);
            s = p;
        }
    }

    fn sift_down(&mut self, mut s: usize) {
        let n = self.slots.len();
        loop {
            let (l, r) = (2 * s + 1, 2 * s + 2);
            let mut m = s;
            if l < n && self.less(l, m) {
                m = l;
            }
            if r < n && self.less(r, m) {
                m = r;
            }
            if m == s {
                break;
            }
            self.swap(s, m);
            s = m;
        }
    }

    #[cfg(test)]
    fn check(&self) {
        for s in 1..self.slots.len() {
            assert!(!self.less(s, (s - 1) / 2));
        }
        for (s, &id) in self.slots.iter().enumerate() {
            assert_eq!(self.pos[id], s);
        }
    }
}
