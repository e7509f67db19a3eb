//! Reusable per-vertex label arrays and membership sets with O(1) reset via
//! generation stamps, shared by the query engines.

use crate::model::Vertex;
use crate::time::Time;

/// Earliest-arrival labels over vertices, defaulting to `UNREACHABLE`.
pub(crate) struct Labels {
    arr: Vec<Time>,
    stamp: Vec<u32>,
    generation: u32,
}

impl Labels {
    pub fn new(n: usize) -> Labels {
        Labels { arr: vec![Time::UNREACHABLE; n], stamp: vec![0; n], generation: 0 }
    }

    pub fn reset(&mut self) {
        self.generation = match self.generation.checked_add(1) {
            Some(g) => g,
            None => {
                self.stamp.fill(0);
                1
            }
        };
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> Time {
        if self.stamp[v as usize] == self.generation {
            self.arr[v as usize]
        } else {
            Time::UNREACHABLE
        }
    }

    /// Lowers the label; returns whether it improved.
    #[inline]
    pub fn improve(&mut self, v: Vertex, t: Time) -> bool {
        if t < self.get(v) {
            self.arr[v as usize] = t;
            self.stamp[v as usize] = self.generation;
            true
        } else {
            false
        }
    }
}

/// A set over small integer keys with O(1) clear.
pub(crate) struct StampSet {
    stamp: Vec<u32>,
    generation: u32,
}

impl StampSet {
    pub fn new(n: usize) -> StampSet {
        StampSet { stamp: vec![0; n], generation: 0 }
    }

    pub fn reset(&mut self) {
        self.generation = match self.generation.checked_add(1) {
            Some(g) => g,
            None => {
                self.stamp.fill(0);
                1
            }
        };
    }

    /// Returns whether the key was newly inserted.
    #[inline]
    pub fn insert(&mut self, key: u32) -> bool {
        if self.stamp[key as usize] == self.generation {
            false
        } else {
            self.stamp[key as usize] = self.generation;
            true
        }
    }

    #[inline]
    pub fn contains(&self, key: u32) -> bool {
        self.stamp[key as usize] == self.generation
    }
}
