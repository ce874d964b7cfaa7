use std::collections::VecDeque;

use crate::vector::Vector;

/// The last `P` corrected solutions, most recent first.
///
/// Starts padded with copies of the initial point, so every extrapolation
/// order up to the capacity is defined from the first round on.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    entries: VecDeque<Vector>,
}

impl History {
    pub fn new(x0: Vector, capacity: usize) -> Self {
        assert!(capacity >= 1, "history capacity must be at least 1");
        History {
            entries: std::iter::repeat_n(x0, capacity).collect(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.entries.len()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    /// `x_{k-i}` for `i` in `1..=capacity`.
    pub fn back(&self, i: usize) -> &Vector {
        assert!(
            (1..=self.entries.len()).contains(&i),
            "history offset {i} out of range"
        );
        &self.entries[i - 1]
    }

    pub fn latest(&self) -> &Vector {
        &self.entries[0]
    }

    /// Records a new corrected solution, evicting the oldest one.
    pub fn push(&mut self, x: Vector) {
        assert_eq!(x.dim(), self.dim());
        self.entries.pop_back();
        self.entries.push_front(x);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vector> {
        self.entries.iter()
    }
}
