//! Small fixed-capacity index sets.
//!
//! Markets handled here are desk scale, so every agent set fits in one
//! machine word. Bit `i` stands for the agent with index `i`.

use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

/// Largest number of agents an [`IndexSet`] can hold.
pub const MAX_AGENTS: usize = 64;

/// A set of agent indices below [`MAX_AGENTS`].
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u64);

/// Worker sets are the most common use of [`IndexSet`].
pub type WorkerSet = IndexSet;

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_AGENTS, "index set capacity exceeded");
        if n == MAX_AGENTS {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_AGENTS, "index {i} exceeds set capacity");
        IndexSet(1u64 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_AGENTS && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        *self = *self | IndexSet::singleton(i);
    }

    pub fn remove(&mut self, i: usize) {
        if i < MAX_AGENTS {
            self.0 &= !(1u64 << i);
        }
    }

    pub fn with(self, i: usize) -> Self {
        self | IndexSet::singleton(i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: IndexSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Members in increasing order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every subset of `self`, starting from the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets { universe: self.0, next: Some(0) }
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = IndexSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl BitOr for IndexSet {
    type Output = IndexSet;
    fn bitor(self, rhs: IndexSet) -> IndexSet {
        IndexSet(self.0 | rhs.0)
    }
}

impl BitAnd for IndexSet {
    type Output = IndexSet;
    fn bitand(self, rhs: IndexSet) -> IndexSet {
        IndexSet(self.0 & rhs.0)
    }
}

impl Sub for IndexSet {
    type Output = IndexSet;
    fn sub(self, rhs: IndexSet) -> IndexSet {
        IndexSet(self.0 & !rhs.0)
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Submask enumeration in increasing numeric order.
pub struct Subsets {
    universe: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = IndexSet;
    fn next(&mut self) -> Option<IndexSet> {
        let cur = self.next?;
        self.next = if cur == self.universe {
            None
        } else {
            Some((cur | !self.universe).wrapping_add(1) & self.universe)
        };
        Some(IndexSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_cover_power_set() {
        let u = IndexSet::from_iter([1, 3, 4]);
        let subs: Vec<_> = u.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(u)));
        assert_eq!(subs[0], IndexSet::EMPTY);
        assert_eq!(*subs.last().unwrap(), u);
        let mut dedup = subs.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 8);
    }

    #[test]
    fn empty_universe_has_one_subset() {
        assert_eq!(IndexSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn full_and_members() {
        assert_eq!(IndexSet::full(3).iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(IndexSet::full(64).len(), 64);
        let mut s = IndexSet::singleton(5);
        s.insert(2);
        s.remove(5);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(s.first(), Some(2));
    }
}
