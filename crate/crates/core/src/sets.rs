//! Subsets of finite index spaces, stored as bitmasks.

use std::fmt;

/// A subset of `{0, .., universe-1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct IndexSet {
    bits: Vec<u64>,
    universe: usize,
}

impl IndexSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            bits: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for i in 0..universe {
            set.insert(i);
        }
        set
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Decode a bitmask: bit `i` of `mask` selects point `i`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        Self::from_indices(universe, (0..universe.min(64)).filter(|i| mask >> i & 1 == 1))
    }

    pub fn insert(&mut self, index: usize) {
        assert!(index < self.universe, "index {index} out of universe {}", self.universe);
        self.bits[index / 64] |= 1 << (index % 64);
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.universe && self.bits[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|b| *b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |i| self.contains(*i))
    }

    pub fn complement(&self) -> Self {
        Self::from_indices(self.universe, (0..self.universe).filter(|i| !self.contains(*i)))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_contains_iter() {
        let set = IndexSet::from_indices(70, [0, 3, 69]);
        assert!(set.contains(0) && set.contains(3) && set.contains(69));
        assert!(!set.contains(1) && !set.contains(68));
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![0, 3, 69]);
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn full_and_complement() {
        let set = IndexSet::from_mask(4, 0b0101);
        assert_eq!(set.complement(), IndexSet::from_mask(4, 0b1010));
        assert_eq!(IndexSet::full(4), IndexSet::from_mask(4, 0b1111));
        assert!(IndexSet::empty(4).is_empty());
    }

    #[test]
    #[should_panic(expected = "out of universe")]
    fn insert_out_of_range_panics() {
        IndexSet::empty(2).insert(2);
    }
}
