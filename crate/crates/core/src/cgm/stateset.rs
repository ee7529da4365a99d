use std::fmt;

use fixedbitset::FixedBitSet;

/// A set of state indices of one model.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(num_states: usize) -> StateSet {
        StateSet(FixedBitSet::with_capacity(num_states))
    }

    pub fn full(num_states: usize) -> StateSet {
        let mut bits = FixedBitSet::with_capacity(num_states);
        bits.insert_range(..);
        StateSet(bits)
    }

    pub fn from_states(num_states: usize, states: impl IntoIterator<Item = usize>) -> StateSet {
        let mut s = StateSet::empty(num_states);
        for i in states {
            s.insert(i);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, state: usize) {
        self.0.insert(state);
    }

    pub fn contains(&self, state: usize) -> bool {
        self.0.contains(state)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    /// Lowest state index in the set.
    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.0.union_with(&other.0);
        out
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.0.intersect_with(&other.0);
        out
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.0.difference_with(&other.0);
        out
    }

    pub fn complement(&self) -> StateSet {
        let mut out = self.clone();
        out.0.toggle_range(..);
        out
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = StateSet::from_states(6, [0, 2, 4]);
        let b = StateSet::from_states(6, [2, 3]);
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), vec![0, 2, 3, 4]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(a.complement().iter().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(a.difference(&b).len(), 2);
        assert!(StateSet::from_states(6, [2]).is_subset(&a));
        assert_eq!(StateSet::full(6).len(), 6);
        assert_eq!(b.first(), Some(2));
    }
}
