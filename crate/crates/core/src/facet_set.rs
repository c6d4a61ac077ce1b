use std::fmt;

use fixedbitset::FixedBitSet;

/// A set of facets of one complex, addressed by canonical facet index.
///
/// Every set built for a given complex has the same universe size, so
/// equality and ordering compare membership only.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FacetSet(FixedBitSet);

impl FacetSet {
    pub fn empty(universe: usize) -> Self {
        FacetSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        FacetSet(bits)
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for ix in indices {
            set.insert(ix);
        }
        set
    }

    /// Low `universe` bits of `mask` (universes up to 64 facets).
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        debug_assert!(universe <= 64);
        Self::from_indices(universe, (0..universe).filter(|i| mask >> i & 1 == 1))
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.0.is_full()
    }

    pub fn contains(&self, ix: usize) -> bool {
        self.0.contains(ix)
    }

    pub fn insert(&mut self, ix: usize) {
        self.0.insert(ix);
    }

    pub fn remove(&mut self, ix: usize) {
        self.0.set(ix, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &FacetSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn complement(&self) -> FacetSet {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        FacetSet(bits)
    }

    pub fn union_with(&mut self, other: &FacetSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &FacetSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn intersection(&self, other: &FacetSet) -> FacetSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn union(&self, other: &FacetSet) -> FacetSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }
}

impl fmt::Debug for FacetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_stays_in_universe() {
        let s = FacetSet::from_indices(5, [0, 3]);
        let c = s.complement();
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(c.complement(), s);
        assert!(FacetSet::full(5).is_full());
        assert_eq!(FacetSet::full(5).len(), 5);
    }

    #[test]
    fn mask_round_trip() {
        let s = FacetSet::from_mask(9, 0b1_0000_0101);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 8]);
    }
}
