use std::fmt;

/// Largest number of worlds a frame may have; world sets are 64-bit masks.
pub const MAX_WORLDS: usize = 64;

/// A set of worlds (or atoms) `0..n`, stored as a fixed-width bit vector.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldSet(pub u64);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    /// All worlds of an `n`-world frame.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_WORLDS);
        if n == MAX_WORLDS {
            WorldSet(u64::MAX)
        } else {
            WorldSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(w: usize) -> Self {
        WorldSet(1u64 << w)
    }

    pub fn from_worlds<I: IntoIterator<Item = usize>>(worlds: I) -> Self {
        worlds.into_iter().fold(WorldSet::EMPTY, |s, w| s.with(w))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn contains(self, w: usize) -> bool {
        w < MAX_WORLDS && self.0 >> w & 1 == 1
    }

    #[inline]
    pub fn with(self, w: usize) -> Self {
        WorldSet(self.0 | 1u64 << w)
    }

    #[inline]
    pub fn without(self, w: usize) -> Self {
        WorldSet(self.0 & !(1u64 << w))
    }

    #[inline]
    pub fn insert(&mut self, w: usize) {
        self.0 |= 1u64 << w;
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        WorldSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        WorldSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        WorldSet(self.0 & !other.0)
    }

    /// Complement relative to an `n`-world universe.
    #[inline]
    pub fn complement(self, n: usize) -> Self {
        WorldSet(!self.0 & WorldSet::full(n).0)
    }

    #[inline]
    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Whether every member is below `n`.
    pub fn within(self, n: usize) -> bool {
        self.is_subset(WorldSet::full(n))
    }

    pub fn iter(self) -> Worlds {
        Worlds(self.0)
    }

    /// Image of the set under a world map.
    pub fn map(self, f: &[usize]) -> Self {
        self.iter().fold(WorldSet::EMPTY, |s, w| s.with(f[w]))
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for WorldSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        WorldSet::from_worlds(iter)
    }
}

/// Iterator over the members of a [`WorldSet`], in increasing order.
#[derive(Clone)]
pub struct Worlds(u64);

impl Iterator for Worlds {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let w = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(w)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Worlds {}

/// All subsets of an `n`-world universe, in increasing mask order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = WorldSet> {
    assert!(n < MAX_WORLDS, "cannot enumerate subsets of {n} worlds");
    (0..1u64 << n).map(WorldSet)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = WorldSet::from_worlds([0, 2]);
        let b = WorldSet::from_worlds([2, 3]);
        assert_eq!(a.union(b), WorldSet::from_worlds([0, 2, 3]));
        assert_eq!(a.intersection(b), WorldSet::singleton(2));
        assert_eq!(a.complement(4), WorldSet::from_worlds([1, 3]));
        assert!(WorldSet::singleton(2).is_subset(a));
        assert!(!a.is_subset(b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(WorldSet::full(64).len(), 64);
    }

    #[test]
    fn map_collapses() {
        let s = WorldSet::from_worlds([0, 1, 2]);
        assert_eq!(s.map(&[0, 0, 1]), WorldSet::from_worlds([0, 1]));
    }
}
