//! Fixed-size bit vectors indexed by [`ElementIndex`].

use crate::group::{ElementIndex, FiniteAbelianGroup};

/// A subset of a group, one bit per element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    words: Vec<u64>,
    universe: usize,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn singleton(universe: usize, i: ElementIndex) -> Self {
        let mut s = Self::empty(universe);
        s.insert(i);
        s
    }

    pub fn from_indices(universe: usize, items: impl IntoIterator<Item = ElementIndex>) -> Self {
        let mut s = Self::empty(universe);
        for i in items {
            s.insert(i);
        }
        s
    }

    pub fn full(universe: usize) -> Self {
        Self::from_indices(universe, (0..universe).map(ElementIndex))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn insert(&mut self, i: ElementIndex) {
        debug_assert!(i.0 < self.universe);
        self.words[i.0 / 64] |= 1 << (i.0 % 64);
    }

    #[inline]
    pub fn contains(&self, i: ElementIndex) -> bool {
        i.0 < self.universe && self.words[i.0 / 64] & (1 << (i.0 % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementIndex> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(ElementIndex(w * 64 + t))
            })
        })
    }

    /// `{x + y : x ∈ self, y ∈ other}`.
    pub fn sumset(&self, group: &FiniteAbelianGroup, other: &[ElementIndex]) -> ElementSet {
        let mut out = ElementSet::empty(self.universe);
        for x in self.iter() {
            for &y in other {
                out.insert(group.add_idx(x, y));
            }
        }
        out
    }

    /// `{-x : x ∈ self}`.
    pub fn negated(&self, group: &FiniteAbelianGroup) -> ElementSet {
        ElementSet::from_indices(self.universe, self.iter().map(|x| group.neg_idx(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = ElementSet::empty(130);
        assert!(s.is_empty());
        for i in [0, 63, 64, 129] {
            s.insert(ElementIndex(i));
        }
        assert_eq!(s.len(), 4);
        assert!(s.contains(ElementIndex(64)));
        assert!(!s.contains(ElementIndex(65)));
        assert!(!s.contains(ElementIndex(500)));
        let collected: Vec<usize> = s.iter().map(|i| i.0).collect();
        assert_eq!(collected, vec![0, 63, 64, 129]);
        assert!(ElementSet::full(130).is_full());
    }

    #[test]
    fn sumset_examples() {
        let c5 = FiniteAbelianGroup::cyclic(5).unwrap();
        let ix = |v: &[usize]| v.iter().map(|&i| ElementIndex(i)).collect::<Vec<_>>();
        let zero = ElementSet::singleton(5, ElementIndex(0));
        let got = zero.sumset(&c5, &ix(&[1, 4]));
        assert_eq!(got, ElementSet::from_indices(5, ix(&[1, 4])));
        let got = got.sumset(&c5, &ix(&[1, 4]));
        assert_eq!(got, ElementSet::from_indices(5, ix(&[0, 2, 3])));
        let x = ElementSet::from_indices(5, ix(&[0, 2, 3]));
        assert_eq!(x.sumset(&c5, &ix(&[3])).len(), x.len());
    }
}
