//! Sequences over a group: ordered terms with index identity, plus the
//! multiset view used for canonical forms and enumeration.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{ElementIndex, FiniteAbelianGroup, GroupElement};

/// Hard bound on sequence length; index sets must fit a `u64` mask.
pub const MAX_SEQUENCE_LENGTH: usize = 64;

/// A sequence `S = g_1 ⋯ g_m` stored as dense element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Sequence {
    terms: Vec<ElementIndex>,
    multiplicities: BTreeMap<ElementIndex, usize>,
}

impl Sequence {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_indices(terms: impl IntoIterator<Item = ElementIndex>) -> Self {
        let terms: Vec<ElementIndex> = terms.into_iter().collect();
        let mut multiplicities = BTreeMap::new();
        for &t in &terms {
            *multiplicities.entry(t).or_insert(0) += 1;
        }
        Sequence { terms, multiplicities }
    }

    pub fn from_elements(group: &FiniteAbelianGroup, elems: &[GroupElement]) -> Result<Self> {
        let terms = elems.iter().map(|e| group.index(e)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_indices(terms))
    }

    pub fn terms(&self) -> &[ElementIndex] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `v_g(S)`.
    pub fn multiplicity(&self, g: ElementIndex) -> usize {
        self.multiplicities.get(&g).copied().unwrap_or(0)
    }

    /// Distinct terms with their multiplicities, in index order.
    pub fn multiplicities(&self) -> &BTreeMap<ElementIndex, usize> {
        &self.multiplicities
    }

    pub fn contains(&self, g: ElementIndex) -> bool {
        self.multiplicity(g) > 0
    }

    pub fn is_squarefree(&self) -> bool {
        self.multiplicities.values().all(|&v| v <= 1)
    }

    pub fn append(&self, g: ElementIndex) -> Sequence {
        let mut out = self.clone();
        out.terms.push(g);
        *out.multiplicities.entry(g).or_insert(0) += 1;
        out
    }

    /// Removes one occurrence of `g` (the last one, so other indices keep their positions).
    pub fn remove_one(&self, g: ElementIndex) -> Result<Sequence> {
        let pos = self.terms.iter().rposition(|&t| t == g).ok_or(Error::AbsentTerm)?;
        let mut out = self.clone();
        out.terms.remove(pos);
        match out.multiplicities.get_mut(&g) {
            Some(1) => {
                out.multiplicities.remove(&g);
            }
            Some(v) => *v -= 1,
            None => unreachable!(),
        }
        Ok(out)
    }

    /// Terms sorted by element index; equal multisets share a canonical form.
    pub fn canonical_form(&self) -> Sequence {
        let mut terms = self.terms.clone();
        terms.sort_unstable();
        Sequence {
            terms,
            multiplicities: self.multiplicities.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.windows(2).all(|w| w[0] <= w[1])
    }

    /// Map every term through `f`, keeping positions.
    pub fn map(&self, f: impl Fn(ElementIndex) -> ElementIndex) -> Sequence {
        Self::from_indices(self.terms.iter().map(|&t| f(t)))
    }

    /// Subsequence selected by a bit mask over positions.
    pub fn select(&self, mask: u64) -> Sequence {
        Self::from_indices(
            self.terms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &t)| t),
        )
    }

    /// Histogram multiplicity → number of distinct elements with that multiplicity.
    pub fn multiplicity_profile(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &v in self.multiplicities.values() {
            *h.entry(v).or_insert(0) += 1;
        }
        h
    }

    /// Literal with `*k` multiplicity sugar for runs of equal terms.
    pub fn to_literal(&self, group: &FiniteAbelianGroup) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.terms.len() {
            let mut j = i;
            while j < self.terms.len() && self.terms[j] == self.terms[i] {
                j += 1;
            }
            let elem = group.deindex(self.terms[i]).expect("term belongs to group");
            if j - i > 1 {
                parts.push(format!("{elem}*{}", j - i));
            } else {
                parts.push(elem.to_string());
            }
            i = j;
        }
        parts.join(",")
    }

    /// Parses comma-separated coordinate tuples with optional `*k`, e.g.
    /// `(1,0,0)*2,(0,1,0)`. For rank-1 groups a bare integer is also accepted.
    pub fn parse(literal: &str, group: &FiniteAbelianGroup) -> Result<Sequence> {
        const GRAMMAR: &str = "comma-separated coordinate tuples like `(1,0)*2,(0,1)`";
        let mut terms = Vec::new();
        let s = literal.trim();
        let mut rest = s;
        while !rest.is_empty() {
            let (tuple, after) = if let Some(body) = rest.strip_prefix('(') {
                let close = body.find(')').ok_or_else(|| Error::parse(rest, GRAMMAR))?;
                (&body[..close], &body[close + 1..])
            } else {
                let end = rest.find([',', '*']).unwrap_or(rest.len());
                if group.rank() != 1 {
                    return Err(Error::parse(&rest[..end], GRAMMAR));
                }
                (&rest[..end], &rest[end..])
            };
            let coords = tuple
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| Error::parse(tuple, GRAMMAR)))
                .collect::<Result<Vec<i64>>>()?;
            if group.is_trivial() && coords.len() == 1 && coords[0] == 0 {
                // `(0)` names the identity of the trivial group.
            } else if coords.len() != group.rank() {
                return Err(Error::parse(
                    tuple,
                    format!("a tuple with {} coordinates for group {group}", group.rank()),
                ));
            }
            let elem = if group.is_trivial() {
                group.zero()
            } else {
                group.element(&coords)?
            };
            let idx = group.index(&elem)?;
            let mut after = after.trim_start();
            let mut reps = 1usize;
            if let Some(r) = after.strip_prefix('*') {
                let end = r.find(',').unwrap_or(r.len());
                reps = r[..end]
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(&r[..end], "a repetition count after `*`"))?;
                after = &r[end..];
            }
            terms.extend(std::iter::repeat_n(idx, reps));
            after = after.trim_start();
            rest = match after.strip_prefix(',') {
                Some(r) if r.trim().is_empty() => return Err(Error::parse(after, GRAMMAR)),
                Some(r) => r.trim_start(),
                None if after.is_empty() => after,
                None => return Err(Error::parse(after, GRAMMAR)),
            };
        }
        if terms.len() > MAX_SEQUENCE_LENGTH {
            return Err(Error::LengthLimit {
                length: terms.len(),
                limit: MAX_SEQUENCE_LENGTH,
                hint: "sequences are limited to 64 terms",
            });
        }
        Ok(Self::from_indices(terms))
    }
}

/// For an odd-order group, a split `G \ {0} = plus ⊔ minus` with `minus = -plus`.
///
/// From each pair `{g, -g}` the member with the smaller dense index goes into `plus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPlusPartition {
    plus: Vec<ElementIndex>,
    minus: Vec<ElementIndex>,
    in_plus: Vec<bool>,
}

impl GPlusPartition {
    pub fn new(group: &FiniteAbelianGroup) -> Result<Self> {
        if group.order().is_multiple_of(2) {
            return Err(Error::EvenOrder(group.order()));
        }
        let mut in_plus = vec![false; group.order()];
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for g in group.indices().skip(1) {
            if g < group.neg_idx(g) {
                in_plus[g.0] = true;
                plus.push(g);
            } else {
                minus.push(g);
            }
        }
        Ok(GPlusPartition { plus, minus, in_plus })
    }

    pub fn plus(&self) -> &[ElementIndex] {
        &self.plus
    }

    pub fn minus(&self) -> &[ElementIndex] {
        &self.minus
    }

    pub fn is_plus(&self, g: ElementIndex) -> bool {
        self.in_plus[g.0]
    }

    /// Replaces every term in `minus` by its negative; length is preserved.
    pub fn sign_normalize(&self, group: &FiniteAbelianGroup, s: &Sequence) -> Sequence {
        s.map(|t| {
            if t.0 != 0 && !self.in_plus[t.0] {
                group.neg_idx(t)
            } else {
                t
            }
        })
        .canonical_form()
    }
}

/// Iterator over all multisets of a given length drawn from a support, each
/// produced once as a canonical (non-decreasing) sequence.
pub struct MultisetIter {
    support: Vec<ElementIndex>,
    positions: Vec<usize>,
    done: bool,
}

impl Iterator for MultisetIter {
    type Item = Sequence;

    fn next(&mut self) -> Option<Sequence> {
        if self.done {
            return None;
        }
        let out = Sequence::from_indices(self.positions.iter().map(|&p| self.support[p]));
        // Advance to the next non-decreasing position vector.
        let n = self.support.len();
        match self.positions.iter().rposition(|&p| p + 1 < n) {
            Some(i) => {
                let v = self.positions[i] + 1;
                for p in &mut self.positions[i..] {
                    *p = v;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Every canonical sequence of `length` terms over `support`.
pub fn enumerate_sequences(support: &[ElementIndex], length: usize) -> MultisetIter {
    let mut support = support.to_vec();
    support.sort_unstable();
    support.dedup();
    let done = support.is_empty() && length > 0;
    MultisetIter {
        support,
        positions: vec![0; length],
        done,
    }
}

/// Number of multisets of size `length` from `support_size` kinds.
pub fn multiset_count(support_size: usize, length: usize) -> u128 {
    if support_size == 0 {
        return u128::from(length == 0);
    }
    let (n, k) = ((support_size + length - 1) as u128, length as u128);
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
