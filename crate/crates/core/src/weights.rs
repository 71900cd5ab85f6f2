//! Weight sets `A ⊆ Z \ {0}` and their orbits `A·g`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::group::{ElementIndex, FiniteAbelianGroup, GroupElement};

/// Largest accepted `|a|`.
pub const MAX_WEIGHT: i64 = 1_000_000;

const WEIGHT_GRAMMAR: &str = "`unit`, `pm1`, `full`, or a list like `{-1,1}` of nonzero integers";

/// A finite nonempty set of nonzero integer weights.
///
/// `symmetric` is symmetry over `Z`; the hypothesis that matters for the
/// theorem checks is [`WeightSet::group_symmetric`], symmetry mod `exp(G)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSet {
    weights: BTreeSet<i64>,
    symmetric: bool,
}

impl WeightSet {
    pub fn new(weights: impl IntoIterator<Item = i64>) -> Result<Self> {
        let weights: BTreeSet<i64> = weights.into_iter().collect();
        if weights.is_empty() {
            return Err(Error::InvalidWeights("weight set is empty".into()));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidWeights("0 is not an admissible weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| w.abs() > MAX_WEIGHT) {
            return Err(Error::InvalidWeights(format!("|{w}| exceeds {MAX_WEIGHT}")));
        }
        let symmetric = weights.iter().all(|w| weights.contains(&-w));
        Ok(WeightSet { weights, symmetric })
    }

    /// `A = {1}`.
    pub fn unit() -> Self {
        Self::new([1]).expect("valid")
    }

    /// `A = {-1, 1}`.
    pub fn plus_minus_one() -> Self {
        Self::new([-1, 1]).expect("valid")
    }

    /// `A = [1, exp(G) - 1]`.
    pub fn full(group: &FiniteAbelianGroup) -> Result<Self> {
        let n = group.exponent() as i64;
        if n < 2 {
            return Err(Error::InvalidWeights("`full` weights need exp(G) >= 2".into()));
        }
        Self::new(1..n)
    }

    /// Parses `unit`, `pm1`, `full`, or an explicit list `{a,b,...}`.
    pub fn parse(spec: &str, group: &FiniteAbelianGroup) -> Result<Self> {
        let s = spec.trim();
        match s.to_ascii_lowercase().as_str() {
            "unit" => return Ok(Self::unit()),
            "pm1" => return Ok(Self::plus_minus_one()),
            "full" => return Self::full(group),
            _ => {}
        }
        let body = s
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::parse(s, WEIGHT_GRAMMAR))?;
        if body.trim().is_empty() {
            return Err(Error::InvalidWeights("weight set is empty".into()));
        }
        let mut weights = Vec::new();
        for tok in body.split(',') {
            let tok = tok.trim();
            let bad = || {
                if tok.is_empty() {
                    Error::parse(s, WEIGHT_GRAMMAR)
                } else {
                    Error::parse(tok, "an integer weight")
                }
            };
            weights.push(tok.parse::<i64>().map_err(|_| bad())?);
        }
        Self::new(weights)
    }

    pub fn weights(&self) -> impl Iterator<Item = i64> + '_ {
        self.weights.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `A = -A` over the integers.
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// Canonical text form, weights ascending: `{-1,1}`.
    pub fn canonical_name(&self) -> String {
        self.to_string()
    }

    /// Distinct residues `a mod exp(G)`, ascending.
    pub fn residues(&self, group: &FiniteAbelianGroup) -> Vec<u64> {
        let n = group.exponent() as i64;
        let set: BTreeSet<u64> = self.weights.iter().map(|a| a.rem_euclid(n) as u64).collect();
        set.into_iter().collect()
    }

    /// Whether `{a mod exp(G)} = {-a mod exp(G)}` as residue sets.
    pub fn group_symmetric(&self, group: &FiniteAbelianGroup) -> bool {
        let n = group.exponent();
        let res: BTreeSet<u64> = self.residues(group).into_iter().collect();
        res.iter().all(|r| res.contains(&((n - r) % n)))
    }

    /// Whether the weights act on `G` exactly like `{-1, 1}`.
    pub fn acts_as_plus_minus_one(&self, group: &FiniteAbelianGroup) -> bool {
        let n = group.exponent();
        let mut expected: Vec<u64> = vec![1 % n, (n - 1) % n];
        expected.sort_unstable();
        expected.dedup();
        self.residues(group) == expected
    }

    /// Whether the weights act on `G` exactly like `[1, exp(G) - 1]`.
    pub fn acts_as_full(&self, group: &FiniteAbelianGroup) -> bool {
        let n = group.exponent();
        n >= 2 && self.residues(group) == (1..n).collect::<Vec<_>>()
    }

    /// Whether the weights act on `G` exactly like `{1}`.
    pub fn acts_as_unit(&self, group: &FiniteAbelianGroup) -> bool {
        self.residues(group) == vec![1 % group.exponent()]
    }

    /// `A·g = {a·g : a ∈ A}`.
    pub fn orbit(&self, group: &FiniteAbelianGroup, g: &GroupElement) -> WeightOrbit {
        let members: BTreeSet<GroupElement> = self
            .residues(group)
            .into_iter()
            .map(|a| group.scalar_mul(a as i64, g))
            .collect();
        WeightOrbit { members }
    }

    /// The orbit as a sorted list of dense indices.
    pub fn orbit_indices(&self, group: &FiniteAbelianGroup, g: ElementIndex) -> Vec<ElementIndex> {
        let mut out: Vec<ElementIndex> = self
            .residues(group)
            .into_iter()
            .map(|a| group.mul_idx(a as i64, g))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Orbit of every element, indexed by `ElementIndex`.
    pub fn orbit_table(&self, group: &FiniteAbelianGroup) -> Vec<Vec<ElementIndex>> {
        group.indices().map(|g| self.orbit_indices(group, g)).collect()
    }

    pub fn orbit_set(&self, group: &FiniteAbelianGroup, g: ElementIndex) -> ElementSet {
        ElementSet::from_indices(group.order(), self.orbit_indices(group, g))
    }
}

impl fmt::Display for WeightSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for WeightSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.canonical_name())
    }
}

impl<'de> Deserialize<'de> for WeightSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        // Only explicit lists round-trip without a group, which is all we ever serialize.
        WeightSet::parse(&s, &FiniteAbelianGroup::trivial()).map_err(serde::de::Error::custom)
    }
}

/// `{a·g : a ∈ A}` with duplicates collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightOrbit {
    members: BTreeSet<GroupElement>,
}

impl WeightOrbit {
    pub fn members(&self) -> impl Iterator<Item = &GroupElement> {
        self.members.iter()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.members.contains(g)
    }

    pub fn contains_zero(&self) -> bool {
        self.members.iter().any(GroupElement::is_zero)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
