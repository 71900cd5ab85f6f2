//! Finite abelian groups in invariant-factor form.
//!
//! A group `C_{d_1} ⊕ … ⊕ C_{d_r}` with `d_1 | d_2 | … | d_r` is stored by its
//! invariant factors. Elements are coordinate vectors and are also addressed by a
//! dense mixed-radix [`ElementIndex`] (last coordinate least significant), which is
//! what the bitsets and count vectors key on.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::{gcd, lcm};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Groups up to this order get a precomputed Cayley table.
const TABLE_LIMIT: usize = 1024;
/// Hard ceiling on group order for dense indexing.
pub const MAX_ORDER: usize = 1 << 22;

/// Dense index of a group element, in `[0, order)`. The identity is index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElementIndex(pub usize);

impl ElementIndex {
    pub const ZERO: ElementIndex = ElementIndex(0);

    pub fn get(self) -> usize {
        self.0
    }
}

/// An element given by its reduced coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug)]
struct Tables {
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// A finite abelian group `C_{d_1} ⊕ … ⊕ C_{d_r}` with `d_i | d_{i+1}`.
#[derive(Clone)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    order: usize,
    tables: Arc<Tables>,
}

impl PartialEq for FiniteAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for FiniteAbelianGroup {}

impl std::hash::Hash for FiniteAbelianGroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.factors.hash(state);
    }
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAbelianGroup")
            .field("invariant_factors", &self.factors)
            .field("order", &self.order)
            .finish()
    }
}

fn prime_power_split(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl FiniteAbelianGroup {
    /// Builds the group `⊕ C_{n_i}` and normalizes it to invariant-factor form.
    ///
    /// Each order is split into prime powers; for every prime the powers are
    /// sorted descending and the `k`-th largest goes into the `k`-th factor from
    /// the top. Isomorphic presentations therefore yield identical factors.
    pub fn new(cyclic_orders: &[u64]) -> Result<Self> {
        let mut by_prime: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for &n in cyclic_orders {
            if n < 2 {
                return Err(Error::InvalidOrder(n));
            }
            for (p, e) in prime_power_split(n) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for (p, exps) in by_prime.iter_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (k, e) in exps.iter().enumerate() {
                factors[rank - 1 - k] *= p.pow(*e);
            }
        }
        Self::from_invariant_factors(factors)
    }

    pub fn trivial() -> Self {
        Self::from_invariant_factors(Vec::new()).expect("trivial group")
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n])
    }

    /// `C_p^r`.
    pub fn elementary(p: u64, r: usize) -> Result<Self> {
        if r == 0 {
            return Ok(Self::trivial());
        }
        Self::new(&vec![p; r])
    }

    fn from_invariant_factors(factors: Vec<u64>) -> Result<Self> {
        debug_assert!(factors.windows(2).all(|w| w[1] % w[0] == 0));
        let mut order: usize = 1;
        for &d in &factors {
            order = order
                .checked_mul(d as usize)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::Precondition(format!("group order exceeds {MAX_ORDER}")))?;
        }
        let mut group = FiniteAbelianGroup {
            factors,
            order,
            tables: Arc::new(Tables {
                neg: Vec::new(),
                add: None,
            }),
        };
        let neg = (0..order)
            .map(|i| {
                let e = group.deindex_unchecked(i);
                group.index_unchecked(&group.neg(&e)) as u32
            })
            .collect();
        let add = (order <= TABLE_LIMIT).then(|| {
            let elems: Vec<GroupElement> = (0..order).map(|i| group.deindex_unchecked(i)).collect();
            let mut table = vec![0u32; order * order];
            for (i, a) in elems.iter().enumerate() {
                for (j, b) in elems.iter().enumerate() {
                    table[i * order + j] = group.index_unchecked(&group.add(a, b)) as u32;
                }
            }
            table
        });
        group.tables = Arc::new(Tables { neg, add });
        Ok(group)
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The exponent `exp(G)`: the largest invariant factor (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Returns `Some(p)` when the group is `C_p^r` for a prime `p` and `r >= 1`.
    pub fn elementary_prime(&self) -> Option<u64> {
        let p = *self.factors.first()?;
        let prime = prime_power_split(p).len() == 1 && prime_power_split(p)[0].1 == 1;
        (prime && self.factors.iter().all(|&d| d == p)).then_some(p)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    /// Builds an element from arbitrary integer coordinates, reducing each one.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::ForeignElement(format!(
                "{coords:?} has {} coordinates, group rank is {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        })
    }

    /// The `i`-th standard generator `e_i` (0-based).
    pub fn basis_element(&self, i: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        coords[i] = 1;
        GroupElement { coords }
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.coords.len() == self.rank() && a.coords.iter().zip(&self.factors).all(|(c, d)| c < d)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.factors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a.coords.iter().zip(&self.factors).map(|(x, d)| (d - x) % d).collect(),
        }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// `k·a` for any integer `k`; the scalar is reduced per coordinate first.
    pub fn scalar_mul(&self, k: i64, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(&x, &d)| {
                    let k = k.rem_euclid(d as i64) as u128;
                    ((k * x as u128) % d as u128) as u64
                })
                .collect(),
        }
    }

    /// Least `n >= 1` with `n·a = 0`.
    pub fn order_of(&self, a: &GroupElement) -> u64 {
        a.coords
            .iter()
            .zip(&self.factors)
            .fold(1, |acc, (&c, &d)| lcm(acc, d / gcd(d, c)))
    }

    fn index_unchecked(&self, a: &GroupElement) -> usize {
        a.coords
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    fn deindex_unchecked(&self, mut i: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (slot, &d) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = (i % d as usize) as u64;
            i /= d as usize;
        }
        GroupElement { coords }
    }

    pub fn index(&self, a: &GroupElement) -> Result<ElementIndex> {
        if !self.contains(a) {
            return Err(Error::ForeignElement(a.to_string()));
        }
        Ok(ElementIndex(self.index_unchecked(a)))
    }

    pub fn deindex(&self, i: ElementIndex) -> Result<GroupElement> {
        if i.0 >= self.order {
            return Err(Error::IndexOutOfRange {
                index: i.0,
                order: self.order,
            });
        }
        Ok(self.deindex_unchecked(i.0))
    }

    /// Every element exactly once, identity first, in index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(|i| self.deindex_unchecked(i))
    }

    pub fn indices(&self) -> impl Iterator<Item = ElementIndex> {
        (0..self.order).map(ElementIndex)
    }

    // Index-level arithmetic used by the hot loops.

    #[inline]
    pub fn add_idx(&self, a: ElementIndex, b: ElementIndex) -> ElementIndex {
        match &self.tables.add {
            Some(t) => ElementIndex(t[a.0 * self.order + b.0] as usize),
            None => {
                let s = self.add(&self.deindex_unchecked(a.0), &self.deindex_unchecked(b.0));
                ElementIndex(self.index_unchecked(&s))
            }
        }
    }

    #[inline]
    pub fn neg_idx(&self, a: ElementIndex) -> ElementIndex {
        ElementIndex(self.tables.neg[a.0] as usize)
    }

    pub fn mul_idx(&self, k: i64, a: ElementIndex) -> ElementIndex {
        let e = self.scalar_mul(k, &self.deindex_unchecked(a.0));
        ElementIndex(self.index_unchecked(&e))
    }

    pub fn order_of_idx(&self, a: ElementIndex) -> u64 {
        self.order_of(&self.deindex_unchecked(a.0))
    }

    /// Canonical spec string, e.g. `C3xC3xC9`; the trivial group is `C1`.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C1");
        }
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "C{d}")?;
        }
        Ok(())
    }
}

const GROUP_GRAMMAR: &str = "`C<n>` atoms joined by `x`, optional `^k` repetition (e.g. `C3^2xC9`)";

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    /// Parses `C<n>` atoms joined by `x` with optional `^k` repetition,
    /// case-insensitively. `C1` alone denotes the trivial group.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.eq_ignore_ascii_case("c1") {
            return Ok(Self::trivial());
        }
        if trimmed.is_empty() {
            return Err(Error::parse(s, GROUP_GRAMMAR));
        }
        let mut orders = Vec::new();
        for atom in trimmed.split(['x', 'X']) {
            let atom = atom.trim();
            let body = atom
                .strip_prefix(['c', 'C'])
                .ok_or_else(|| Error::parse(atom, GROUP_GRAMMAR))?;
            let (n, reps) = match body.split_once('^') {
                Some((n, k)) => (n, k),
                None => (body, "1"),
            };
            let n: u64 = n.trim().parse().map_err(|_| Error::parse(atom, GROUP_GRAMMAR))?;
            let reps: usize = reps.trim().parse().map_err(|_| Error::parse(atom, GROUP_GRAMMAR))?;
            if n < 2 || reps == 0 {
                return Err(Error::parse(atom, "cyclic orders >= 2 and repetition >= 1"));
            }
            orders.extend(std::iter::repeat_n(n, reps));
        }
        Self::new(&orders)
    }
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.key())
    }
}

impl<'de> Deserialize<'de> for FiniteAbelianGroup {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
