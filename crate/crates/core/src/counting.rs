//! Exact computation of `N_{A,g}(S)` for every `g` at once.
//!
//! `N_{A,g}(S)` counts index sets `I ⊆ [1,|S|]` for which *some* choice of
//! weights `a_i ∈ A` gives `Σ_{i∈I} a_i g_i = g`. An index set therefore
//! contributes to every element of its achievable set, which makes the
//! dynamic program set-valued: its states are achievable sets, each carrying
//! the number of index sets that realize it.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::One;

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::group::{ElementIndex, FiniteAbelianGroup, GroupElement};
use crate::scalar::{binomial, Count};
use crate::sequence::Sequence;
use crate::weights::WeightSet;

/// Longest sequence accepted by the brute-force oracle.
pub const ORACLE_MAX_LENGTH: usize = 20;

/// Limits for [`count_vector_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConfig {
    pub max_length: usize,
    pub max_states: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            max_length: 40,
            max_states: 1 << 20,
        }
    }
}

/// `g ↦ N_{A,g}(S)` over the whole group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountVector<C> {
    counts: Vec<C>,
    sequence_length: usize,
}

impl<C: Count> CountVector<C> {
    pub fn get(&self, g: ElementIndex) -> &C {
        &self.counts[g.0]
    }

    /// `N_{A,0}(S)`.
    pub fn zero_count(&self) -> &C {
        &self.counts[0]
    }

    pub fn counts(&self) -> &[C] {
        &self.counts
    }

    pub fn sequence_length(&self) -> usize {
        self.sequence_length
    }

    pub fn total(&self) -> C {
        self.counts.iter().fold(C::zero(), |mut acc, c| {
            acc += c;
            acc
        })
    }

    /// Elements with a nonzero count.
    pub fn support(&self) -> impl Iterator<Item = ElementIndex> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| ElementIndex(i))
    }

    pub fn to_big(&self) -> CountVector<BigUint> {
        CountVector {
            counts: self.counts.iter().map(Count::to_biguint).collect(),
            sequence_length: self.sequence_length,
        }
    }
}

fn check_width<C: Count>(len: usize) -> Result<()> {
    if len as u64 > C::MAX_POW2 as u64 {
        return Err(Error::LengthLimit {
            length: len,
            limit: C::MAX_POW2 as usize,
            hint: "counts could overflow the chosen count type; use BigUint",
        });
    }
    Ok(())
}

/// [`count_vector_with`] under the default limits.
pub fn count_vector<C: Count>(group: &FiniteAbelianGroup, s: &Sequence, weights: &WeightSet) -> Result<CountVector<C>> {
    count_vector_with(group, s, weights, &CountConfig::default())
}

/// All `N_{A,g}(S)` via the achievable-set dynamic program.
///
/// Steps over the *distinct* terms of `S`. For a term `g` of multiplicity `v`,
/// choosing `j` of its copies shifts an achievable set `X` to `X ⊕ O^{(j)}`,
/// where `O = A·g` and `O^{(j)}` is its `j`-fold sumset, and there are `C(v, j)`
/// ways to pick the copies. The empty index set is tracked apart from the
/// state `{0}`: a nonempty index set can also achieve exactly `{0}`.
pub fn count_vector_with<C: Count>(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    config: &CountConfig,
) -> Result<CountVector<C>> {
    if s.len() > config.max_length {
        return Err(Error::LengthLimit {
            length: s.len(),
            limit: config.max_length,
            hint: "use the brute-force oracle or raise the limit",
        });
    }
    check_width::<C>(s.len())?;
    let n = group.order();
    let mut states: HashMap<ElementSet, C> = HashMap::new();

    for (&g, &v) in s.multiplicities() {
        let orbit = weights.orbit_indices(group, g);
        let binoms: Vec<C> = (0..=v as u64).map(|j| binomial::<C>(v as u64, j)).collect();
        let mut next: HashMap<ElementSet, C> = HashMap::with_capacity(states.len() * (v + 1));

        for (x, count) in states {
            let mut shifted = x.clone();
            for binom in &binoms[1..] {
                shifted = shifted.sumset(group, &orbit);
                *next.entry(shifted.clone()).or_insert_with(C::zero) += &(count.clone() * binom.clone());
            }
            *next.entry(x).or_insert_with(C::zero) += &count;
        }
        // Index sets whose only members so far are copies of g.
        let mut fold = ElementSet::from_indices(n, orbit.iter().copied());
        for (j, binom) in binoms.iter().enumerate().skip(1) {
            if j > 1 {
                fold = fold.sumset(group, &orbit);
            }
            *next.entry(fold.clone()).or_insert_with(C::zero) += binom;
        }

        if next.len() > config.max_states {
            return Err(Error::StateLimit {
                limit: config.max_states,
            });
        }
        states = next;
    }

    let mut counts = vec![C::zero(); n];
    counts[0] = C::one();
    for (x, count) in &states {
        for h in x.iter() {
            counts[h.0] += count;
        }
    }
    Ok(CountVector {
        counts,
        sequence_length: s.len(),
    })
}

/// Direct transcription of the definition: every index set, every member of
/// its achievable set. Works on coordinates only, independent of the dense
/// index tables and the dynamic program.
pub fn brute_force_count_vector<C: Count>(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
) -> Result<CountVector<C>> {
    if s.len() > ORACLE_MAX_LENGTH {
        return Err(Error::LengthLimit {
            length: s.len(),
            limit: ORACLE_MAX_LENGTH,
            hint: "the brute-force oracle enumerates 2^len index sets",
        });
    }
    check_width::<C>(s.len())?;
    let terms: Vec<GroupElement> = s.terms().iter().map(|&t| group.deindex(t)).collect::<Result<_>>()?;
    let orbits: Vec<Vec<GroupElement>> = terms
        .iter()
        .map(|t| weights.orbit(group, t).members().cloned().collect())
        .collect();
    let mut tally: HashMap<GroupElement, u64> = HashMap::new();
    for mask in 0u64..(1u64 << terms.len()) {
        if mask == 0 {
            *tally.entry(group.zero()).or_default() += 1;
            continue;
        }
        let mut achievable: Option<BTreeSet<GroupElement>> = None;
        for (i, orbit) in orbits.iter().enumerate() {
            if mask >> i & 1 == 0 {
                continue;
            }
            achievable = Some(match achievable {
                None => orbit.iter().cloned().collect(),
                Some(prev) => prev
                    .iter()
                    .flat_map(|x| orbit.iter().map(move |y| (x, y)))
                    .map(|(x, y)| group.add(x, y))
                    .collect(),
            });
        }
        for h in achievable.expect("nonempty index set") {
            *tally.entry(h).or_default() += 1;
        }
    }
    let mut counts = vec![C::zero(); group.order()];
    for (h, c) in tally {
        counts[group.index(&h)?.0] = C::from_u64(c);
    }
    Ok(CountVector {
        counts,
        sequence_length: s.len(),
    })
}

/// `Σ_A(S)` and `Σ_A^•(S) = Σ_A(S) ∪ {0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSupport {
    pub sigma: ElementSet,
    pub sigma_bullet: ElementSet,
}

/// Reachability fold: `R ← R ∪ A·g ∪ (R ⊕ A·g)` over the terms of `S`.
pub fn sum_support(group: &FiniteAbelianGroup, s: &Sequence, weights: &WeightSet) -> SumSupport {
    let n = group.order();
    let mut reach = ElementSet::empty(n);
    for &t in s.terms() {
        let orbit = weights.orbit_indices(group, t);
        let mut next = reach.sumset(group, &orbit);
        next.union_with(&reach);
        for &o in &orbit {
            next.insert(o);
        }
        reach = next;
    }
    let mut bullet = reach.clone();
    bullet.insert(ElementIndex::ZERO);
    SumSupport {
        sigma: reach,
        sigma_bullet: bullet,
    }
}

/// Whether `S` has no nonempty `A`-weighted zero-sum subsequence.
pub fn is_zero_sum_free(group: &FiniteAbelianGroup, s: &Sequence, weights: &WeightSet) -> bool {
    !sum_support(group, s, weights).sigma.contains(ElementIndex::ZERO)
}

/// `N0 ≥ 2^{len - D + 1}`, evaluated as `N0 · 2^{D-1} ≥ 2^{len}` so that
/// negative exponents need no special casing.
pub fn bound_holds<C: Count>(n0: &C, len: usize, davenport: usize) -> bool {
    assert!(davenport >= 1, "Davenport constants are at least 1");
    (n0.to_biguint() << (davenport - 1)) >= (BigUint::one() << len)
}

/// The extremal threshold `2^{len - D + 1}`; defined for `len ≥ D - 1`.
pub fn extremal_threshold(len: usize, davenport: usize) -> Option<BigUint> {
    (len + 1 >= davenport).then(|| BigUint::one() << (len + 1 - davenport))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn seq(v: &[usize]) -> Sequence {
        Sequence::from_indices(v.iter().map(|&i| ElementIndex(i)))
    }

    fn u64s(cv: &CountVector<u64>) -> Vec<u64> {
        cv.counts().to_vec()
    }

    #[test]
    fn oracle_hand_examples() {
        let c3 = cyc(3);
        let cv = brute_force_count_vector::<u64>(&c3, &seq(&[1, 1, 1]), &WeightSet::unit()).unwrap();
        assert_eq!(*cv.zero_count(), 2);
        assert_eq!(u64s(&cv), vec![2, 3, 3]);

        let c5 = cyc(5);
        // Index sets ∅, {1}, {2}, {1,2} achieve {0}, {1,4}, {2,3}, {1,2,3,4}.
        let cv = brute_force_count_vector::<u64>(&c5, &seq(&[1, 2]), &WeightSet::plus_minus_one()).unwrap();
        assert_eq!(u64s(&cv), vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn dp_matches_hand_examples() {
        let c3 = cyc(3);
        let cv = count_vector::<u64>(&c3, &seq(&[1, 1, 1]), &WeightSet::unit()).unwrap();
        assert_eq!(u64s(&cv), vec![2, 3, 3]);
        let c5 = cyc(5);
        let cv = count_vector::<u64>(&c5, &seq(&[1, 2]), &WeightSet::plus_minus_one()).unwrap();
        assert_eq!(u64s(&cv), vec![1, 2, 2, 2, 2]);
        let cv = count_vector::<BigUint>(&c5, &Sequence::empty(), &WeightSet::plus_minus_one()).unwrap();
        assert_eq!(cv.zero_count(), &BigUint::one());
        assert!(cv.counts()[1..].iter().all(num_traits::Zero::is_zero));
    }

    #[test]
    fn collapsing_orbit_is_not_the_empty_state() {
        // A = {3} on C_9: the index set {3} achieves exactly {0}.
        let c9 = cyc(9);
        let a = WeightSet::new([3]).unwrap();
        let s = seq(&[3]);
        let dp = count_vector::<u64>(&c9, &s, &a).unwrap();
        let oracle = brute_force_count_vector::<u64>(&c9, &s, &a).unwrap();
        assert_eq!(dp, oracle);
        assert_eq!(*dp.zero_count(), 2);
    }

    #[test]
    fn zero_term_doubles_counts() {
        let c5 = cyc(5);
        let a = WeightSet::plus_minus_one();
        let s = seq(&[1, 2, 2]);
        let base = count_vector::<u64>(&c5, &s, &a).unwrap();
        let with_zero = brute_force_count_vector::<u64>(&c5, &s.append(ElementIndex::ZERO), &a).unwrap();
        let doubled: Vec<u64> = base.counts().iter().map(|c| 2 * c).collect();
        assert_eq!(with_zero.counts(), &doubled[..]);
    }

    #[test]
    fn limits() {
        let c5 = cyc(5);
        let a = WeightSet::unit();
        let long = Sequence::from_indices(std::iter::repeat_n(ElementIndex(1), 41));
        assert!(matches!(
            count_vector::<BigUint>(&c5, &long, &a),
            Err(Error::LengthLimit { .. })
        ));
        let cfg = CountConfig {
            max_length: 64,
            ..CountConfig::default()
        };
        let too_wide = Sequence::from_indices(std::iter::repeat_n(ElementIndex(1), 64));
        assert!(matches!(
            count_vector_with::<u64>(&c5, &too_wide, &a, &cfg),
            Err(Error::LengthLimit { .. })
        ));
        let big = count_vector_with::<BigUint>(&c5, &long, &a, &cfg).unwrap();
        assert_eq!(big.total(), BigUint::one() << 41);
        let oracle_long = Sequence::from_indices(std::iter::repeat_n(ElementIndex(1), 21));
        assert!(matches!(
            brute_force_count_vector::<u64>(&c5, &oracle_long, &a),
            Err(Error::LengthLimit { .. })
        ));
        let tiny = CountConfig {
            max_length: 40,
            max_states: 2,
        };
        let c7 = cyc(7);
        assert!(matches!(
            count_vector_with::<u64>(&c7, &seq(&[1, 2, 3]), &WeightSet::plus_minus_one(), &tiny),
            Err(Error::StateLimit { limit: 2 })
        ));
    }

    #[test]
    fn sum_support_examples() {
        let c5 = cyc(5);
        let a = WeightSet::plus_minus_one();
        let ss = sum_support(&c5, &seq(&[1, 2]), &a);
        assert_eq!(ss.sigma.iter().map(|i| i.0).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert!(ss.sigma_bullet.is_full());
        let empty = sum_support(&c5, &Sequence::empty(), &a);
        assert!(empty.sigma.is_empty());
        assert_eq!(empty.sigma_bullet.iter().collect::<Vec<_>>(), vec![ElementIndex::ZERO]);
    }

    #[test]
    fn zero_sum_freeness() {
        let c5 = cyc(5);
        let a = WeightSet::plus_minus_one();
        assert!(is_zero_sum_free(&c5, &seq(&[1, 2]), &a));
        assert!(!is_zero_sum_free(&c5, &seq(&[1, 1]), &a));
        assert!(!is_zero_sum_free(&c5, &seq(&[0]), &a));
        assert!(!is_zero_sum_free(&c5, &seq(&[3, 0, 4]), &WeightSet::unit()));
        assert!(is_zero_sum_free(&c5, &Sequence::empty(), &a));
    }

    #[test]
    fn bound_examples() {
        assert!(bound_holds(&2u64, 6, 6));
        assert!(!bound_holds(&1u64, 6, 6));
        assert!(bound_holds(&1u64, 0, 3));
        assert!(bound_holds(&BigUint::from(3u32), 3, 3));
        assert!(bound_holds(&3u64, 3, 3) && !bound_holds(&1u64, 3, 3));
        assert_eq!(extremal_threshold(6, 6), Some(BigUint::from(2u32)));
        assert_eq!(extremal_threshold(1, 3), None);
        assert_eq!(extremal_threshold(2, 3), Some(BigUint::one()));
    }
}
