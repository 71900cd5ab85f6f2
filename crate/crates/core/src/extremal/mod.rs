//! Extremal sequences: those with `N_{A,0}(S) = 2^{|S| - D_A(G) + 1}`.
//!
//! Besides enumeration and `E(S)`, this module holds one check per structural
//! claim about extremal sequences. Each check reports [`CheckOutcome::Skipped`]
//! when its hypotheses do not apply, so sweeps can run them on every instance.

mod structure;

pub use structure::{decompose_theorem11, fp_rank, fp_solve, theorem11_form, ExtraTerm, StructureDecomposition};

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rayon::prelude::*;

use crate::bitset::ElementSet;
use crate::counting::{count_vector, extremal_threshold, sum_support, CountVector};
use crate::davenport::{max_zero_sum_free, SearchOptions};
use crate::error::{Error, Result};
use crate::group::{ElementIndex, FiniteAbelianGroup};
use crate::sequence::{enumerate_sequences, multiset_count, Sequence};
use crate::weights::WeightSet;

type Counts = CountVector<BigUint>;

fn counts(group: &FiniteAbelianGroup, s: &Sequence, weights: &WeightSet) -> Result<Counts> {
    count_vector::<BigUint>(group, s, weights)
}

/// `E(S) = {g : N_{A,g}(S) = 2^{|S|-D+1}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ESet {
    pub members: ElementSet,
    pub threshold: BigUint,
}

pub fn e_set(group: &FiniteAbelianGroup, s: &Sequence, weights: &WeightSet, davenport: usize) -> Result<ESet> {
    let threshold = extremal_threshold(s.len(), davenport)
        .ok_or_else(|| Error::Precondition(format!("E(S) needs |S| >= D - 1 (|S| = {}, D = {davenport})", s.len())))?;
    let cv = counts(group, s, weights)?;
    Ok(e_set_from_counts(&cv, threshold))
}

fn e_set_from_counts(cv: &Counts, threshold: BigUint) -> ESet {
    let members = ElementSet::from_indices(
        cv.counts().len(),
        cv.counts()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == threshold)
            .map(|(i, _)| ElementIndex(i)),
    );
    ESet { members, threshold }
}

pub fn is_extremal(group: &FiniteAbelianGroup, s: &Sequence, weights: &WeightSet, davenport: usize) -> Result<bool> {
    let Some(threshold) = extremal_threshold(s.len(), davenport) else {
        return Ok(false);
    };
    Ok(*counts(group, s, weights)?.zero_count() == threshold)
}

/// Result of [`enumerate_extremal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalEnumeration {
    pub length: usize,
    pub sequences: Vec<Sequence>,
    pub examined: u128,
    /// False when the budget cut the enumeration short.
    pub complete: bool,
}

/// Every canonical `S` over `G \ {0}` of the given length with
/// `N_{A,0}(S) = 2^{length - D + 1}`.
pub fn enumerate_extremal(
    group: &FiniteAbelianGroup,
    weights: &WeightSet,
    davenport: usize,
    length: usize,
    budget: u64,
) -> Result<ExtremalEnumeration> {
    let threshold = extremal_threshold(length, davenport)
        .ok_or_else(|| Error::Precondition(format!("length {length} is below D - 1 = {}", davenport - 1)))?;
    let support: Vec<ElementIndex> = group.indices().skip(1).collect();
    let total = multiset_count(support.len(), length);
    let take = total.min(budget as u128) as usize;
    let candidates: Vec<Sequence> = enumerate_sequences(&support, length).take(take).collect();
    let flags = candidates
        .par_iter()
        .map(|s| counts(group, s, weights).map(|cv| *cv.zero_count() == threshold))
        .collect::<Result<Vec<bool>>>()?;
    let sequences = candidates
        .into_iter()
        .zip(flags)
        .filter_map(|(s, keep)| keep.then_some(s))
        .collect();
    Ok(ExtremalEnumeration {
        length,
        sequences,
        examined: take as u128,
        complete: take as u128 == total,
    })
}

/// Largest length in `[D-1, max_length]` that has an extremal sequence, or
/// `None` if none does (or the budget stops the scan first).
pub fn max_extremal_length(
    group: &FiniteAbelianGroup,
    weights: &WeightSet,
    davenport: usize,
    max_length: usize,
    budget: u64,
) -> Result<Option<usize>> {
    let mut best = None;
    for len in davenport.saturating_sub(1)..=max_length {
        let e = enumerate_extremal(group, weights, davenport, len, budget)?;
        if !e.complete {
            break;
        }
        if !e.sequences.is_empty() {
            best = Some(len);
        }
    }
    Ok(best)
}

/// `U · 0^{k - D + 1}` for a longest zero-sum-free `U`, with full weights.
///
/// With `A = [1, exp(G)-1]` this attains `N_{A,g} = N_{A,0} = 2^{k-D+1}` for
/// every `g`.
pub fn construct_extremal_with_zeros(
    group: &FiniteAbelianGroup,
    weights: &WeightSet,
    k: usize,
    options: &SearchOptions,
) -> Result<Sequence> {
    if !weights.acts_as_full(group) {
        return Err(Error::Precondition(format!(
            "weights {weights} are not [1, exp(G)-1] on {group}"
        )));
    }
    let search = max_zero_sum_free(group, weights, options);
    let d = search.davenport(options.node_budget)?;
    if k + 1 < d {
        return Err(Error::Precondition(format!("k = {k} is below D - 1 = {}", d - 1)));
    }
    let mut s = search.witnesses[0].clone();
    for _ in 0..(k + 1 - d) {
        s = s.append(ElementIndex::ZERO);
    }
    Ok(s)
}

/// Outcome of a single structural check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail(String),
    Skipped(String),
}

impl CheckOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, CheckOutcome::Fail(_))
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, CheckOutcome::Skipped(_))
    }

    fn from_bool(ok: bool, why: impl FnOnce() -> String) -> Self {
        if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail(why())
        }
    }
}

fn skip(reason: impl Into<String>) -> Result<CheckOutcome> {
    Ok(CheckOutcome::Skipped(reason.into()))
}

/// For extremal `S`: `Σ_A^•(S) = G` and `N_{A,g}(S) ≥ 2^{|S|-D+1}` for all `g`.
pub fn check_corollary3(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    davenport: usize,
) -> Result<CheckOutcome> {
    let Some(threshold) = extremal_threshold(s.len(), davenport) else {
        return skip("|S| < D - 1");
    };
    let cv = counts(group, s, weights)?;
    if *cv.zero_count() != threshold {
        return skip("not extremal");
    }
    let support = sum_support(group, s, weights);
    if !support.sigma_bullet.is_full() {
        let missing = group
            .indices()
            .find(|&g| !support.sigma_bullet.contains(g))
            .expect("not full");
        return Ok(CheckOutcome::Fail(format!("element #{} is not in Σ_A^•(S)", missing.0)));
    }
    if let Some((g, c)) = cv.counts().iter().enumerate().find(|(_, c)| **c < threshold) {
        return Ok(CheckOutcome::Fail(format!("N at element #{g} is {c} < {threshold}")));
    }
    Ok(CheckOutcome::Pass)
}

/// Both sides of `N_{A,g}(S) = N_{A,0}(S·(-g)) - N_{A,0}(S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtractionIdentity {
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl SubtractionIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluates the subtraction identity used to bound `N_{A,g}`. It is exact
/// whenever `A·g ⊆ {g, -g}` and `Σ_A` sets are negation-closed (e.g. `A = {1}`
/// or `A ≡ {±1}`), but can fail for other weight sets.
pub fn subtraction_identity(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    g: ElementIndex,
) -> Result<SubtractionIdentity> {
    let base = counts(group, s, weights)?;
    let extended = counts(group, &s.append(group.neg_idx(g)), weights)?;
    Ok(SubtractionIdentity {
        lhs: BigInt::from(base.get(g).clone()),
        rhs: BigInt::from(extended.zero_count().clone()) - BigInt::from(base.zero_count().clone()),
    })
}

/// `N_{A,g}(S) = N_{A,0}(S)` whenever `g | S`, for `A ≡ {±1}`.
pub fn check_corollary4(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    g: ElementIndex,
) -> Result<CheckOutcome> {
    if !weights.acts_as_plus_minus_one(group) {
        return skip("weights do not act as {-1,1}");
    }
    if !s.contains(g) {
        return skip("g does not divide S");
    }
    let cv = counts(group, s, weights)?;
    Ok(CheckOutcome::from_bool(cv.get(g) == cv.zero_count(), || {
        format!("N_g = {} but N_0 = {}", cv.get(g), cv.zero_count())
    }))
}

/// `E(S) ⊆ E(S·a^{-1})` for `0 ∤ S`, `0 ∈ E(S)`, and either `v_a(S) ≥ 2` or
/// `v_a(S) = v_{-a}(S) = 1` with `a ≠ -a`.
pub fn check_lemma6(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    a: ElementIndex,
    davenport: usize,
) -> Result<CheckOutcome> {
    if !weights.acts_as_plus_minus_one(group) {
        return skip("weights do not act as {-1,1}");
    }
    if s.contains(ElementIndex::ZERO) {
        return skip("0 divides S");
    }
    if s.len() < davenport {
        return skip("E(S·a^{-1}) needs |S| >= D");
    }
    let neg = group.neg_idx(a);
    let hypothesis = s.multiplicity(a) >= 2 || (s.multiplicity(a) == 1 && neg != a && s.multiplicity(neg) == 1);
    if !hypothesis {
        return skip("multiplicity hypothesis on a fails");
    }
    let outer = e_set(group, s, weights, davenport)?;
    if !outer.members.contains(ElementIndex::ZERO) {
        return skip("0 is not in E(S)");
    }
    let inner = e_set(group, &s.remove_one(a)?, weights, davenport)?;
    let missing = outer.members.iter().find(|&h| !inner.members.contains(h));
    Ok(match missing {
        None => CheckOutcome::Pass,
        Some(h) => CheckOutcome::Fail(format!("element #{} is in E(S) but not in E(S·a^-1)", h.0)),
    })
}

/// `N_{A,0}(S) > 2^{|S|-D+1}` whenever some `g` with `o(g) ≠ 2` has `v_g(S) ≥ 3`.
pub fn check_proposition7(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    davenport: usize,
) -> Result<CheckOutcome> {
    if !weights.acts_as_plus_minus_one(group) {
        return skip("weights do not act as {-1,1}");
    }
    if s.contains(ElementIndex::ZERO) {
        return skip("0 divides S");
    }
    let Some(threshold) = extremal_threshold(s.len(), davenport) else {
        return skip("|S| < D - 1");
    };
    let triple = s
        .multiplicities()
        .iter()
        .any(|(&g, &v)| v >= 3 && group.order_of_idx(g) != 2);
    if !triple {
        return skip("no term of order != 2 repeated three times");
    }
    let cv = counts(group, s, weights)?;
    Ok(CheckOutcome::from_bool(*cv.zero_count() > threshold, || {
        format!("N_0 = {} is not above {threshold}", cv.zero_count())
    }))
}

/// Whether a multiplicity histogram is all ones, or all ones plus exactly one 2.
fn at_most_one_double(profile: &BTreeMap<usize, usize>) -> bool {
    profile.keys().all(|&m| m <= 2) && profile.get(&2).copied().unwrap_or(0) <= 1
}

/// Multiplicity structure of extremal sequences over odd-order groups with
/// `A = {±1}`: squarefree at `|S| = D-1`; at most one doubled term for
/// `|S| ≥ D` when `G` has no element of order 3.
pub fn check_theorem8(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    davenport: usize,
) -> Result<CheckOutcome> {
    if group.order().is_multiple_of(2) {
        return skip("|G| is even");
    }
    if !weights.acts_as_plus_minus_one(group) {
        return skip("weights do not act as {-1,1}");
    }
    if s.contains(ElementIndex::ZERO) {
        return skip("0 divides S");
    }
    let Some(threshold) = extremal_threshold(s.len(), davenport) else {
        return skip("|S| < D - 1");
    };
    if *counts(group, s, weights)?.zero_count() != threshold {
        return skip("not extremal");
    }
    let profile = s.multiplicity_profile();
    if s.len() + 1 == davenport {
        return Ok(CheckOutcome::from_bool(s.is_squarefree(), || {
            format!("|S| = D-1 but profile is {profile:?}")
        }));
    }
    if group.order().is_multiple_of(3) {
        return skip("G has elements of order 3");
    }
    Ok(CheckOutcome::from_bool(at_most_one_double(&profile), || {
        format!("profile {profile:?} has more than one doubled term")
    }))
}

/// Runs [`decompose_theorem11`] on an extremal `S` over `C_p^r` with full
/// weights and checks `r ≤ |S| ≤ 2r` and disjointness of the supports.
pub fn check_theorem11(
    group: &FiniteAbelianGroup,
    s: &Sequence,
    weights: &WeightSet,
    davenport: usize,
) -> Result<CheckOutcome> {
    let Some(p) = group.elementary_prime() else {
        return skip("G is not elementary abelian");
    };
    if p == 2 {
        return skip("p must be odd");
    }
    if !weights.acts_as_full(group) {
        return skip("weights are not [1, p-1]");
    }
    if s.contains(ElementIndex::ZERO) {
        return skip("0 divides S");
    }
    if !is_extremal(group, s, weights, davenport)? {
        return skip("not extremal");
    }
    let r = group.rank();
    if s.len() < r || s.len() > 2 * r {
        return Ok(CheckOutcome::Fail(format!(
            "|S| = {} outside [{r}, {}]",
            s.len(),
            2 * r
        )));
    }
    match decompose_theorem11(group, s)? {
        Some(d) if d.supports_disjoint() && d.extras.len() <= r => Ok(CheckOutcome::Pass),
        Some(d) => Ok(CheckOutcome::Fail(format!("invalid decomposition {d:?}"))),
        None => Ok(CheckOutcome::Fail("no basis with pairwise disjoint supports".into())),
    }
}

/// `2^k`, the zero count predicted for the basis-plus-`k`-extras form.
pub fn theorem11_form_count(k: usize) -> BigUint {
    BigUint::one() << k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::brute_force_count_vector;

    fn cyc(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn seq(v: &[usize]) -> Sequence {
        Sequence::from_indices(v.iter().map(|&i| ElementIndex(i)))
    }

    #[test]
    fn e_set_examples() {
        let c5 = cyc(5);
        let pm = WeightSet::plus_minus_one();
        // Counts of (1)(2) are [1, 2, 2, 2, 2], so only 0 meets the threshold 1.
        let e = e_set(&c5, &seq(&[1, 2]), &pm, 3).unwrap();
        assert_eq!(e.threshold, BigUint::one());
        assert_eq!(e.members.iter().collect::<Vec<_>>(), vec![ElementIndex::ZERO]);

        let non = seq(&[1, 1, 2, 2, 3]);
        let e = e_set(&c5, &non, &pm, 3).unwrap();
        assert_eq!(e.threshold, BigUint::from(8u32));
        assert!(!e.members.contains(ElementIndex::ZERO));
        let oracle = brute_force_count_vector::<u64>(&c5, &non, &pm).unwrap();
        assert!(*oracle.zero_count() > 8);

        assert!(e_set(&c5, &seq(&[1]), &pm, 3).is_err());
    }

    #[test]
    fn enumerate_extremal_c3sq_length2_is_independent_pairs() {
        let g = FiniteAbelianGroup::elementary(3, 2).unwrap();
        let full = WeightSet::full(&g).unwrap();
        let e = enumerate_extremal(&g, &full, 3, 2, u64::MAX).unwrap();
        assert!(e.complete);
        let independent: Vec<Sequence> = enumerate_sequences(&g.indices().skip(1).collect::<Vec<_>>(), 2)
            .filter(|s| {
                let v: Vec<Vec<u64>> = s
                    .terms()
                    .iter()
                    .map(|&t| g.deindex(t).unwrap().coords().to_vec())
                    .collect();
                fp_rank(&v, 3) == 2
            })
            .collect();
        assert_eq!(e.sequences, independent);
        assert_eq!(independent.len(), 24);
    }

    #[test]
    fn enumerate_extremal_budget() {
        let c5 = cyc(5);
        let e = enumerate_extremal(&c5, &WeightSet::plus_minus_one(), 3, 3, 5).unwrap();
        assert!(!e.complete);
        assert_eq!(e.examined, 5);
        assert!(enumerate_extremal(&c5, &WeightSet::plus_minus_one(), 3, 1, 5).is_err());
    }

    #[test]
    fn construction_with_zeros() {
        let opts = SearchOptions::default();
        let g = FiniteAbelianGroup::elementary(3, 2).unwrap();
        let full = WeightSet::full(&g).unwrap();
        let s = construct_extremal_with_zeros(&g, &full, 3, &opts).unwrap();
        assert_eq!(s.len(), 3);
        let cv = count_vector::<u64>(&g, &s, &full).unwrap();
        assert!(cv.counts().iter().all(|&c| c == 2));

        let s = construct_extremal_with_zeros(&g, &full, 2, &opts).unwrap();
        let cv = count_vector::<u64>(&g, &s, &full).unwrap();
        assert!(cv.counts().iter().all(|&c| c == 1));

        let c5 = cyc(5);
        let full5 = WeightSet::full(&c5).unwrap();
        let s = construct_extremal_with_zeros(&c5, &full5, 4, &opts).unwrap();
        assert_eq!(s, seq(&[1, 0, 0, 0]));
        let oracle = brute_force_count_vector::<u64>(&c5, &s, &full5).unwrap();
        assert_eq!(*oracle.get(ElementIndex(3)), 8);
        assert_eq!(*oracle.zero_count(), 8);

        assert!(construct_extremal_with_zeros(&c5, &WeightSet::plus_minus_one(), 4, &opts).is_err());
        assert!(construct_extremal_with_zeros(&c5, &full5, 0, &opts).is_err());
    }

    #[test]
    fn corollary4_examples() {
        let c5 = cyc(5);
        let pm = WeightSet::plus_minus_one();
        // (1)(2) is extremal, yet {1} and {1,2} both reach 1 while only ∅ reaches 0.
        assert!(is_extremal(&c5, &seq(&[1, 2]), &pm, 3).unwrap());
        assert!(check_corollary4(&c5, &seq(&[1, 2]), &pm, ElementIndex(1))
            .unwrap()
            .is_fail());
        assert_eq!(
            check_corollary4(&c5, &seq(&[1, 1]), &pm, ElementIndex(1)).unwrap(),
            CheckOutcome::Pass
        );
        assert!(check_corollary4(&c5, &seq(&[1, 2]), &pm, ElementIndex(3))
            .unwrap()
            .is_skipped());
        assert!(
            check_corollary4(&c5, &seq(&[1, 2]), &WeightSet::unit(), ElementIndex(1))
                .unwrap()
                .is_skipped()
        );

        let g = FiniteAbelianGroup::new(&[3, 3, 9]).unwrap();
        let s = Sequence::parse("(1,0,0)*2,(0,1,0),(0,0,1),(0,0,2),(0,0,4)", &g).unwrap();
        let e1 = g.index(&g.basis_element(0)).unwrap();
        // Index sets {1}, {2} and {1,2} all reach e_1 (2e_1 = -e_1 in C_3), while only ∅ and {1,2} reach 0.
        let cv = count_vector::<u64>(&g, &s, &pm).unwrap();
        assert_eq!((*cv.get(e1), *cv.zero_count()), (3, 2));
        assert!(check_corollary4(&g, &s, &pm, e1).unwrap().is_fail());
    }

    #[test]
    fn lemma6_example_ii() {
        let g = FiniteAbelianGroup::elementary(3, 2).unwrap();
        let pm = WeightSet::plus_minus_one();
        let e1 = g.index(&g.basis_element(0)).unwrap();
        let e2 = g.index(&g.basis_element(1)).unwrap();
        let s = Sequence::from_indices([e1, e1, e2, e2]);
        assert_eq!(check_lemma6(&g, &s, &pm, e1, 3).unwrap(), CheckOutcome::Pass);
        let squarefree = Sequence::from_indices([e1, e2, g.add_idx(e1, e2)]);
        assert!(check_lemma6(&g, &squarefree, &pm, e1, 3).unwrap().is_skipped());
    }

    #[test]
    fn proposition7_examples() {
        let c5 = cyc(5);
        let pm = WeightSet::plus_minus_one();
        let triple = seq(&[1, 1, 1]);
        assert_eq!(
            *brute_force_count_vector::<u64>(&c5, &triple, &pm).unwrap().zero_count(),
            4
        );
        assert_eq!(check_proposition7(&c5, &triple, &pm, 3).unwrap(), CheckOutcome::Pass);
        assert_eq!(
            check_proposition7(&c5, &seq(&[1, 1, 1, 2]), &pm, 3).unwrap(),
            CheckOutcome::Pass
        );
        assert!(check_proposition7(&c5, &seq(&[1, 1, 2]), &pm, 3).unwrap().is_skipped());
    }

    #[test]
    fn theorem8_preconditions() {
        let g = FiniteAbelianGroup::elementary(3, 2).unwrap();
        let pm = WeightSet::plus_minus_one();
        let e1 = g.index(&g.basis_element(0)).unwrap();
        let e2 = g.index(&g.basis_element(1)).unwrap();
        let s = Sequence::from_indices([e1, e1, e2, e2]);
        // Extremal with two doubled terms; excluded because C_3^2 has order-3 elements.
        assert!(is_extremal(&g, &s, &pm, 3).unwrap());
        assert!(!at_most_one_double(&s.multiplicity_profile()));
        assert!(check_theorem8(&g, &s, &pm, 3).unwrap().is_skipped());
        let even = FiniteAbelianGroup::elementary(2, 2).unwrap();
        assert!(check_theorem8(&even, &Sequence::empty(), &pm, 3).unwrap().is_skipped());
    }

    #[test]
    fn theorem11_overlap_is_not_extremal() {
        let g = FiniteAbelianGroup::elementary(3, 2).unwrap();
        let full = WeightSet::full(&g).unwrap();
        let e = |c: &[i64]| g.index(&g.element(c).unwrap()).unwrap();
        let s = Sequence::from_indices([e(&[1, 0]), e(&[0, 1]), e(&[1, 1]), e(&[2, 1])]);
        assert_eq!(*brute_force_count_vector::<u64>(&g, &s, &full).unwrap().zero_count(), 5);
        assert!(check_theorem11(&g, &s, &full, 3).unwrap().is_skipped());
        let ok = Sequence::from_indices([e(&[1, 0]), e(&[0, 1]), e(&[1, 1])]);
        assert_eq!(check_theorem11(&g, &ok, &full, 3).unwrap(), CheckOutcome::Pass);
    }

    #[test]
    fn subtraction_identity_for_unit_weights() {
        let c7 = cyc(7);
        for s in enumerate_sequences(&c7.indices().collect::<Vec<_>>(), 3) {
            for g in c7.indices() {
                assert!(subtraction_identity(&c7, &s, &WeightSet::unit(), g).unwrap().holds());
            }
        }
    }
}
