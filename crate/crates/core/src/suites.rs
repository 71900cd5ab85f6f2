//! Named verification suites: exhaustive desk-scale sweeps and seeded
//! randomized trials, each producing a [`SuiteReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Catalog, CatalogEntry};
use crate::counting::{
    bound_holds, brute_force_count_vector, count_vector, extremal_threshold, sum_support, CountVector,
};
use crate::davenport::{
    max_zero_sum_free, verify_every_length_d_sequence_has_zero_sum, DavenportResult, LengthCheck, SearchOptions,
};
use crate::error::{Error, Result};
use crate::extremal::{
    check_corollary3, check_corollary4, check_lemma6, check_proposition7, check_theorem11, check_theorem8,
    construct_extremal_with_zeros, enumerate_extremal, max_extremal_length, subtraction_identity, theorem11_form,
    CheckOutcome,
};
use crate::group::{ElementIndex, FiniteAbelianGroup};
use crate::sequence::{enumerate_sequences, GPlusPartition, Sequence};
use crate::weights::WeightSet;

/// Failures kept verbatim in a report; the rest are only counted.
const MAX_LISTED_FAILURES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Examples,
    Eq1,
    Thm2,
    Oracle,
    Properties,
    Cor3,
    Cor3Identity,
    Cor4,
    Lemma6,
    Prop7,
    Fact7,
    Thm8,
    Thm11,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Examples,
        Suite::Eq1,
        Suite::Thm2,
        Suite::Oracle,
        Suite::Properties,
        Suite::Cor3,
        Suite::Cor3Identity,
        Suite::Cor4,
        Suite::Lemma6,
        Suite::Prop7,
        Suite::Fact7,
        Suite::Thm8,
        Suite::Thm11,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Examples => "examples",
            Suite::Eq1 => "eq1",
            Suite::Thm2 => "thm2",
            Suite::Oracle => "oracle",
            Suite::Properties => "properties",
            Suite::Cor3 => "cor3",
            Suite::Cor3Identity => "cor3-identity",
            Suite::Cor4 => "cor4",
            Suite::Lemma6 => "lemma6",
            Suite::Prop7 => "prop7",
            Suite::Fact7 => "fact7",
            Suite::Thm8 => "thm8",
            Suite::Thm11 => "thm11",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::parse(s, format!("one of {} or `all`", names.join(", ")))
            })
    }
}

/// Tally of one suite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instances: u64,
    pub passes: u64,
    pub failed: u64,
    pub failures: Vec<String>,
    pub skipped: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: Suite) -> Self {
        SuiteReport {
            suite: suite.name().to_string(),
            instances: 0,
            passes: 0,
            failed: 0,
            failures: Vec::new(),
            skipped: 0,
            observations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn record(&mut self, outcome: &CheckOutcome, label: impl FnOnce() -> String) {
        self.instances += 1;
        match outcome {
            CheckOutcome::Pass => self.passes += 1,
            CheckOutcome::Skipped(_) => self.skipped += 1,
            CheckOutcome::Fail(why) => {
                self.failed += 1;
                if self.failures.len() < MAX_LISTED_FAILURES {
                    self.failures.push(format!("{}: {why}", label()));
                }
            }
        }
    }

    pub fn check(&mut self, ok: bool, label: impl FnOnce() -> String) {
        let outcome = if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail("claim falsified".into())
        };
        self.record(&outcome, label);
    }

    pub fn observe(&mut self, note: impl Into<String>) {
        self.observations.push(note.into());
    }
}

/// Shared state for suite runs: seed, limits, and a Davenport cache.
pub struct SuiteContext {
    pub seed: u64,
    pub search: SearchOptions,
    /// Cap on sequences enumerated by a single exhaustive step.
    pub enumeration_budget: u64,
    known: BTreeMap<(String, String), usize>,
    computed: Mutex<Vec<(FiniteAbelianGroup, WeightSet, DavenportResult)>>,
}

impl SuiteContext {
    pub fn new(seed: u64) -> Self {
        SuiteContext {
            seed,
            search: SearchOptions::default(),
            enumeration_budget: 5_000_000,
            known: BTreeMap::new(),
            computed: Mutex::new(Vec::new()),
        }
    }

    /// Preloads exact entries of a catalog; inexact ones are ignored.
    pub fn with_catalog(mut self, catalog: &Catalog) -> Self {
        for e in catalog.entries().filter(|e| e.exact) {
            self.known
                .insert((e.group_key.clone(), e.weight_key.clone()), e.davenport);
        }
        self
    }

    pub fn davenport(&self, group: &FiniteAbelianGroup, weights: &WeightSet) -> Result<usize> {
        let key = (group.key(), weights.canonical_name());
        if let Some(&d) = self.known.get(&key) {
            return Ok(d);
        }
        let mut computed = self.computed.lock().expect("cache lock");
        if let Some((_, _, r)) = computed.iter().find(|(g, w, _)| g == group && w == weights) {
            return r.davenport(self.search.node_budget);
        }
        let r = max_zero_sum_free(group, weights, &self.search);
        let d = r.davenport(self.search.node_budget);
        computed.push((group.clone(), weights.clone(), r));
        d
    }

    /// Catalog entries for every search this context ran.
    pub fn new_catalog_entries(&self, timestamp: &str) -> Vec<CatalogEntry> {
        self.computed
            .lock()
            .expect("cache lock")
            .iter()
            .map(|(g, w, r)| CatalogEntry::from_result(g, w, r, timestamp))
            .collect()
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (suite as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

pub fn run_suite(suite: Suite, ctx: &SuiteContext) -> Result<SuiteReport> {
    match suite {
        Suite::Examples => examples(ctx),
        Suite::Eq1 => eq1(ctx),
        Suite::Thm2 => thm2(ctx),
        Suite::Oracle => oracle(ctx),
        Suite::Properties => properties(ctx),
        Suite::Cor3 => cor3(ctx),
        Suite::Cor3Identity => cor3_identity(ctx),
        Suite::Cor4 => cor4(ctx),
        Suite::Lemma6 => lemma6(ctx),
        Suite::Prop7 => prop7(ctx),
        Suite::Fact7 => fact7(ctx),
        Suite::Thm8 => thm8(ctx),
        Suite::Thm11 => thm11(ctx),
    }
}

fn big(cv: &CountVector<BigUint>, g: ElementIndex) -> &BigUint {
    cv.get(g)
}

fn n0(group: &FiniteAbelianGroup, s: &Sequence, weights: &WeightSet) -> Result<BigUint> {
    Ok(count_vector::<BigUint>(group, s, weights)?.zero_count().clone())
}

fn nonzero(group: &FiniteAbelianGroup) -> Vec<ElementIndex> {
    group.indices().skip(1).collect()
}

fn elem(group: &FiniteAbelianGroup, coords: &[i64]) -> Result<ElementIndex> {
    group.index(&group.element(coords)?)
}

fn label(group: &FiniteAbelianGroup, weights: &WeightSet, s: &Sequence) -> String {
    format!("{group} A={weights} S={}", s.to_literal(group))
}

/// Runs `check` over `items` in parallel and records outcomes in input order.
fn sweep<T, F>(report: &mut SuiteReport, items: &[T], check: F) -> Result<()>
where
    T: Sync,
    F: Fn(&T) -> Result<(CheckOutcome, String)> + Sync,
{
    let outcomes = items.par_iter().map(&check).collect::<Result<Vec<_>>>()?;
    for (outcome, lbl) in outcomes {
        report.record(&outcome, || lbl);
    }
    Ok(())
}

/// All extremal sequences (over `G \ {0}`) for every length in `lengths`.
fn extremal_family(
    ctx: &SuiteContext,
    group: &FiniteAbelianGroup,
    weights: &WeightSet,
    lengths: impl IntoIterator<Item = usize>,
) -> Result<(usize, Vec<Sequence>)> {
    let d = ctx.davenport(group, weights)?;
    let mut out = Vec::new();
    for len in lengths {
        if len + 1 < d {
            continue;
        }
        let e = enumerate_extremal(group, weights, d, len, ctx.enumeration_budget)?;
        if !e.complete {
            return Err(Error::BudgetExhausted {
                budget: ctx.enumeration_budget,
            });
        }
        out.extend(e.sequences);
    }
    Ok((d, out))
}

fn examples(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Examples);
    let pm = WeightSet::plus_minus_one();

    for r in 1..=3 {
        let g = FiniteAbelianGroup::elementary(3, r)?;
        let s = Sequence::from_indices((0..r).flat_map(|i| {
            let e = g.index(&g.basis_element(i)).expect("basis");
            [e, e]
        }));
        let n = n0(&g, &s, &pm)?;
        let d = ctx.davenport(&g, &pm)?;
        report.check(
            n == BigUint::one() << r && extremal_threshold(s.len(), d) == Some(n.clone()),
            || format!("example ii r={r}: N_0 = {n}, D = {d}"),
        );
    }

    let c2_4 = FiniteAbelianGroup::elementary(2, 4)?;
    let e: Vec<ElementIndex> = (0..4)
        .map(|i| c2_4.index(&c2_4.basis_element(i)))
        .collect::<Result<_>>()?;
    for m in 4..=10usize {
        let mut terms = vec![e[0]; m - 3];
        terms.extend_from_slice(&e[1..]);
        let s = Sequence::from_indices(terms);
        let n = n0(&c2_4, &s, &pm)?;
        report.check(n == BigUint::one() << (m - 4), || format!("example i m={m}: N_0 = {n}"));
    }

    let g = FiniteAbelianGroup::new(&[3, 3, 9])?;
    let d = ctx.davenport(&g, &pm)?;
    report.check(d == 6, || format!("example iii: D = {d}, expected 6"));
    let s = Sequence::parse("(1,0,0)*2,(0,1,0),(0,0,1),(0,0,2),(0,0,4)", &g)?;
    let n = n0(&g, &s, &pm)?;
    report.check(
        n == BigUint::from(2u32) && extremal_threshold(s.len(), d) == Some(n.clone()),
        || format!("example iii: N_0 = {n}"),
    );
    Ok(report)
}

/// `(p, r)` pairs for the full-weight Davenport sweep.
pub const EQ1_CASES: [(u64, usize); 6] = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)];

fn eq1(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Eq1);
    for (p, r) in EQ1_CASES {
        let g = FiniteAbelianGroup::elementary(p, r)?;
        let full = WeightSet::full(&g)?;
        let d = ctx.davenport(&g, &full)?;
        report.check(d == r + 1, || format!("C{p}^{r}: D = {d}, expected {}", r + 1));
        match verify_every_length_d_sequence_has_zero_sum(&g, &full, d, ctx.enumeration_budget) {
            LengthCheck::Holds { .. } => report.check(true, String::new),
            LengthCheck::Counterexample(s) => report.check(false, || label(&g, &full, &s)),
            LengthCheck::Skipped { required, .. } => {
                report.record(&CheckOutcome::Skipped(format!("{required} sequences")), String::new)
            }
        }
        let below = verify_every_length_d_sequence_has_zero_sum(&g, &full, d - 1, ctx.enumeration_budget);
        report.check(below.holds() != Some(true), || {
            format!("C{p}^{r}: no zero-sum-free sequence of length D-1")
        });
    }
    Ok(report)
}

fn thm2(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Thm2);
    let cases = [
        (FiniteAbelianGroup::cyclic(5)?, WeightSet::plus_minus_one(), 7usize),
        (FiniteAbelianGroup::elementary(3, 2)?, WeightSet::new([1, 2])?, 6),
    ];
    for (g, a, max_len) in &cases {
        let d = ctx.davenport(g, a)?;
        let support = nonzero(g);
        for len in 0..=*max_len {
            let seqs: Vec<Sequence> = enumerate_sequences(&support, len).collect();
            sweep(&mut report, &seqs, |s| {
                let n = n0(g, s, a)?;
                let outcome = if bound_holds(&n, s.len(), d) {
                    CheckOutcome::Pass
                } else {
                    CheckOutcome::Fail(format!("N_0 = {n} below 2^({}-{d}+1)", s.len()))
                };
                Ok((outcome, label(g, a, s)))
            })?;
        }
    }
    Ok(report)
}

fn random_group(rng: &mut ChaCha8Rng, max_order: u64) -> Result<FiniteAbelianGroup> {
    let mut orders = Vec::new();
    let mut order = 1u64;
    loop {
        let room = max_order / order;
        if room < 2 || (!orders.is_empty() && rng.gen_bool(0.4)) {
            break;
        }
        let n = rng.gen_range(2..=room);
        orders.push(n);
        order *= n;
    }
    FiniteAbelianGroup::new(&orders)
}

fn random_weights(rng: &mut ChaCha8Rng) -> WeightSet {
    loop {
        let ws: Vec<i64> = (-4..=4).filter(|&w| w != 0 && rng.gen_bool(0.35)).collect();
        if let Ok(a) = WeightSet::new(ws) {
            return a;
        }
    }
}

fn random_sequence(rng: &mut ChaCha8Rng, group: &FiniteAbelianGroup, max_len: usize, allow_zero: bool) -> Sequence {
    let len = rng.gen_range(0..=max_len);
    let lo = usize::from(!allow_zero).min(group.order() - 1);
    Sequence::from_indices((0..len).map(|_| ElementIndex(rng.gen_range(lo..group.order()))))
}

/// Number of seeded random instances in the oracle-equivalence suite.
pub const ORACLE_INSTANCES: usize = 200;

fn oracle(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Oracle);
    let mut rng = ctx.rng(Suite::Oracle);
    let mut instances = Vec::with_capacity(ORACLE_INSTANCES);
    for _ in 0..ORACLE_INSTANCES {
        let g = random_group(&mut rng, 27)?;
        let a = random_weights(&mut rng);
        let s = random_sequence(&mut rng, &g, 12, true);
        instances.push((g, a, s));
    }
    sweep(&mut report, &instances, |(g, a, s)| {
        let dp = count_vector::<BigUint>(g, s, a)?;
        let bf = brute_force_count_vector::<BigUint>(g, s, a)?;
        let outcome = match (0..g.order()).find(|&i| dp.counts()[i] != bf.counts()[i]) {
            None => CheckOutcome::Pass,
            Some(i) => CheckOutcome::Fail(format!(
                "element #{i}: dp {} vs oracle {}",
                dp.counts()[i],
                bf.counts()[i]
            )),
        };
        Ok((outcome, label(g, a, s)))
    })?;
    Ok(report)
}

/// Trials per property in the property suite.
pub const PROPERTY_TRIALS: usize = 100;

fn properties(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Properties);
    let mut rng = ctx.rng(Suite::Properties);
    let mut cases = Vec::new();
    for _ in 0..PROPERTY_TRIALS {
        let g = random_group(&mut rng, 36)?;
        let a = random_weights(&mut rng);
        let s = random_sequence(&mut rng, &g, 10, true);
        let mut shuffled = s.terms().to_vec();
        shuffled.shuffle(&mut rng);
        let extra = ElementIndex(rng.gen_range(0..g.order()));
        let half: Vec<i64> = (1..=4).filter(|_| rng.gen_bool(0.5)).collect();
        let sym = WeightSet::new(half.iter().flat_map(|&w| [w, -w]).chain([1, -1]))?;
        cases.push((g, a, s, Sequence::from_indices(shuffled), extra, sym));
    }
    sweep(&mut report, &cases, |(g, a, s, shuffled, _, _)| {
        let base = count_vector::<BigUint>(g, s, a)?;
        let doubled = count_vector::<BigUint>(g, &s.append(ElementIndex::ZERO), a)?;
        let ok = base.counts().iter().zip(doubled.counts()).all(|(x, y)| *y == x * 2u32);
        let ok = ok && count_vector::<BigUint>(g, shuffled, a)? == base;
        Ok((outcome(ok, "zero-doubling or permutation invariance"), label(g, a, s)))
    })?;
    sweep(&mut report, &cases, |(g, _, s, _, extra, _)| {
        let unit = WeightSet::unit();
        let cv = count_vector::<BigUint>(g, s, &unit)?;
        let ok = cv.total() == BigUint::one() << s.len() && cv.counts().iter().all(|c| *c <= BigUint::one() << s.len());
        let grown = count_vector::<BigUint>(g, &s.append(*extra), &unit)?;
        let ok = ok && grown.zero_count() >= cv.zero_count();
        Ok((outcome(ok, "partition identity or monotonicity"), label(g, &unit, s)))
    })?;
    sweep(&mut report, &cases, |(g, _, s, _, _, sym)| {
        let cv = count_vector::<BigUint>(g, s, sym)?;
        let ok = g.indices().all(|h| big(&cv, h) == big(&cv, g.neg_idx(h)));
        Ok((outcome(ok, "N_g != N_-g for symmetric A"), label(g, sym, s)))
    })?;
    sweep(&mut report, &cases, |(g, a, s, _, _, _)| {
        let cv = count_vector::<BigUint>(g, s, a)?;
        let ss = sum_support(g, s, a);
        let one = BigUint::one();
        let mut ok = (*cv.zero_count() >= BigUint::from(2u32)) == ss.sigma.contains(ElementIndex::ZERO);
        for h in g.indices().skip(1) {
            ok &= (*big(&cv, h) >= one) == ss.sigma.contains(h);
        }
        Ok((outcome(ok, "count support disagrees with Σ_A"), label(g, a, s)))
    })?;
    Ok(report)
}

fn outcome(ok: bool, what: &str) -> CheckOutcome {
    if ok {
        CheckOutcome::Pass
    } else {
        CheckOutcome::Fail(what.to_string())
    }
}

fn cor_cases() -> Result<Vec<(FiniteAbelianGroup, WeightSet, std::ops::RangeInclusive<usize>)>> {
    Ok(vec![
        (FiniteAbelianGroup::cyclic(5)?, WeightSet::plus_minus_one(), 2..=5),
        (FiniteAbelianGroup::elementary(3, 2)?, WeightSet::new([1, 2])?, 2..=4),
    ])
}

fn cor3(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Cor3);
    for (g, a, lengths) in cor_cases()? {
        let (d, family) = extremal_family(ctx, &g, &a, lengths)?;
        sweep(&mut report, &family, |s| {
            Ok((check_corollary3(&g, s, &a, d)?, label(&g, &a, s)))
        })?;
    }
    // The zero-padded construction attains the bound for every g.
    for g in [
        FiniteAbelianGroup::cyclic(5)?,
        FiniteAbelianGroup::cyclic(9)?,
        FiniteAbelianGroup::elementary(3, 2)?,
        FiniteAbelianGroup::elementary(3, 3)?,
    ] {
        let full = WeightSet::full(&g)?;
        let d = ctx.davenport(&g, &full)?;
        for k in d - 1..=d + 2 {
            let s = construct_extremal_with_zeros(&g, &full, k, &ctx.search)?;
            report.record(&check_corollary3(&g, &s, &full, d)?, || label(&g, &full, &s));
            let cv = count_vector::<BigUint>(&g, &s, &full)?;
            let expected = BigUint::one() << (k + 1 - d);
            report.check(cv.counts().iter().all(|c| *c == expected), || {
                format!("{}: counts are not all {expected}", label(&g, &full, &s))
            });
        }
    }
    Ok(report)
}

/// The identity `N_{A,g}(S) = N_{A,0}(S(-g)) - N_{A,0}(S)` is gated for
/// weights acting as `{1}` or `{±1}`; for every other weight set mismatches
/// are logged as observations.
fn cor3_identity(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Cor3Identity);
    let mut rng = ctx.rng(Suite::Cor3Identity);
    let mut cases = Vec::new();
    for trial in 0..300 {
        let g = random_group(&mut rng, 27)?;
        let a = match trial % 3 {
            0 => WeightSet::unit(),
            1 => WeightSet::plus_minus_one(),
            _ => random_weights(&mut rng),
        };
        let s = random_sequence(&mut rng, &g, 8, true);
        let h = ElementIndex(rng.gen_range(0..g.order()));
        cases.push((g, a, s, h));
    }
    let results = cases
        .par_iter()
        .map(|(g, a, s, h)| subtraction_identity(g, s, a, *h).map(|id| (id, g, a, s, h)))
        .collect::<Result<Vec<_>>>()?;
    let mut asymmetric_miss = 0;
    let mut symmetric_miss = 0;
    for (id, g, a, s, h) in results {
        let gated = a.acts_as_unit(g) || a.acts_as_plus_minus_one(g);
        let lbl = || format!("{} g=#{}: {} vs {}", label(g, a, s), h.0, id.lhs, id.rhs);
        if gated {
            report.check(id.holds(), lbl);
        } else {
            report.record(&CheckOutcome::Skipped("ungated weight set".into()), String::new);
            if !id.holds() {
                if a.group_symmetric(g) {
                    symmetric_miss += 1;
                } else {
                    asymmetric_miss += 1;
                }
                if report.observations.len() < 20 {
                    report.observe(format!("identity fails: {}", lbl()));
                }
            }
        }
    }
    report.observe(format!(
        "ungated mismatches: {asymmetric_miss} with asymmetric A, {symmetric_miss} with symmetric A"
    ));
    Ok(report)
}

fn cor4(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Cor4);
    let mut cases: Vec<(FiniteAbelianGroup, WeightSet, Sequence, ElementIndex)> = Vec::new();
    for (g, a, lengths) in cor_cases()? {
        let (_, family) = extremal_family(ctx, &g, &a, lengths)?;
        for s in family {
            for &h in s.multiplicities().keys() {
                cases.push((g.clone(), a.clone(), s.clone(), h));
            }
        }
    }
    let c9 = FiniteAbelianGroup::cyclic(9)?;
    let mut rng = ctx.rng(Suite::Cor4);
    for _ in 0..50 {
        let s = random_sequence(&mut rng, &c9, 7, false);
        let s = if s.is_empty() { s.append(ElementIndex(1)) } else { s };
        let h = s.terms()[rng.gen_range(0..s.len())];
        cases.push((c9.clone(), WeightSet::plus_minus_one(), s, h));
    }
    sweep(&mut report, &cases, |(g, a, s, h)| {
        Ok((check_corollary4(g, s, a, *h)?, format!("{} g=#{}", label(g, a, s), h.0)))
    })?;
    Ok(report)
}

fn lemma6(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Lemma6);
    let pm = WeightSet::plus_minus_one();
    let cases = [
        (FiniteAbelianGroup::cyclic(5)?, 2..=6usize),
        (FiniteAbelianGroup::cyclic(7)?, 2..=6),
        (FiniteAbelianGroup::elementary(3, 2)?, 2..=5),
    ];
    for (g, lengths) in cases {
        let (d, family) = extremal_family(ctx, &g, &pm, lengths)?;
        let items: Vec<(Sequence, ElementIndex)> = family
            .into_iter()
            .flat_map(|s| s.multiplicities().keys().map(|&h| (s.clone(), h)).collect::<Vec<_>>())
            .collect();
        sweep(&mut report, &items, |(s, h)| {
            Ok((
                check_lemma6(&g, s, &pm, *h, d)?,
                format!("{} a=#{}", label(&g, &pm, s), h.0),
            ))
        })?;
    }
    Ok(report)
}

fn prop7(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Prop7);
    let pm = WeightSet::plus_minus_one();
    for (g, max_len) in [
        (FiniteAbelianGroup::cyclic(5)?, 6usize),
        (FiniteAbelianGroup::cyclic(7)?, 5),
    ] {
        let d = ctx.davenport(&g, &pm)?;
        let support = nonzero(&g);
        for len in d.saturating_sub(1).max(3)..=max_len {
            let seqs: Vec<Sequence> = enumerate_sequences(&support, len).collect();
            sweep(&mut report, &seqs, |s| {
                Ok((check_proposition7(&g, s, &pm, d)?, label(&g, &pm, s)))
            })?;
        }
    }
    Ok(report)
}

/// Number of seeded sign-flip trials.
pub const FACT7_TRIALS: usize = 500;

fn fact7(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Fact7);
    let mut rng = ctx.rng(Suite::Fact7);
    let odd: Vec<FiniteAbelianGroup> = [
        &[3u64][..],
        &[5],
        &[7],
        &[9],
        &[3, 3],
        &[15],
        &[5, 5],
        &[3, 9],
        &[21],
        &[27],
        &[3, 3, 3],
    ]
    .iter()
    .map(|o| FiniteAbelianGroup::new(o))
    .collect::<Result<_>>()?;
    let pm = WeightSet::plus_minus_one();
    let mut cases = Vec::new();
    for _ in 0..FACT7_TRIALS {
        let g = odd[rng.gen_range(0..odd.len())].clone();
        let s = random_sequence(&mut rng, &g, 10, true);
        let flips: Vec<bool> = (0..s.len()).map(|_| rng.gen_bool(0.5)).collect();
        cases.push((g, s, flips));
    }
    sweep(&mut report, &cases, |(g, s, flips)| {
        let flipped = Sequence::from_indices(
            s.terms()
                .iter()
                .zip(flips)
                .map(|(&t, &f)| if f { g.neg_idx(t) } else { t }),
        );
        let normalized = GPlusPartition::new(g)?.sign_normalize(g, s);
        let base = n0(g, s, &pm)?;
        let ok = n0(g, &flipped, &pm)? == base && n0(g, &normalized, &pm)? == base;
        Ok((outcome(ok, "sign flip changed N_0"), label(g, &pm, s)))
    })?;
    Ok(report)
}

fn thm8(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Thm8);
    let pm = WeightSet::plus_minus_one();
    for g in [FiniteAbelianGroup::cyclic(5)?, FiniteAbelianGroup::cyclic(7)?] {
        let d = ctx.davenport(&g, &pm)?;
        let support = nonzero(&g);
        for len in d - 1..=d + 2 {
            let seqs: Vec<Sequence> = enumerate_sequences(&support, len).collect();
            sweep(&mut report, &seqs, |s| {
                Ok((check_theorem8(&g, s, &pm, d)?, label(&g, &pm, s)))
            })?;
        }
        let longest = max_extremal_length(&g, &pm, d, d + 4, ctx.enumeration_budget)?;
        let half = (g.order() - 1) / 2;
        report.observe(format!(
            "{g}: longest extremal length up to {} is {longest:?}; |G+| = {half}",
            d + 4
        ));
    }
    Ok(report)
}

fn thm11(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Thm11);
    for (p, r) in [(3u64, 2usize), (5, 2)] {
        let g = FiniteAbelianGroup::elementary(p, r)?;
        let full = WeightSet::full(&g)?;
        let (d, family) = extremal_family(ctx, &g, &full, 2..=4)?;
        sweep(&mut report, &family, |s| {
            Ok((check_theorem11(&g, s, &full, d)?, label(&g, &full, s)))
        })?;
    }
    // No extremal sequence may exceed 2r terms.
    let g = FiniteAbelianGroup::elementary(3, 2)?;
    let full = WeightSet::full(&g)?;
    let (_, longer) = extremal_family(ctx, &g, &full, 5..=6)?;
    report.check(longer.is_empty(), || {
        format!("{} extremal sequences over C3^2 longer than 2r", longer.len())
    });

    // Converse probe: basis plus disjoint nonempty supports. Reported only.
    for (p, r) in [(3u64, 2usize), (3, 3), (5, 2)] {
        let g = FiniteAbelianGroup::elementary(p, r)?;
        let full = WeightSet::full(&g)?;
        let basis: Vec<ElementIndex> = (0..r).map(|i| g.index(&g.basis_element(i))).collect::<Result<_>>()?;
        let mut matches = 0;
        let mut total = 0;
        for k in 1..=r {
            // Split the basis into k consecutive nonempty blocks with coefficient pattern 1, 2, ...
            let extras: Vec<Vec<(usize, u64)>> = (0..k)
                .map(|j| {
                    let lo = j * r / k;
                    let hi = (j + 1) * r / k;
                    (lo..hi).map(|i| (i, 1 + (i as u64 % (p - 1)))).collect()
                })
                .collect();
            let s = theorem11_form(&g, &basis, &extras)?;
            total += 1;
            if n0(&g, &s, &full)? == BigUint::one() << k {
                matches += 1;
            }
        }
        report.observe(format!("C{p}^{r}: {matches}/{total} constructed forms have N_0 = 2^k"));
    }
    Ok(report)
}

/// Coordinates helper exposed for tests and the CLI.
pub fn example_iii_sequence() -> Result<(FiniteAbelianGroup, Sequence)> {
    let g = FiniteAbelianGroup::new(&[3, 3, 9])?;
    let terms = [
        elem(&g, &[1, 0, 0])?,
        elem(&g, &[1, 0, 0])?,
        elem(&g, &[0, 1, 0])?,
        elem(&g, &[0, 0, 1])?,
        elem(&g, &[0, 0, 2])?,
        elem(&g, &[0, 0, 4])?,
    ];
    Ok((g, Sequence::from_indices(terms)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn report_caps_listed_failures() {
        let mut r = SuiteReport::new(Suite::Thm2);
        for i in 0..60 {
            r.check(false, || format!("case {i}"));
        }
        r.check(true, String::new);
        assert_eq!(
            (r.instances, r.passes, r.failed, r.failures.len()),
            (61, 1, 60, MAX_LISTED_FAILURES)
        );
        assert!(!r.passed());
    }

    #[test]
    fn catalog_preload_is_used() {
        let mut cat = Catalog::default();
        let g = FiniteAbelianGroup::cyclic(5).unwrap();
        let a = WeightSet::plus_minus_one();
        let mut r = max_zero_sum_free(&g, &a, &SearchOptions::default());
        r.value = 42;
        cat.put(CatalogEntry::from_result(&g, &a, &r, "t"));
        let ctx = SuiteContext::new(0).with_catalog(&cat);
        assert_eq!(ctx.davenport(&g, &a).unwrap(), 42);
        assert!(ctx.new_catalog_entries("t").is_empty());
        let fresh = SuiteContext::new(0);
        assert_eq!(fresh.davenport(&g, &a).unwrap(), 3);
        assert_eq!(fresh.new_catalog_entries("t").len(), 1);
    }

    #[test]
    fn example_iii_helper() {
        let (g, s) = example_iii_sequence().unwrap();
        assert_eq!(s.to_literal(&g), "(1,0,0)*2,(0,1,0),(0,0,1),(0,0,2),(0,0,4)");
    }
}
