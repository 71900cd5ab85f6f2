//! Acceptance run: one PASS/FAIL line per criterion, with wall-clock limits.
//!
//! Criterion 7 bundles two claims. The equality `N_{A,g} = N_{A,0}` for
//! `g | S` does not hold on the prescribed sweep (for example `S = (1)(2)`
//! over `C_5` with `A = {-1,1}` has `N_0 = 1` and `N_1 = 2`), so that line is
//! expected to read FAIL. The run exits nonzero if any other criterion fails,
//! or if criterion 7 stops failing for that reason.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use zerosum::counting::{bound_holds, brute_force_count_vector, count_vector};
use zerosum::extremal::{
    check_corollary3, check_corollary4, check_proposition7, check_theorem11, check_theorem8, enumerate_extremal,
    CheckOutcome,
};
use zerosum::sequence::enumerate_sequences;
use zerosum::suites::{run_suite, Suite, SuiteContext, SuiteReport};
use zerosum::{max_zero_sum_free, ElementIndex, FiniteAbelianGroup, SearchOptions, Sequence, WeightSet};

const ENUMERATION_BUDGET: u64 = 50_000_000;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }

    fn from_report(r: &SuiteReport) -> Self {
        let mut detail = format!(
            "{} instances, {} passed, {} failed, {} not applicable",
            r.instances, r.passes, r.failed, r.skipped
        );
        if let Some(f) = r.failures.first() {
            detail.push_str(&format!("; first failure: {f}"));
        }
        Verdict::new(r.passed(), detail)
    }
}

fn n0(g: &FiniteAbelianGroup, s: &Sequence, a: &WeightSet) -> BigUint {
    count_vector::<BigUint>(g, s, a).unwrap().zero_count().clone()
}

fn basis(g: &FiniteAbelianGroup) -> Vec<ElementIndex> {
    (0..g.rank()).map(|i| g.index(&g.basis_element(i)).unwrap()).collect()
}

fn example_ii() -> Verdict {
    let pm = WeightSet::plus_minus_one();
    let mut notes = Vec::new();
    let mut ok = true;
    for r in 1..=3 {
        let g = FiniteAbelianGroup::elementary(3, r).unwrap();
        let s = Sequence::from_indices(basis(&g).into_iter().flat_map(|e| [e, e]));
        let n = n0(&g, &s, &pm);
        let oracle = brute_force_count_vector::<BigUint>(&g, &s, &pm).unwrap();
        ok &= n == BigUint::one() << r && *oracle.zero_count() == n;
        notes.push(format!("r={r}: {n}"));
    }
    Verdict::new(ok, notes.join(", "))
}

fn example_i() -> Verdict {
    let pm = WeightSet::plus_minus_one();
    let g = FiniteAbelianGroup::elementary(2, 4).unwrap();
    let e = basis(&g);
    let mut notes = Vec::new();
    let mut ok = true;
    for m in 4..=10usize {
        let mut terms = vec![e[0]; m - 3];
        terms.extend_from_slice(&e[1..]);
        let s = Sequence::from_indices(terms);
        let n = n0(&g, &s, &pm);
        ok &= n == BigUint::one() << (m - 4);
        notes.push(format!("m={m}: {n}"));
    }
    Verdict::new(ok, notes.join(", "))
}

fn example_iii() -> Verdict {
    let pm = WeightSet::plus_minus_one();
    let g = FiniteAbelianGroup::new(&[3, 3, 9]).unwrap();
    let opts = SearchOptions::default();
    let r = max_zero_sum_free(&g, &pm, &opts);
    let s = Sequence::parse("(1,0,0)*2,(0,1,0),(0,0,1),(0,0,2),(0,0,4)", &g).unwrap();
    let n = n0(&g, &s, &pm);
    let oracle = brute_force_count_vector::<BigUint>(&g, &s, &pm).unwrap();
    let ok = r.exact && r.value == 6 && n == BigUint::from(2u32) && *oracle.zero_count() == n;
    Verdict::new(
        ok,
        format!(
            "D = {} ({} nodes, exact {}), N_0 = {n}",
            r.value, r.nodes_explored, r.exact
        ),
    )
}

fn eq1() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (p, r) in [(3u64, 1usize), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)] {
        let g = FiniteAbelianGroup::elementary(p, r).unwrap();
        let full = WeightSet::full(&g).unwrap();
        let res = max_zero_sum_free(&g, &full, &SearchOptions::default());
        ok &= res.exact && res.value == r + 1;
        notes.push(format!("C{p}^{r}: {}", res.value));
    }
    Verdict::new(ok, notes.join(", "))
}

fn theorem2() -> Verdict {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for (g, a, max_len) in [
        (
            FiniteAbelianGroup::cyclic(5).unwrap(),
            WeightSet::plus_minus_one(),
            7usize,
        ),
        (
            FiniteAbelianGroup::elementary(3, 2).unwrap(),
            WeightSet::new([1, 2]).unwrap(),
            6,
        ),
    ] {
        let d = max_zero_sum_free(&g, &a, &SearchOptions::default())
            .davenport(u64::MAX)
            .unwrap();
        let support: Vec<ElementIndex> = g.indices().skip(1).collect();
        for len in 0..=max_len {
            for s in enumerate_sequences(&support, len) {
                checked += 1;
                if !bound_holds(&n0(&g, &s, &a), len, d) {
                    bad.push(format!("{g} {}", s.to_literal(&g)));
                }
            }
        }
    }
    Verdict::new(
        bad.is_empty(),
        format!("{checked} sequences, {} below the bound {:?}", bad.len(), bad.first()),
    )
}

fn oracle(ctx: &SuiteContext) -> Verdict {
    Verdict::from_report(&run_suite(Suite::Oracle, ctx).unwrap())
}

struct Criterion7 {
    verdict: Verdict,
    cor3_clean: bool,
    cor4_counterexample_seen: bool,
}

fn corollaries() -> Criterion7 {
    let mut cor3 = (0u64, 0u64);
    let mut cor4 = (0u64, 0u64);
    let mut first_cor4 = None;
    let mut first_cor3 = None;
    let mut known_seen = false;
    for (g, a, lengths) in [
        (
            FiniteAbelianGroup::cyclic(5).unwrap(),
            WeightSet::plus_minus_one(),
            2..=5usize,
        ),
        (
            FiniteAbelianGroup::elementary(3, 2).unwrap(),
            WeightSet::new([1, 2]).unwrap(),
            2..=4,
        ),
    ] {
        let d = max_zero_sum_free(&g, &a, &SearchOptions::default())
            .davenport(u64::MAX)
            .unwrap();
        for len in lengths {
            let e = enumerate_extremal(&g, &a, d, len, ENUMERATION_BUDGET).unwrap();
            assert!(e.complete);
            for s in &e.sequences {
                cor3.0 += 1;
                if let CheckOutcome::Fail(why) = check_corollary3(&g, s, &a, d).unwrap() {
                    cor3.1 += 1;
                    first_cor3.get_or_insert(format!("{} {}: {why}", g, s.to_literal(&g)));
                }
                for &h in s.multiplicities().keys() {
                    cor4.0 += 1;
                    if let CheckOutcome::Fail(why) = check_corollary4(&g, s, &a, h).unwrap() {
                        cor4.1 += 1;
                        first_cor4.get_or_insert(format!(
                            "{} S={} g={}: {why}",
                            g,
                            s.to_literal(&g),
                            g.deindex(h).unwrap()
                        ));
                        if g.order() == 5 && s.to_literal(&g) == "(1),(2)" {
                            known_seen = true;
                        }
                    }
                }
            }
        }
    }
    let detail = format!(
        "Cor 3: {} of {} extremal sequences fail{}; Cor 4: {} of {} (S, g) pairs fail{}",
        cor3.1,
        cor3.0,
        first_cor3.map(|f| format!(" ({f})")).unwrap_or_default(),
        cor4.1,
        cor4.0,
        first_cor4.map(|f| format!(", e.g. {f}")).unwrap_or_default(),
    );
    Criterion7 {
        verdict: Verdict::new(cor3.1 == 0 && cor4.1 == 0 && cor3.0 > 0, detail),
        cor3_clean: cor3.1 == 0 && cor3.0 > 0,
        cor4_counterexample_seen: known_seen,
    }
}

fn prop7_thm8() -> Verdict {
    let pm = WeightSet::plus_minus_one();
    let mut p7 = (0u64, 0u64, 0u64);
    let mut t8 = (0u64, 0u64, 0u64);
    let mut first = None;
    for g in [
        FiniteAbelianGroup::cyclic(5).unwrap(),
        FiniteAbelianGroup::cyclic(7).unwrap(),
    ] {
        let d = max_zero_sum_free(&g, &pm, &SearchOptions::default())
            .davenport(u64::MAX)
            .unwrap();
        let support: Vec<ElementIndex> = g.indices().skip(1).collect();
        for len in (d - 1)..=(d + 2).max(5) {
            for s in enumerate_sequences(&support, len) {
                let tally = |o: CheckOutcome, t: &mut (u64, u64, u64), first: &mut Option<String>| match o {
                    CheckOutcome::Pass => t.0 += 1,
                    CheckOutcome::Skipped(_) => t.2 += 1,
                    CheckOutcome::Fail(why) => {
                        t.1 += 1;
                        first.get_or_insert(format!("{g} {}: {why}", s.to_literal(&g)));
                    }
                };
                tally(check_proposition7(&g, &s, &pm, d).unwrap(), &mut p7, &mut first);
                if len <= d + 2 {
                    tally(check_theorem8(&g, &s, &pm, d).unwrap(), &mut t8, &mut first);
                }
            }
        }
    }
    Verdict::new(
        p7.1 == 0 && t8.1 == 0 && p7.0 > 0 && t8.0 > 0,
        format!(
            "Prop 7: {} pass, {} fail, {} not applicable; Thm 8: {} pass, {} fail, {} not applicable{}",
            p7.0,
            p7.1,
            p7.2,
            t8.0,
            t8.1,
            t8.2,
            first.map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )
}

fn theorem11() -> Verdict {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for (p, r) in [(3u64, 2usize), (5, 2)] {
        let g = FiniteAbelianGroup::elementary(p, r).unwrap();
        let full = WeightSet::full(&g).unwrap();
        let d = max_zero_sum_free(&g, &full, &SearchOptions::default())
            .davenport(u64::MAX)
            .unwrap();
        for len in 2..=4 {
            if len + 1 < d {
                continue;
            }
            let e = enumerate_extremal(&g, &full, d, len, ENUMERATION_BUDGET).unwrap();
            assert!(e.complete);
            for s in &e.sequences {
                checked += 1;
                let within = (r..=2 * r).contains(&s.len());
                match check_theorem11(&g, s, &full, d).unwrap() {
                    CheckOutcome::Pass if within => {}
                    other => bad.push(format!("{g} {}: {other:?}", s.to_literal(&g))),
                }
            }
        }
    }
    Verdict::new(
        bad.is_empty() && checked > 0,
        format!(
            "{checked} extremal sequences decomposed, {} failures {:?}",
            bad.len(),
            bad.first()
        ),
    )
}

fn fact7(ctx: &SuiteContext) -> Verdict {
    Verdict::from_report(&run_suite(Suite::Fact7, ctx).unwrap())
}

fn properties(ctx: &SuiteContext) -> Verdict {
    Verdict::from_report(&run_suite(Suite::Properties, ctx).unwrap())
}

fn report(id: u32, name: &str, limit: Duration, run: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = run();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = v.pass && in_time;
    println!(
        "{} criterion {id:>2} {name}: {} [{:.2}s, limit {}s]{}",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        took.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { " (over time)" }
    );
    pass
}

fn main() -> ExitCode {
    let ctx = SuiteContext::new(0);
    let s = Duration::from_secs;
    let mut failed = Vec::new();
    let mut gate = |id: u32, pass: bool| {
        if !pass {
            failed.push(id);
        }
    };
    gate(1, report(1, "example ii", s(1), example_ii));
    gate(2, report(2, "example i", s(1), example_i));
    gate(3, report(3, "example iii", s(300), example_iii));
    gate(4, report(4, "full-weight Davenport sweep", s(120), eq1));
    gate(5, report(5, "lower bound sweep", s(120), theorem2));
    gate(6, report(6, "oracle equivalence", s(120), || oracle(&ctx)));

    let mut c7 = None;
    let pass7 = report(7, "corollary 3 and 4 sweep", s(300), || {
        let c = corollaries();
        let v = Verdict::new(c.verdict.pass, c.verdict.detail.clone());
        c7 = Some(c);
        v
    });
    let c7 = c7.expect("criterion 7 ran");
    // Expected: FAIL from the N_g = N_0 equality alone, with Cor 3 clean.
    let known7 = !pass7 && c7.cor3_clean && c7.cor4_counterexample_seen;
    if known7 {
        println!("     criterion  7 fails only on the N_g = N_0 equality, which does not hold (known)");
    }

    gate(8, report(8, "proposition 7 and theorem 8", s(300), prop7_thm8));
    gate(9, report(9, "structure theorem", s(300), theorem11));
    gate(10, report(10, "sign-flip invariance", s(60), || fact7(&ctx)));
    gate(11, report(11, "property suite", s(60), || properties(&ctx)));

    let passed = 11 - failed.len() - usize::from(!pass7);
    println!("acceptance: {passed} of 11 criteria pass");
    if failed.is_empty() && known7 {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome: failing criteria {failed:?}, criterion 7 known failure reproduced: {known7}");
        ExitCode::FAILURE
    }
}
