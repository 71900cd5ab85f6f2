use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{SecondsFormat, Utc};
use serde_json::{json, Map, Value};
use zerosum::catalog::{Catalog, CatalogEntry, CatalogLock, DEFAULT_CATALOG_PATH};
use zerosum::counting::{count_vector, extremal_threshold, sum_support};
use zerosum::davenport::{verify_every_length_d_sequence_has_zero_sum, LengthCheck};
use zerosum::extremal::{
    check_corollary3, check_theorem11, check_theorem8, decompose_theorem11, e_set, enumerate_extremal, CheckOutcome,
};
use zerosum::suites::{run_suite, Suite, SuiteContext, SuiteReport};
use zerosum::{
    max_zero_sum_free, BigUint, DavenportResult, ElementIndex, ElementSet, Error, FiniteAbelianGroup, Result,
    SearchOptions, Sequence, WeightSet,
};

use crate::output::Output;
use crate::{CatalogAction, Command, Global};

const DEFAULT_ENUMERATION_BUDGET: u64 = 5_000_000;
const LOCK_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    TheoremFailure,
    BudgetExhausted,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::TheoremFailure => 2,
            Status::BudgetExhausted => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExhausted { .. } => 3,
        _ => 1,
    }
}

pub fn run(g: &Global, cmd: &Command) -> Result<(Output, Status)> {
    match cmd {
        Command::Group { enumerate } => group(g, *enumerate),
        Command::Count => count(g),
        Command::Davenport { verify } => davenport(g, *verify),
        Command::Zsf { limit } => zsf(g, *limit),
        Command::Extremal { min_length, max_length } => extremal(g, *min_length, *max_length),
        Command::StructureCheck { max_length } => structure_check(g, *max_length),
        Command::Verify { suite, findings } => verify(g, suite, findings.as_deref()),
        Command::Catalog { action } => catalog(g, *action),
    }
}

fn parse_group(g: &Global) -> Result<FiniteAbelianGroup> {
    let spec = g
        .group
        .as_deref()
        .ok_or_else(|| Error::Precondition("--group is required, e.g. --group C3^2xC9".into()))?;
    spec.parse()
}

fn parse_seq(g: &Global, group: &FiniteAbelianGroup) -> Result<Option<Sequence>> {
    g.seq.as_deref().map(|s| Sequence::parse(s, group)).transpose()
}

fn require_seq(g: &Global, group: &FiniteAbelianGroup) -> Result<Sequence> {
    parse_seq(g, group)?.ok_or_else(|| Error::Precondition("--seq is required".into()))
}

fn search_options(g: &Global) -> SearchOptions {
    let mut opts = SearchOptions::default();
    if let Some(b) = g.budget {
        opts.node_budget = b;
    }
    opts
}

fn enumeration_budget(g: &Global) -> u64 {
    g.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

fn tuple(group: &FiniteAbelianGroup, i: ElementIndex) -> String {
    group.deindex(i).expect("index from this group").to_string()
}

fn tuples(group: &FiniteAbelianGroup, set: &ElementSet) -> Vec<String> {
    set.iter().map(|i| tuple(group, i)).collect()
}

fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn outcome_json(o: &CheckOutcome) -> Value {
    match o {
        CheckOutcome::Pass => json!({"status": "pass"}),
        CheckOutcome::Fail(why) => json!({"status": "fail", "detail": why}),
        CheckOutcome::Skipped(why) => json!({"status": "skipped", "detail": why}),
    }
}

fn outcome_label(o: &CheckOutcome) -> &'static str {
    match o {
        CheckOutcome::Pass => "pass",
        CheckOutcome::Fail(_) => "fail",
        CheckOutcome::Skipped(_) => "skipped",
    }
}

fn group(g: &Global, enumerate: bool) -> Result<(Output, Status)> {
    let group = parse_group(g)?;
    let mut json = json!({
        "group": group.to_string(),
        "invariant_factors": group.invariant_factors(),
        "order": group.order(),
        "exponent": group.exponent(),
        "rank": group.rank(),
        "elementary_prime": group.elementary_prime(),
    });
    let mut text = format!(
        "{group}\norder {}\nexponent {}\nrank {}\n",
        group.order(),
        group.exponent(),
        group.rank()
    );
    let mut rows = Vec::new();
    if enumerate {
        let elements: Vec<Value> = group
            .indices()
            .map(|i| json!({"index": i.get(), "element": tuple(&group, i), "order": group.order_of_idx(i)}))
            .collect();
        json["elements"] = Value::Array(elements);
        for i in group.indices() {
            let row = vec![i.get().to_string(), tuple(&group, i), group.order_of_idx(i).to_string()];
            text.push_str(&format!("{} {} {}\n", row[0], row[1], row[2]));
            rows.push(row);
        }
    }
    Ok((
        Output {
            json,
            header: vec!["index", "element", "order"],
            rows,
            text,
        },
        Status::Ok,
    ))
}

fn count(g: &Global) -> Result<(Output, Status)> {
    let group = parse_group(g)?;
    let weights = WeightSet::parse(&g.weights, &group)?;
    let s = require_seq(g, &group)?;
    let cv = count_vector::<BigUint>(&group, &s, &weights)?;
    let support = sum_support(&group, &s, &weights);
    let zsf = !support.sigma_bullet.contains(ElementIndex::ZERO);

    let mut counts = Map::new();
    let mut rows = Vec::new();
    let mut text = format!("counts[0]={}\n", cv.zero_count());
    for i in group.indices() {
        let t = tuple(&group, i);
        let c = cv.get(i).to_string();
        text.push_str(&format!("{t} {c}\n"));
        rows.push(vec![t.clone(), c.clone()]);
        counts.insert(t, Value::String(c));
    }
    let sigma = tuples(&group, &support.sigma);
    text.push_str(&format!("sigma_A {}\nzero_sum_free {zsf}\n", sigma.join(" ")));
    let json = json!({
        "group": group.to_string(),
        "weights": weights.to_string(),
        "sequence": s.to_literal(&group),
        "length": s.len(),
        "counts": counts,
        "sigma_A": sigma,
        "zero_sum_free": zsf,
    });
    Ok((
        Output {
            json,
            header: vec!["element", "count"],
            rows,
            text,
        },
        Status::Ok,
    ))
}

/// D_A(G) from the catalog when it holds an exact value, else by search
/// (recorded back into the catalog when one is configured).
fn resolve_davenport(
    g: &Global,
    group: &FiniteAbelianGroup,
    weights: &WeightSet,
    opts: &SearchOptions,
) -> Result<(Option<CatalogEntry>, Option<DavenportResult>)> {
    let path = catalog_path(g);
    let cat = Catalog::load(&path)?;
    if let Some(e) = cat.get(group, weights).filter(|e| e.exact) {
        eprintln!("catalog: {}", path.display());
        return Ok((Some(e.clone()), None));
    }
    let r = max_zero_sum_free(group, weights, opts);
    eprintln!(
        "search: {} nodes in {:.3}s{}",
        r.nodes_explored,
        r.elapsed.as_secs_f64(),
        if r.exact { "" } else { " (budget exhausted)" }
    );
    record(&path, [CatalogEntry::from_result(group, weights, &r, timestamp())])?;
    Ok((None, Some(r)))
}

fn catalog_path(g: &Global) -> PathBuf {
    g.catalog.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CATALOG_PATH))
}

fn record(path: &Path, entries: impl IntoIterator<Item = CatalogEntry>) -> Result<()> {
    let entries: Vec<CatalogEntry> = entries.into_iter().collect();
    if entries.is_empty() {
        return Ok(());
    }
    let _lock = CatalogLock::acquire(path, LOCK_TIMEOUT)?;
    let mut cat = Catalog::load(path)?;
    let mut changed = false;
    for e in entries {
        changed |= cat.put(e);
    }
    if changed {
        cat.save(path)?;
    }
    Ok(())
}

fn davenport(g: &Global, verify: bool) -> Result<(Output, Status)> {
    let group = parse_group(g)?;
    let weights = WeightSet::parse(&g.weights, &group)?;
    let opts = search_options(g);
    let (cached, searched) = resolve_davenport(g, &group, &weights, &opts)?;
    let (value, exact, witnesses) = match (&cached, &searched) {
        (Some(e), _) => (e.davenport, true, e.witnesses.clone()),
        (None, Some(r)) => {
            eprintln!(
                "search: {} maximal sequences{}",
                r.witness_count,
                if r.sign_reduced { " up to sign" } else { "" }
            );
            (
                r.value,
                r.exact,
                r.witnesses.iter().map(|w| w.to_literal(&group)).collect(),
            )
        }
        (None, None) => unreachable!("resolve_davenport returns one source"),
    };
    let mut json = json!({
        "group": group.to_string(),
        "weights": weights.to_string(),
        "davenport": value,
        "exact": exact,
        "max_zsf_length": value - 1,
        "witnesses": witnesses,
    });
    let mut status = if exact { Status::Ok } else { Status::BudgetExhausted };
    let mut text = if exact {
        format!("{value}\n")
    } else {
        format!(">={value}\n")
    };
    let mut verdict = String::new();
    if verify && exact {
        let check = verify_every_length_d_sequence_has_zero_sum(&group, &weights, value, enumeration_budget(g));
        let v = match &check {
            LengthCheck::Holds { checked } => json!({"status": "holds", "checked": checked.to_string()}),
            LengthCheck::Counterexample(s) => {
                status = Status::TheoremFailure;
                json!({"status": "counterexample", "sequence": s.to_literal(&group)})
            }
            LengthCheck::Skipped { required, budget } => {
                status = status.worst(Status::BudgetExhausted);
                json!({"status": "skipped", "required": required.to_string(), "budget": budget})
            }
        };
        verdict = v["status"].as_str().unwrap_or_default().to_string();
        text.push_str(&format!("verify {verdict}\n"));
        json["verify"] = v;
    }
    let rows = vec![vec![
        group.to_string(),
        weights.to_string(),
        value.to_string(),
        exact.to_string(),
        verdict,
    ]];
    Ok((
        Output {
            json,
            header: vec!["group", "weights", "davenport", "exact", "verify"],
            rows,
            text,
        },
        status,
    ))
}

fn zsf(g: &Global, limit: usize) -> Result<(Output, Status)> {
    let group = parse_group(g)?;
    let weights = WeightSet::parse(&g.weights, &group)?;
    let mut opts = search_options(g);
    opts.witness_limit = limit;
    let r = max_zero_sum_free(&group, &weights, &opts);
    eprintln!("search: {} nodes in {:.3}s", r.nodes_explored, r.elapsed.as_secs_f64());
    let witnesses: Vec<String> = r.witnesses.iter().map(|w| w.to_literal(&group)).collect();
    let json = json!({
        "group": group.to_string(),
        "weights": weights.to_string(),
        "max_zsf_length": r.max_zsf_length,
        "exact": r.exact,
        "sign_reduced": r.sign_reduced,
        "witness_count": r.witness_count,
        "witnesses": witnesses,
    });
    let mut text = format!(
        "max zero-sum-free length {}{}\n{} maximal sequences{}\n",
        r.max_zsf_length,
        if r.exact { "" } else { " (lower bound)" },
        r.witness_count,
        if r.sign_reduced { " up to sign" } else { "" }
    );
    for w in &witnesses {
        text.push_str(w);
        text.push('\n');
    }
    let rows = witnesses.iter().map(|w| vec![w.clone()]).collect();
    let status = if r.exact { Status::Ok } else { Status::BudgetExhausted };
    Ok((
        Output {
            json,
            header: vec!["sequence"],
            rows,
            text,
        },
        status,
    ))
}

fn exact_davenport(g: &Global, group: &FiniteAbelianGroup, weights: &WeightSet) -> Result<usize> {
    let opts = search_options(g);
    match resolve_davenport(g, group, weights, &opts)? {
        (Some(e), _) => Ok(e.davenport),
        (None, Some(r)) => r.davenport(opts.node_budget),
        (None, None) => unreachable!("resolve_davenport returns one source"),
    }
}

fn extremal(g: &Global, min_length: Option<usize>, max_length: Option<usize>) -> Result<(Output, Status)> {
    let group = parse_group(g)?;
    let weights = WeightSet::parse(&g.weights, &group)?;
    let d = exact_davenport(g, &group, &weights)?;
    if let Some(s) = parse_seq(g, &group)? {
        return analyze_one(&group, &weights, d, &s);
    }
    let lo = min_length.unwrap_or(d - 1);
    let hi = max_length.unwrap_or(lo.max(d - 1) + 2).max(lo);
    let mut status = Status::Ok;
    let mut lengths = Vec::new();
    let mut rows = Vec::new();
    let mut text = format!("D = {d}\n");
    for len in lo.max(d - 1)..=hi {
        let e = enumerate_extremal(&group, &weights, d, len, enumeration_budget(g))?;
        if !e.complete {
            status = Status::BudgetExhausted;
        }
        let seqs: Vec<String> = e.sequences.iter().map(|s| s.to_literal(&group)).collect();
        text.push_str(&format!(
            "length {len}: {} extremal of {} examined{}\n",
            seqs.len(),
            e.examined,
            if e.complete { "" } else { " (incomplete)" }
        ));
        for s in &seqs {
            text.push_str(&format!("  {s}\n"));
            rows.push(vec![len.to_string(), s.clone()]);
        }
        lengths.push(json!({
            "length": len,
            "threshold": extremal_threshold(len, d).map(|t| t.to_string()),
            "examined": e.examined.to_string(),
            "complete": e.complete,
            "sequences": seqs,
        }));
        if !e.complete {
            break;
        }
    }
    let json = json!({
        "group": group.to_string(),
        "weights": weights.to_string(),
        "davenport": d,
        "lengths": lengths,
    });
    Ok((
        Output {
            json,
            header: vec!["length", "sequence"],
            rows,
            text,
        },
        status,
    ))
}

fn analyze_one(group: &FiniteAbelianGroup, weights: &WeightSet, d: usize, s: &Sequence) -> Result<(Output, Status)> {
    let cv = count_vector::<BigUint>(group, s, weights)?;
    let threshold = extremal_threshold(s.len(), d);
    let extremal = threshold.as_ref() == Some(cv.zero_count());
    let sigma_bullet_full = sum_support(group, s, weights).sigma_bullet.is_full();
    let mut json = json!({
        "group": group.to_string(),
        "weights": weights.to_string(),
        "davenport": d,
        "sequence": s.to_literal(group),
        "length": s.len(),
        "threshold": threshold.as_ref().map(|t| t.to_string()),
        "zero_count": cv.zero_count().to_string(),
        "extremal": extremal,
        "sigma_bullet_is_group": sigma_bullet_full,
    });
    let mut text = format!(
        "D = {d}\nN_0 = {}\nthreshold {}\nextremal {extremal}\n",
        cv.zero_count(),
        threshold.as_ref().map_or("-".to_string(), |t| t.to_string())
    );
    let mut status = Status::Ok;
    let mut rows = Vec::new();
    if threshold.is_some() {
        let e = e_set(group, s, weights, d)?;
        let members = tuples(group, &e.members);
        text.push_str(&format!("E(S) {}\n", members.join(" ")));
        json["e_set"] = json!(members);
    }
    if extremal {
        let checks = [
            ("corollary3", check_corollary3(group, s, weights, d)?),
            ("theorem8", check_theorem8(group, s, weights, d)?),
        ];
        let mut obj = Map::new();
        for (name, o) in &checks {
            if o.is_fail() {
                status = Status::TheoremFailure;
            }
            text.push_str(&format!("{name} {}\n", outcome_label(o)));
            rows.push(vec![name.to_string(), outcome_label(o).to_string()]);
            obj.insert(name.to_string(), outcome_json(o));
        }
        json["checks"] = Value::Object(obj);
    }
    Ok((
        Output {
            json,
            header: vec!["check", "outcome"],
            rows,
            text,
        },
        status,
    ))
}

fn structure_check(g: &Global, max_length: Option<usize>) -> Result<(Output, Status)> {
    let group = parse_group(g)?;
    if group.elementary_prime().is_none() {
        return Err(Error::Precondition(format!("{group} is not elementary abelian")));
    }
    let weights = WeightSet::full(&group)?;
    let d = exact_davenport(g, &group, &weights)?;
    if let Some(s) = parse_seq(g, &group)? {
        let dec = decompose_theorem11(&group, &s)?;
        let outcome = check_theorem11(&group, &s, &weights, d)?;
        let decomposition = dec.as_ref().map(|dec| {
            json!({
                "basis": dec.basis.iter().map(|&b| tuple(&group, b)).collect::<Vec<_>>(),
                "extras": dec.extras.iter().map(|e| json!({
                    "element": tuple(&group, e.element),
                    "support": e.support,
                    "coefficients": e.coefficients,
                })).collect::<Vec<_>>(),
                "disjoint": dec.supports_disjoint(),
            })
        });
        let mut text = format!("check {}\n", outcome_label(&outcome));
        match &dec {
            Some(dec) => {
                let basis: Vec<String> = dec.basis.iter().map(|&b| tuple(&group, b)).collect();
                text.push_str(&format!("basis {}\n", basis.join(" ")));
                for e in &dec.extras {
                    text.push_str(&format!("extra {} support {:?}\n", tuple(&group, e.element), e.support));
                }
            }
            None => text.push_str("no decomposition\n"),
        }
        let json = json!({
            "group": group.to_string(),
            "weights": weights.to_string(),
            "davenport": d,
            "sequence": s.to_literal(&group),
            "check": outcome_json(&outcome),
            "decomposition": decomposition,
        });
        let status = if outcome.is_fail() {
            Status::TheoremFailure
        } else {
            Status::Ok
        };
        let rows = vec![vec![s.to_literal(&group), outcome_label(&outcome).to_string()]];
        return Ok((
            Output {
                json,
                header: vec!["sequence", "check"],
                rows,
                text,
            },
            status,
        ));
    }

    let r = group.rank();
    let hi = max_length.unwrap_or(2 * r + 1);
    let mut instances = 0u64;
    let mut passes = 0u64;
    let mut failures = Vec::new();
    let mut status = Status::Ok;
    let mut rows = Vec::new();
    for len in (d - 1)..=hi {
        let e = enumerate_extremal(&group, &weights, d, len, enumeration_budget(g))?;
        if !e.complete {
            status = Status::BudgetExhausted;
            break;
        }
        for s in &e.sequences {
            let o = check_theorem11(&group, s, &weights, d)?;
            instances += 1;
            if o.is_pass() {
                passes += 1;
            } else if o.is_fail() {
                failures.push(s.to_literal(&group));
            }
            rows.push(vec![s.to_literal(&group), outcome_label(&o).to_string()]);
        }
    }
    if !failures.is_empty() {
        status = Status::TheoremFailure;
    }
    let text = format!(
        "{instances} extremal sequences, {passes} decomposed, {} failures\n",
        failures.len()
    );
    let json = json!({
        "group": group.to_string(),
        "weights": weights.to_string(),
        "davenport": d,
        "instances": instances,
        "passes": passes,
        "failures": failures,
    });
    Ok((
        Output {
            json,
            header: vec!["sequence", "check"],
            rows,
            text,
        },
        status,
    ))
}

fn verify(g: &Global, suite: &str, findings: Option<&Path>) -> Result<(Output, Status)> {
    let suites: Vec<Suite> = if suite.eq_ignore_ascii_case("all") {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let mut ctx = SuiteContext::new(g.seed);
    if let Some(b) = g.budget {
        ctx.search.node_budget = b;
        ctx.enumeration_budget = b;
    }
    let path = catalog_path(g);
    ctx = ctx.with_catalog(&Catalog::load(&path)?);
    let mut reports: Vec<SuiteReport> = Vec::new();
    let mut status = Status::Ok;
    for s in &suites {
        match run_suite(*s, &ctx) {
            Ok(r) => {
                if !r.passed() {
                    status = status.worst(Status::TheoremFailure);
                }
                reports.push(r);
            }
            Err(Error::BudgetExhausted { budget }) => {
                eprintln!("{s}: budget of {budget} exhausted");
                status = status.worst(Status::BudgetExhausted);
            }
            Err(e) => return Err(e),
        }
    }
    record(&path, ctx.new_catalog_entries(&timestamp()))?;
    if let Some(path) = findings {
        let found: Vec<&SuiteReport> = reports
            .iter()
            .filter(|r| r.suite == Suite::Cor3Identity.name())
            .collect();
        let body =
            serde_json::to_string_pretty(&json!({"seed": g.seed, "reports": found})).expect("json values serialize");
        std::fs::write(path, body + "\n").map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))?;
    }

    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &reports {
        text.push_str(&format!(
            "{} {}: {} instances, {} passed, {} failed, {} skipped\n",
            if r.passed() { "PASS" } else { "FAIL" },
            r.suite,
            r.instances,
            r.passes,
            r.failed,
            r.skipped
        ));
        for f in &r.failures {
            text.push_str(&format!("  failure: {f}\n"));
        }
        for o in &r.observations {
            text.push_str(&format!("  note: {o}\n"));
        }
        rows.push(vec![
            r.suite.clone(),
            r.instances.to_string(),
            r.passes.to_string(),
            r.failed.to_string(),
            r.skipped.to_string(),
        ]);
    }
    let json = if suites.len() == 1 && reports.len() == 1 {
        serde_json::to_value(&reports[0])
    } else {
        serde_json::to_value(&reports)
    }
    .expect("reports serialize");
    Ok((
        Output {
            json,
            header: vec!["suite", "instances", "passes", "failed", "skipped"],
            rows,
            text,
        },
        status,
    ))
}

fn catalog(g: &Global, action: CatalogAction) -> Result<(Output, Status)> {
    let path = catalog_path(g);
    match action {
        CatalogAction::Show => {
            let cat = Catalog::load(&path)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for e in cat.entries() {
                text.push_str(&format!(
                    "{} {} D={}{}\n",
                    e.group_key,
                    e.weight_key,
                    e.davenport,
                    if e.exact { "" } else { " (lower bound)" }
                ));
                rows.push(vec![
                    e.group_key.clone(),
                    e.weight_key.clone(),
                    e.davenport.to_string(),
                    e.exact.to_string(),
                ]);
            }
            let json = serde_json::to_value(&cat).expect("catalog serializes");
            Ok((
                Output {
                    json,
                    header: vec!["group", "weights", "davenport", "exact"],
                    rows,
                    text,
                },
                Status::Ok,
            ))
        }
        CatalogAction::Prune => {
            let _lock = CatalogLock::acquire(&path, LOCK_TIMEOUT)?;
            let mut cat = Catalog::load(&path)?;
            let removed = cat.prune_inexact();
            if removed > 0 {
                cat.save(&path)?;
            }
            let json = json!({"removed": removed, "remaining": cat.len()});
            Ok((
                Output {
                    json,
                    header: vec!["removed", "remaining"],
                    rows: vec![vec![removed.to_string(), cat.len().to_string()]],
                    text: format!("removed {removed}, {} remaining\n", cat.len()),
                },
                Status::Ok,
            ))
        }
    }
}
