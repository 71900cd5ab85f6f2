//! Weighted Davenport constants by exhaustive search.
//!
//! `D_A(G)` is one more than the length of the longest `A`-zero-sum-free
//! sequence. The search walks canonical (non-decreasing index) multisets over
//! the candidate elements, carrying `Σ_A^•` of the prefix as a bitset; an
//! element `g` may extend the prefix only if `Σ_A^• ⊕ A·g` avoids 0.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bitset::ElementSet;
use crate::counting::is_zero_sum_free;
use crate::error::{Error, Result};
use crate::group::{ElementIndex, FiniteAbelianGroup};
use crate::sequence::{enumerate_sequences, multiset_count, GPlusPartition, Sequence};
use crate::weights::WeightSet;

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_budget: u64,
    /// Maximum number of witnesses kept; the total is still counted.
    pub witness_limit: usize,
    /// Search top-level branches on the rayon pool.
    pub parallel: bool,
    /// Restrict to `G^+` when `|G|` is odd and `A` is symmetric mod `exp(G)`.
    pub sign_reduction: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            witness_limit: 32,
            parallel: true,
            sign_reduction: true,
        }
    }
}

/// Outcome of [`max_zero_sum_free`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DavenportResult {
    /// `D_A(G)` when `exact`, otherwise a lower bound.
    pub value: usize,
    pub max_zsf_length: usize,
    /// Maximal zero-sum-free sequences in canonical search order.
    pub witnesses: Vec<Sequence>,
    /// Number of maximal zero-sum-free sequences visited (up to sign
    /// normalization when the sign reduction was active).
    pub witness_count: u64,
    pub nodes_explored: u64,
    pub exact: bool,
    pub sign_reduced: bool,
    pub elapsed: Duration,
}

impl DavenportResult {
    /// `D_A(G)`, or an error if the search did not finish.
    pub fn davenport(&self, budget: u64) -> Result<usize> {
        if self.exact {
            Ok(self.value)
        } else {
            Err(Error::BudgetExhausted { budget })
        }
    }
}

/// Nonzero elements whose orbit avoids 0; nothing else can occur in a
/// zero-sum-free sequence.
pub fn candidate_elements(group: &FiniteAbelianGroup, weights: &WeightSet) -> Vec<ElementIndex> {
    group
        .indices()
        .skip(1)
        .filter(|&g| !weights.orbit_indices(group, g).contains(&ElementIndex::ZERO))
        .collect()
}

struct Searcher<'a> {
    group: &'a FiniteAbelianGroup,
    candidates: Vec<ElementIndex>,
    orbits: Vec<Vec<ElementIndex>>,
    witness_limit: usize,
}

/// Node allowance for one branch walk. `shared` only stops parallel walks
/// early; exact accounting happens when branches are merged.
struct Allowance<'a> {
    limit: u64,
    shared: Option<(&'a AtomicU64, u64)>,
}

#[derive(Default)]
struct Branch {
    best: usize,
    witnesses: Vec<Sequence>,
    witness_count: u64,
    nodes: u64,
    truncated: bool,
}

impl Searcher<'_> {
    fn record(&self, branch: &mut Branch, path: &[ElementIndex]) {
        if path.len() > branch.best || branch.witness_count == 0 {
            branch.best = path.len();
            branch.witnesses.clear();
            branch.witness_count = 0;
        }
        if path.len() == branch.best {
            branch.witness_count += 1;
            if branch.witnesses.len() < self.witness_limit {
                branch.witnesses.push(Sequence::from_indices(path.iter().copied()));
            }
        }
    }

    fn visit(&self, branch: &mut Branch, allowance: &Allowance) -> bool {
        branch.nodes += 1;
        let over_shared = allowance
            .shared
            .is_some_and(|(counter, budget)| counter.fetch_add(1, Ordering::Relaxed) + 1 > budget);
        if branch.nodes > allowance.limit || over_shared {
            branch.truncated = true;
            return false;
        }
        true
    }

    /// Tries to extend `path` (whose `Σ_A^•` is `bullet`) by candidate `pos`.
    fn extend(&self, pos: usize, bullet: &ElementSet) -> Option<ElementSet> {
        let shifted = bullet.sumset(self.group, &self.orbits[pos]);
        if shifted.contains(ElementIndex::ZERO) {
            return None;
        }
        let mut next = shifted;
        next.union_with(bullet);
        Some(next)
    }

    fn dfs(
        &self,
        start: usize,
        bullet: &ElementSet,
        path: &mut Vec<ElementIndex>,
        branch: &mut Branch,
        allowance: &Allowance,
    ) {
        self.record(branch, path);
        for pos in start..self.candidates.len() {
            if branch.truncated {
                return;
            }
            if let Some(next) = self.extend(pos, bullet) {
                if !self.visit(branch, allowance) {
                    return;
                }
                path.push(self.candidates[pos]);
                self.dfs(pos, &next, path, branch, allowance);
                path.pop();
            }
        }
    }

    fn run_branch(&self, first: usize, root: &ElementSet, allowance: &Allowance) -> Branch {
        let mut branch = Branch::default();
        if let Some(next) = self.extend(first, root) {
            if self.visit(&mut branch, allowance) {
                let mut path = vec![self.candidates[first]];
                self.dfs(first, &next, &mut path, &mut branch, allowance);
            }
        }
        branch
    }
}

/// Longest `A`-zero-sum-free sequences over `G`, by pruned depth-first search.
///
/// The result is exact when the search finishes within the node budget;
/// otherwise `exact` is false and `value` is only a lower bound. Results,
/// including partial ones, do not depend on the number of worker threads.
pub fn max_zero_sum_free(group: &FiniteAbelianGroup, weights: &WeightSet, options: &SearchOptions) -> DavenportResult {
    let started = Instant::now();
    let mut candidates = candidate_elements(group, weights);
    let sign_reduced =
        options.sign_reduction && group.order() % 2 == 1 && group.order() > 1 && weights.group_symmetric(group);
    if sign_reduced {
        let partition = GPlusPartition::new(group).expect("odd order");
        candidates.retain(|&g| partition.is_plus(g));
    }
    let orbits = candidates.iter().map(|&g| weights.orbit_indices(group, g)).collect();
    let searcher = Searcher {
        group,
        candidates,
        orbits,
        witness_limit: options.witness_limit.max(1),
    };
    let root = ElementSet::singleton(group.order(), ElementIndex::ZERO);
    let budget = options.node_budget;
    // The root counts as the first node.
    let branch_budget = budget.saturating_sub(1);
    let counter = AtomicU64::new(0);
    let eager = Allowance {
        limit: branch_budget,
        shared: Some((&counter, branch_budget)),
    };
    let n = searcher.candidates.len();
    let branches: Vec<Branch> = if options.parallel {
        (0..n)
            .into_par_iter()
            .map(|i| searcher.run_branch(i, &root, &eager))
            .collect()
    } else {
        (0..n).map(|i| searcher.run_branch(i, &root, &eager)).collect()
    };

    // Replay branches in order against the remaining budget, redoing any
    // walk that was cut short or would overrun, as a sequential walk would.
    let mut merged = Branch::default();
    searcher.record(&mut merged, &[]);
    merged.nodes = 1;
    let mut exhausted = budget < 1;
    for (i, b) in branches.into_iter().enumerate() {
        if exhausted {
            break;
        }
        let remaining = budget.saturating_sub(merged.nodes);
        let b = if b.truncated || b.nodes > remaining {
            searcher.run_branch(
                i,
                &root,
                &Allowance {
                    limit: remaining,
                    shared: None,
                },
            )
        } else {
            b
        };
        exhausted = b.truncated;
        merged.nodes += b.nodes;
        if b.witness_count == 0 {
            continue;
        }
        if b.best > merged.best {
            merged.best = b.best;
            merged.witnesses.clear();
            merged.witness_count = 0;
        }
        if b.best == merged.best {
            merged.witness_count += b.witness_count;
            let room = searcher.witness_limit.saturating_sub(merged.witnesses.len());
            merged.witnesses.extend(b.witnesses.into_iter().take(room));
        }
    }

    DavenportResult {
        value: merged.best + 1,
        max_zsf_length: merged.best,
        witnesses: merged.witnesses,
        witness_count: merged.witness_count,
        nodes_explored: merged.nodes,
        exact: !exhausted,
        sign_reduced,
        elapsed: started.elapsed(),
    }
}

/// `D_A(G)` under the default search options.
pub fn davenport_constant(group: &FiniteAbelianGroup, weights: &WeightSet) -> Result<usize> {
    let options = SearchOptions::default();
    max_zero_sum_free(group, weights, &options).davenport(options.node_budget)
}

/// Result of the exhaustive length-`D` check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LengthCheck {
    /// Every sequence of the given length has a nonempty weighted zero-sum.
    Holds { checked: u128 },
    /// A zero-sum-free sequence of the given length.
    Counterexample(Sequence),
    /// The enumeration would exceed the budget.
    Skipped { required: u128, budget: u64 },
}

impl LengthCheck {
    pub fn holds(&self) -> Option<bool> {
        match self {
            LengthCheck::Holds { .. } => Some(true),
            LengthCheck::Counterexample(_) => Some(false),
            LengthCheck::Skipped { .. } => None,
        }
    }
}

/// Enumerates every canonical length-`length` sequence over the candidate
/// elements and tests each with the reachability fold. Shares no code with
/// the pruned search, so it independently confirms maximality.
pub fn verify_every_length_d_sequence_has_zero_sum(
    group: &FiniteAbelianGroup,
    weights: &WeightSet,
    length: usize,
    budget: u64,
) -> LengthCheck {
    let candidates = candidate_elements(group, weights);
    let required = multiset_count(candidates.len(), length);
    if required > budget as u128 {
        return LengthCheck::Skipped { required, budget };
    }
    for s in enumerate_sequences(&candidates, length) {
        if is_zero_sum_free(group, &s, weights) {
            return LengthCheck::Counterexample(s);
        }
    }
    LengthCheck::Holds { checked: required }
}
