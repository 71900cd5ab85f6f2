//! Exact weighted zero-sum combinatorics over finite abelian groups.
//!
//! For a sequence `S` over a finite abelian group `G` and a set of integer
//! weights `A`, this crate counts the index sets `I` for which some weighted
//! sum `Σ_{i∈I} a_i g_i` equals a given `g` ([`counting`]), finds the weighted
//! Davenport constant `D_A(G)` by exhaustive search ([`davenport`]), and
//! analyses sequences attaining the lower bound `N_{A,0}(S) ≥ 2^{|S|-D_A(G)+1}`
//! ([`extremal`]). [`suites`] bundles the sweeps that check the structural
//! statements about those sequences, and [`catalog`] caches search results.
//!
//! Counting is generic over the count scalar ([`Count`]); the aliases below
//! name the common choices.

pub mod bitset;
pub mod catalog;
pub mod counting;
pub mod davenport;
pub mod error;
pub mod extremal;
pub mod group;
pub mod scalar;
pub mod sequence;
pub mod suites;
pub mod weights;

pub use bitset::ElementSet;
pub use counting::{
    bound_holds, brute_force_count_vector, count_vector, count_vector_with, is_zero_sum_free, sum_support, CountConfig,
    CountVector, SumSupport,
};
pub use davenport::{davenport_constant, max_zero_sum_free, DavenportResult, SearchOptions};
pub use error::{Error, Result};
pub use group::{ElementIndex, FiniteAbelianGroup, GroupElement};
pub use num_bigint::BigUint;
pub use scalar::Count;
pub use sequence::{GPlusPartition, Sequence};
pub use weights::{WeightOrbit, WeightSet};

/// Exact, arbitrary-precision counts.
pub type ExactCountVector = CountVector<BigUint>;
/// Counts for sequences of at most 63 terms.
pub type CountVector64 = CountVector<u64>;
/// Counts for sequences of at most 127 terms.
pub type CountVector128 = CountVector<u128>;

/// Version string recorded in catalog entries and reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
