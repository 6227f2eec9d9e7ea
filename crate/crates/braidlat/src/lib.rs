//! Exact tools for 3-braid knots: braid-word algebra with Garside
//! conjugacy, the blowup and (−2)-expansion string calculi, weighted
//! cycle-graph lattices with exact integer linear algebra, an exhaustive
//! odd-index embedding oracle for the standard diagonal negative lattice,
//! the circular-subset reduction pipelines, and a classifier that decides
//! which concordance family a 3-braid knot closure can belong to.
//!
//! All arithmetic is exact; every verdict carries certificates that the
//! other modules can independently re-check.

pub mod braid;
pub mod calculus;
pub mod circular;
pub mod classify;
pub mod embed;
pub mod lattice;

pub use braid::{BraidWord, ClosurePermutation, Letter, NormalForm3};
pub use calculus::{CircularString, NatString};
pub use classify::{classify_knot, Verdict};
pub use lattice::{GammaSpec, GramLattice};

/// Budgets and slack parameters for the bounded searches. Budgets are
/// expected to be generous; exceeding one is always reported as a distinct
/// outcome, never conflated with a negative answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Node cap for the lattice embedding search.
    pub embed_budget: u64,
    /// State cap for super summit set exploration.
    pub conjugacy_budget: usize,
    /// State cap for the alternating normal form search.
    pub normal_form_budget: usize,
    /// Extra letters the normal form search may insert beyond the reduced
    /// input length.
    pub normal_form_slack: usize,
    /// Node cap for the dominated-blowup witness search.
    pub witness_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            embed_budget: 10_000_000,
            conjugacy_budget: 1_000_000,
            normal_form_budget: 2_000_000,
            normal_form_slack: 4,
            witness_budget: 1_000_000,
        }
    }
}
