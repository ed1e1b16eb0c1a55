//! End-to-end selectors over `X1 + ... + Xm`.
//!
//! Every selector takes `m` nonempty arrays and `1 <= k <= n1 * ... * nm`
//! and returns the `k` smallest sums by multiplicity. Tree-shaped selectors
//! split the arrays in input order, `ceil(m/2)` to the left.

mod brute_force;
mod fast_soft_tree;
mod soft_tensor;
mod soft_tree;
mod sort_tensor;
mod sort_tree;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::score::{Multiset, ScoreKey};

pub use brute_force::{brute_force_select, brute_force_select_with_guard, guard_from_env, DEFAULT_GUARD, GUARD_ENV};
pub use fast_soft_tree::{fast_soft_tree_select, theoretical_exponent, FastSoftTree};
pub use soft_tensor::soft_tensor_select;
pub use soft_tree::soft_tree_select;
pub use sort_tensor::{sort_tensor_select, sort_tensor_select_with, BinaryFringe, Fringe, PairingHeap};
pub use sort_tree::sort_tree_select;

/// One 0-based position per input array, into the array as given.
pub type IndexTuple = Vec<usize>;

/// Instrumentation collected during a selection.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunStats {
    /// Mean number of values each node handed upward, by tree depth
    /// (index 0 is the root). Flat methods report a single entry.
    pub pops_per_level: Vec<f64>,
    /// Values materialized across all nodes or tuples touched.
    pub values_generated: u64,
    /// Items that became corrupted in any soft heap.
    pub corrupted_count: u64,
    /// Largest number of live candidates in any one heap or fringe.
    pub fringe_peak: usize,
    pub soft_heap_inserts: u64,
    /// Sort-tree pops after a node's first that pulled from both children.
    pub one_axis_violations: u64,
}

/// Values of a selection, optionally with the tuples that produced them.
#[derive(Clone, Debug)]
pub struct SelectionResult {
    pub values: Vec<ScoreKey>,
    /// Whether `values` is nondecreasing by construction.
    pub sorted: bool,
    pub indices: Option<Vec<IndexTuple>>,
    pub stats: RunStats,
}

impl SelectionResult {
    pub fn multiset(&self) -> Multiset {
        Multiset::new(self.values.clone())
    }
}

/// The available selectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    SoftTensor,
    SoftTree,
    SortTensor,
    SortTree,
    FastSoftTree,
    BruteForce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::SoftTensor,
        Algorithm::SoftTree,
        Algorithm::SortTensor,
        Algorithm::SortTree,
        Algorithm::FastSoftTree,
        Algorithm::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SoftTensor => "soft-tensor",
            Algorithm::SoftTree => "soft-tree",
            Algorithm::SortTensor => "sort-tensor",
            Algorithm::SortTree => "sort-tree",
            Algorithm::FastSoftTree => "fast-soft-tree",
            Algorithm::BruteForce => "brute-force",
        }
    }

    /// Runs the selector. `alpha` is used by the fast soft tree only.
    pub fn select(self, arrays: &[Vec<ScoreKey>], k: usize, alpha: f64) -> Result<SelectionResult> {
        match self {
            Algorithm::SoftTensor => soft_tensor_select(arrays, k),
            Algorithm::SoftTree => soft_tree_select(arrays, k),
            Algorithm::SortTensor => sort_tensor_select(arrays, k),
            Algorithm::SortTree => sort_tree_select(arrays, k, true),
            Algorithm::FastSoftTree => fast_soft_tree_select(arrays, k, alpha),
            Algorithm::BruteForce => brute_force_select(arrays, k),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

/// Number of cells of the sum tensor, saturating.
pub fn tensor_size(arrays: &[Vec<ScoreKey>]) -> u128 {
    arrays.iter().fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
}

pub(crate) fn check_inputs(arrays: &[Vec<ScoreKey>], k: usize) -> Result<()> {
    if arrays.is_empty() {
        return Err(Error::ContractViolation("need at least one array".into()));
    }
    if let Some(i) = arrays.iter().position(|a| a.is_empty()) {
        return Err(Error::ContractViolation(format!("array {i} is empty")));
    }
    let cells = tensor_size(arrays);
    if k == 0 || k as u128 > cells {
        return Err(Error::ContractViolation(format!("k must satisfy 1 <= k <= {cells}, got {k}")));
    }
    Ok(())
}

/// Size of the left subtree when `m` arrays are split.
pub(crate) fn left_size(m: usize) -> usize {
    m.div_ceil(2)
}

/// Accumulates per-depth sums into means.
#[derive(Default)]
pub(crate) struct LevelMeans {
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl LevelMeans {
    pub(crate) fn add(&mut self, depth: usize, value: f64) {
        if self.sums.len() <= depth {
            self.sums.resize(depth + 1, 0.0);
            self.counts.resize(depth + 1, 0);
        }
        self.sums[depth] += value;
        self.counts[depth] += 1;
    }

    pub(crate) fn means(&self) -> Vec<f64> {
        self.sums.iter().zip(&self.counts).map(|(s, &c)| s / c as f64).collect()
    }
}
