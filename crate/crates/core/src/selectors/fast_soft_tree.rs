//! Tree of A+B layer generators over layer-ordered leaves.

use super::{check_inputs, left_size, LevelMeans, RunStats, SelectionResult};
use crate::error::Result;
use crate::loh::{check_alpha, LeafGenerator, LohGenerator};
use crate::pairwise::AbNode;
use crate::score::ScoreKey;
use crate::select::select_k;

/// Exponent `e` in the `O(k * m^e)` propagation cost, `2 * log2(alpha)`.
pub fn theoretical_exponent(alpha: f64) -> f64 {
    2.0 * alpha.log2()
}

/// A balanced tree of [`AbNode`]s; leaves are layer-ordered once at
/// construction.
pub struct FastSoftTree {
    root: Box<dyn LohGenerator>,
}

impl FastSoftTree {
    pub fn new(arrays: &[Vec<ScoreKey>], alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(FastSoftTree { root: build(arrays, alpha)? })
    }

    pub fn root(&self) -> &dyn LohGenerator {
        &*self.root
    }

    /// Grows the root until it holds at least `k` values (or is exhausted)
    /// and selects the `k` smallest of them.
    pub fn select(&mut self, k: usize) -> Result<Vec<ScoreKey>> {
        while self.root.total_generated() < k && self.root.has_more_layers() {
            self.root.generate_next_layer();
        }
        let generated: Vec<ScoreKey> = (0..self.root.layer_count())
            .flat_map(|i| self.root.layer(i).iter().copied())
            .collect();
        Ok(select_k(&generated, k)?.into_vec())
    }

    /// Per-depth mean of values handed upward, plus summed heap counters.
    pub fn stats(&self) -> RunStats {
        let mut levels = LevelMeans::default();
        let mut stats = RunStats::default();
        walk(&*self.root, 0, &mut levels, &mut stats);
        stats.pops_per_level = levels.means();
        stats
    }
}

fn build(arrays: &[Vec<ScoreKey>], alpha: f64) -> Result<Box<dyn LohGenerator>> {
    if let [array] = arrays {
        return Ok(Box::new(LeafGenerator::new(array.clone(), alpha)?));
    }
    let (l, r) = arrays.split_at(left_size(arrays.len()));
    Ok(Box::new(AbNode::new(build(l, alpha)?, build(r, alpha)?, alpha)?))
}

fn walk(node: &dyn LohGenerator, depth: usize, levels: &mut LevelMeans, stats: &mut RunStats) {
    let handed_up = node.values_requested();
    levels.add(depth, handed_up as f64);
    stats.values_generated += handed_up as u64;
    let counters = node.heap_counters();
    stats.corrupted_count += counters.corrupted;
    stats.soft_heap_inserts += counters.inserts;
    stats.fringe_peak = stats.fringe_peak.max(counters.peak_live);
    for child in node.children() {
        walk(child, depth + 1, levels, stats);
    }
}

/// Unsorted `k` smallest sums.
pub fn fast_soft_tree_select(arrays: &[Vec<ScoreKey>], k: usize, alpha: f64) -> Result<SelectionResult> {
    check_inputs(arrays, k)?;
    let mut tree = FastSoftTree::new(arrays, alpha)?;
    let values = tree.select(k)?;
    Ok(SelectionResult { values, sorted: false, indices: None, stats: tree.stats() })
}
