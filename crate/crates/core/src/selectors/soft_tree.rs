//! Balanced tree of pairwise soft selections.

use super::{check_inputs, left_size, LevelMeans, RunStats, SelectionResult};
use crate::error::Result;
use crate::pairwise::{soft_select_pairwise_with, PAIRWISE_EPSILON};
use crate::score::ScoreKey;
use crate::select::select_k;

/// Unsorted `k` smallest sums.
///
/// Leaves select their `k` smallest values; each internal node selects the
/// `k` smallest sums of its children's outputs. Any `k` smallest sums draw
/// on at most `k` values from each side, so `k` per child suffices.
pub fn soft_tree_select(arrays: &[Vec<ScoreKey>], k: usize) -> Result<SelectionResult> {
    check_inputs(arrays, k)?;
    let mut levels = LevelMeans::default();
    let mut stats = RunStats::default();
    let values = solve(arrays, k, 0, &mut levels, &mut stats)?;
    stats.pops_per_level = levels.means();
    Ok(SelectionResult { values, sorted: false, indices: None, stats })
}

fn solve(arrays: &[Vec<ScoreKey>], k: usize, depth: usize, levels: &mut LevelMeans, stats: &mut RunStats) -> Result<Vec<ScoreKey>> {
    if let [array] = arrays {
        let k = k.min(array.len());
        levels.add(depth, k as f64);
        stats.values_generated += k as u64;
        return Ok(select_k(array, k)?.into_vec());
    }
    let (l, r) = arrays.split_at(left_size(arrays.len()));
    let a = solve(l, k, depth + 1, levels, stats)?;
    let b = solve(r, k, depth + 1, levels, stats)?;
    let k = k.min(a.len().saturating_mul(b.len()));
    let run = soft_select_pairwise_with(&a, &b, k, PAIRWISE_EPSILON)?;
    levels.add(depth, run.counters.pops as f64);
    stats.values_generated += run.counters.inserts;
    stats.corrupted_count += run.counters.corrupted;
    stats.soft_heap_inserts += run.counters.inserts;
    stats.fringe_peak = stats.fringe_peak.max(run.counters.peak_live);
    Ok(run.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::{keys, Multiset};
    use crate::selectors::testutil::{fold_oracle, int_arrays};

    #[test]
    fn single_array_is_plain_selection() {
        let a = vec![keys(&[5.0, 1.0, 3.0]).unwrap()];
        assert_eq!(soft_tree_select(&a, 2).unwrap().multiset(), keys(&[1.0, 3.0]).unwrap().into());
    }

    #[test]
    fn four_pairs() {
        let a = vec![keys(&[1.0, 2.0]).unwrap(); 4];
        let expected: Multiset = keys(&[4.0, 5.0, 5.0]).unwrap().into();
        assert_eq!(soft_tree_select(&a, 3).unwrap().multiset(), expected);
    }

    #[test]
    fn matches_brute_force_m8() {
        for seed in 0..100u64 {
            let arrays = int_arrays(seed, 8, 8, 64);
            let got = soft_tree_select(&arrays, 64).unwrap();
            assert_eq!(got.multiset(), fold_oracle(&arrays, 64));
            assert_eq!(got.stats.pops_per_level.len(), 4);
        }
    }
}
