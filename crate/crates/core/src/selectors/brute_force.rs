//! Exhaustive oracle: materialize every sum, select, sort.

use super::{check_inputs, tensor_size, RunStats, SelectionResult};
use crate::error::{Error, Result};
use crate::score::ScoreKey;

/// Largest tensor the oracle materializes unless overridden.
pub const DEFAULT_GUARD: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_GUARD`].
pub const GUARD_ENV: &str = "CARTESIAN_TOPK_GUARD";

/// The guard from [`GUARD_ENV`], or the default when unset or unparsable.
pub fn guard_from_env() -> u128 {
    std::env::var(GUARD_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_GUARD)
}

/// Sorted `k` smallest sums with their index tuples, refusing tensors
/// larger than [`guard_from_env`].
pub fn brute_force_select(arrays: &[Vec<ScoreKey>], k: usize) -> Result<SelectionResult> {
    brute_force_select_with_guard(arrays, k, guard_from_env())
}

pub fn brute_force_select_with_guard(arrays: &[Vec<ScoreKey>], k: usize, guard: u128) -> Result<SelectionResult> {
    check_inputs(arrays, k)?;
    let cells = tensor_size(arrays);
    if cells > guard {
        return Err(Error::GuardExceeded { cells, guard });
    }
    let m = arrays.len();
    let cells = cells as usize;

    // Odometer over all tuples; sums accumulate left to right.
    let mut sums = Vec::with_capacity(cells);
    let mut tuple = vec![0usize; m];
    for cell in 0..cells {
        let mut s = arrays[0][tuple[0]];
        for t in 1..m {
            s = s + arrays[t][tuple[t]];
        }
        sums.push((s, cell));
        for t in (0..m).rev() {
            tuple[t] += 1;
            if tuple[t] < arrays[t].len() {
                break;
            }
            tuple[t] = 0;
        }
    }
    if k < sums.len() {
        sums.select_nth_unstable(k);
        sums.truncate(k);
    }
    sums.sort_unstable();

    let indices = sums
        .iter()
        .map(|&(_, mut cell)| {
            let mut idx = vec![0; m];
            for t in (0..m).rev() {
                idx[t] = cell % arrays[t].len();
                cell /= arrays[t].len();
            }
            idx
        })
        .collect();
    Ok(SelectionResult {
        values: sums.into_iter().map(|(s, _)| s).collect(),
        sorted: true,
        indices: Some(indices),
        stats: RunStats {
            pops_per_level: vec![k as f64],
            values_generated: cells as u64,
            ..Default::default()
        },
    })
}
