//! Soft-heap selection directly over the m-dimensional sum tensor.

use super::{check_inputs, RunStats, SelectionResult};
use crate::error::Result;
use crate::pairwise::heapify;
use crate::score::ScoreKey;
use crate::select::retain_smallest;
use crate::soft_heap::SoftHeap;

/// Unsorted `k` smallest sums.
///
/// Each axis is heap-ordered and tuples are enumerated from the all-zero
/// tuple with a soft heap of `epsilon = 1/(3m)`. A tuple whose last
/// component is nonzero proposes the two heap children along the last axis.
/// Otherwise, with `j` the rightmost nonzero component (the first axis if
/// there is none), it proposes the heap children along axis `j` and, for
/// every later axis, the two tuples that set that axis to 1 or 2. Every
/// tuple has exactly one proposer and is no smaller than it.
pub fn soft_tensor_select(arrays: &[Vec<ScoreKey>], k: usize) -> Result<SelectionResult> {
    check_inputs(arrays, k)?;
    let m = arrays.len();
    let axes: Vec<Vec<ScoreKey>> = arrays
        .iter()
        .map(|a| {
            let mut a = a.clone();
            heapify(&mut a);
            a
        })
        .collect();
    let epsilon = if m == 1 { 1.0 / 3.0 } else { 1.0 / (3 * m) as f64 };
    let mut heap: SoftHeap<u32> = SoftHeap::new(epsilon)?;

    let mut tuples = Tensor { m, flat: Vec::new(), axes: &axes };
    let mut kept = Vec::with_capacity(2 * k);
    let mut peak = 0;
    let mut pops = 0u64;

    tuples.propose(&mut heap, &vec![0; m]);
    let mut counted = 0;
    while counted < k && !heap.is_empty() {
        peak = peak.max(heap.len());
        let (entry, newly) = heap.extract_min()?;
        pops += 1;
        for c in newly {
            kept.push(c.original_key);
            tuples.expand(&mut heap, c.payload);
        }
        if !entry.corrupted {
            kept.push(entry.original_key);
            tuples.expand(&mut heap, entry.payload);
            counted += 1;
        }
    }
    let values_generated = kept.len() as u64;
    retain_smallest(&mut kept, k);
    Ok(SelectionResult {
        values: kept,
        sorted: false,
        indices: None,
        stats: RunStats {
            pops_per_level: vec![pops as f64],
            values_generated,
            corrupted_count: heap.corrupted_total(),
            fringe_peak: peak,
            soft_heap_inserts: heap.inserts(),
            one_axis_violations: 0,
        },
    })
}

/// Arena of proposed tuples, `m` components each.
struct Tensor<'a> {
    m: usize,
    flat: Vec<u32>,
    axes: &'a [Vec<ScoreKey>],
}

impl Tensor<'_> {
    fn propose(&mut self, heap: &mut SoftHeap<u32>, tuple: &[usize]) {
        if tuple.iter().zip(self.axes).any(|(&i, axis)| i >= axis.len()) {
            return;
        }
        let sum = tuple[1..]
            .iter()
            .zip(&self.axes[1..])
            .fold(self.axes[0][tuple[0]], |acc, (&i, axis)| acc + axis[i]);
        let id = u32::try_from(self.flat.len() / self.m).expect("tuple arena exceeds u32");
        self.flat.extend(tuple.iter().map(|&i| i as u32));
        heap.insert(sum, id);
    }

    fn expand(&mut self, heap: &mut SoftHeap<u32>, id: u32) {
        let m = self.m;
        let start = id as usize * m;
        let mut tuple: Vec<usize> = self.flat[start..start + m].iter().map(|&i| i as usize).collect();
        let last = m - 1;
        if tuple[last] > 0 {
            let x = tuple[last];
            for child in [2 * x + 1, 2 * x + 2] {
                tuple[last] = child;
                self.propose(heap, &tuple);
            }
            return;
        }
        let j = (0..last).rev().find(|&t| tuple[t] > 0).unwrap_or(0);
        let x = tuple[j];
        for child in [2 * x + 1, 2 * x + 2] {
            tuple[j] = child;
            self.propose(heap, &tuple);
        }
        tuple[j] = x;
        for t in j + 1..m {
            for child in [1, 2] {
                tuple[t] = child;
                self.propose(heap, &tuple);
            }
            tuple[t] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::{keys, Multiset};
    use crate::selectors::brute_force_select;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn examples() {
        let a = vec![keys(&[1.0, 2.0]).unwrap(), keys(&[3.0, 4.0]).unwrap()];
        assert_eq!(soft_tensor_select(&a, 3).unwrap().multiset(), keys(&[4.0, 5.0, 5.0]).unwrap().into());
        let zeros = vec![keys(&[0.0; 3]).unwrap(); 4];
        let r = soft_tensor_select(&zeros, 7).unwrap();
        assert_eq!(r.multiset(), Multiset::new(vec![ScoreKey::ZERO; 7]));
        assert!(!r.sorted);
    }

    #[test]
    fn proposals_cover_every_tuple_once() {
        let axes = vec![keys(&[0.0; 5]).unwrap(), keys(&[0.0; 4]).unwrap(), keys(&[0.0; 6]).unwrap()];
        let mut heap = SoftHeap::new(0.01).unwrap();
        let mut tensor = Tensor { m: 3, flat: Vec::new(), axes: &axes };
        tensor.propose(&mut heap, &[0, 0, 0]);
        while !heap.is_empty() {
            let id = heap.extract_min().unwrap().0.payload;
            tensor.expand(&mut heap, id);
        }
        let seen: HashSet<&[u32]> = tensor.flat.chunks(3).collect();
        assert_eq!(seen.len(), tensor.flat.len() / 3);
        assert_eq!(seen.len(), 5 * 4 * 6);
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let arrays: Vec<Vec<ScoreKey>> = (0..3)
                .map(|_| (0..4).map(|_| ScoreKey::new(rng.random_range(0..20) as f64).unwrap()).collect())
                .collect();
            let r = soft_tensor_select(&arrays, 20).unwrap();
            assert_eq!(r.multiset(), brute_force_select(&arrays, 20).unwrap().multiset());
            assert!(r.stats.corrupted_count as f64 <= r.stats.soft_heap_inserts as f64);
        }
    }
}
