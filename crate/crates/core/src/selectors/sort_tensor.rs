//! Sorted enumeration over the sum tensor with a fringe of candidate tuples.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::{check_inputs, RunStats, SelectionResult};
use crate::error::Result;
use crate::score::ScoreKey;

/// Priority queue of `(key, id)` candidates.
pub trait Fringe {
    fn push(&mut self, key: ScoreKey, id: u32);
    fn pop(&mut self) -> Option<(ScoreKey, u32)>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fringe on the standard library's binary heap.
#[derive(Clone, Debug, Default)]
pub struct BinaryFringe(BinaryHeap<Reverse<(ScoreKey, u32)>>);

impl Fringe for BinaryFringe {
    fn push(&mut self, key: ScoreKey, id: u32) {
        self.0.push(Reverse((key, id)));
    }

    fn pop(&mut self) -> Option<(ScoreKey, u32)> {
        self.0.pop().map(|Reverse(x)| x)
    }

    fn len(&self) -> usize {
        self.0.len()
    }
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct PairingNode {
    key: ScoreKey,
    id: u32,
    child: u32,
    sibling: u32,
}

/// Mergeable min-heap with `O(1)` insert and meld and `O(log n)` amortized
/// pop (two-pass pairing).
#[derive(Clone, Debug, Default)]
pub struct PairingHeap {
    nodes: Vec<PairingNode>,
    free: Vec<u32>,
    root: Option<u32>,
    len: usize,
}

impl PairingHeap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn peek(&self) -> Option<(ScoreKey, u32)> {
        self.root.map(|r| (self.nodes[r as usize].key, self.nodes[r as usize].id))
    }

    /// Moves every item of `other` into `self`.
    pub fn merge(&mut self, mut other: PairingHeap) {
        while let Some((key, id)) = other.pop() {
            self.push(key, id);
        }
    }

    fn link(&mut self, a: u32, b: u32) -> u32 {
        let (top, below) = if self.nodes[b as usize].key < self.nodes[a as usize].key { (b, a) } else { (a, b) };
        self.nodes[below as usize].sibling = self.nodes[top as usize].child;
        self.nodes[top as usize].child = below;
        top
    }
}

impl Fringe for PairingHeap {
    fn push(&mut self, key: ScoreKey, id: u32) {
        let node = PairingNode { key, id, child: NONE, sibling: NONE };
        let x = match self.free.pop() {
            Some(x) => {
                self.nodes[x as usize] = node;
                x
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        self.root = Some(match self.root {
            Some(r) => self.link(r, x),
            None => x,
        });
        self.len += 1;
    }

    fn pop(&mut self) -> Option<(ScoreKey, u32)> {
        let r = self.root?;
        let out = (self.nodes[r as usize].key, self.nodes[r as usize].id);
        self.free.push(r);
        self.len -= 1;

        let mut pairs = Vec::new();
        let mut cur = self.nodes[r as usize].child;
        while cur != NONE {
            let next = self.nodes[cur as usize].sibling;
            self.nodes[cur as usize].sibling = NONE;
            if next == NONE {
                pairs.push(cur);
                break;
            }
            let after = self.nodes[next as usize].sibling;
            self.nodes[next as usize].sibling = NONE;
            pairs.push(self.link(cur, next));
            cur = after;
        }
        self.root = pairs.into_iter().rev().reduce(|acc, x| self.link(acc, x));
        Some(out)
    }

    fn len(&self) -> usize {
        self.len
    }
}

/// One axis sorted on demand by a min-heap.
struct SortedAxis {
    pending: BinaryHeap<Reverse<(ScoreKey, usize)>>,
    sorted: Vec<(ScoreKey, usize)>,
    len: usize,
}

impl SortedAxis {
    fn new(values: &[ScoreKey]) -> Self {
        SortedAxis {
            pending: values.iter().enumerate().map(|(i, &v)| Reverse((v, i))).collect(),
            sorted: Vec::new(),
            len: values.len(),
        }
    }

    /// Value and original position of rank `r`.
    fn get(&mut self, r: usize) -> (ScoreKey, usize) {
        while self.sorted.len() <= r {
            let Reverse(x) = self.pending.pop().expect("rank within axis");
            self.sorted.push(x);
        }
        self.sorted[r]
    }
}

/// Sorted `k` smallest sums with index tuples, using a binary-heap fringe.
pub fn sort_tensor_select(arrays: &[Vec<ScoreKey>], k: usize) -> Result<SelectionResult> {
    sort_tensor_select_with::<BinaryFringe>(arrays, k)
}

/// Tuples are ranks into each axis's sorted order. Popping a tuple pushes
/// its `m` successors (one axis advanced by one rank) unless already seen.
pub fn sort_tensor_select_with<F: Fringe + Default>(arrays: &[Vec<ScoreKey>], k: usize) -> Result<SelectionResult> {
    check_inputs(arrays, k)?;
    let m = arrays.len();
    let mut axes: Vec<SortedAxis> = arrays.iter().map(|a| SortedAxis::new(a)).collect();
    let mut fringe = F::default();
    let mut flat: Vec<u32> = Vec::new();
    let mut seen: HashSet<Box<[u32]>> = HashSet::new();
    let mut peak = 0;

    let mut push = |tuple: &[u32], axes: &mut [SortedAxis], fringe: &mut F, flat: &mut Vec<u32>| {
        if !seen.insert(tuple.into()) {
            return;
        }
        let mut sum = axes[0].get(tuple[0] as usize).0;
        for t in 1..m {
            sum = sum + axes[t].get(tuple[t] as usize).0;
        }
        let id = u32::try_from(flat.len() / m).expect("tuple arena exceeds u32");
        flat.extend_from_slice(tuple);
        fringe.push(sum, id);
    };

    push(&vec![0; m], &mut axes, &mut fringe, &mut flat);
    let mut values = Vec::with_capacity(k);
    let mut indices = Vec::with_capacity(k);
    let mut tuple = vec![0u32; m];
    for _ in 0..k {
        peak = peak.max(fringe.len());
        let (sum, id) = fringe.pop().expect("fringe outlives k pops");
        tuple.copy_from_slice(&flat[id as usize * m..(id as usize + 1) * m]);
        values.push(sum);
        indices.push(tuple.iter().enumerate().map(|(t, &r)| axes[t].get(r as usize).1).collect());
        for t in 0..m {
            if (tuple[t] as usize + 1) < axes[t].len {
                tuple[t] += 1;
                push(&tuple, &mut axes, &mut fringe, &mut flat);
                tuple[t] -= 1;
            }
        }
    }
    Ok(SelectionResult {
        values,
        sorted: true,
        indices: Some(indices),
        stats: RunStats {
            pops_per_level: vec![k as f64],
            values_generated: (flat.len() / m) as u64,
            fringe_peak: peak,
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::keys;
    use crate::selectors::brute_force_select;
    use crate::selectors::testutil::int_arrays;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairing_heap_sorts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut h = PairingHeap::new();
        let mut expected = Vec::new();
        for i in 0..5000u32 {
            let v: f64 = rng.random_range(0..100) as f64;
            h.push(ScoreKey::new(v).unwrap(), i);
            expected.push(v);
            if i % 3 == 0 {
                let (min, _) = h.pop().unwrap();
                expected.sort_by(f64::total_cmp);
                assert_eq!(min.value(), expected.remove(0));
            }
        }
        let mut other = PairingHeap::new();
        other.push(ScoreKey::new(-1.0).unwrap(), 99);
        h.merge(other);
        assert_eq!(h.peek().unwrap().0.value(), -1.0);
        assert_eq!(h.len(), expected.len() + 1);
    }

    #[test]
    fn examples() {
        let a = vec![keys(&[1.0, 2.0]).unwrap(), keys(&[1.0, 3.0]).unwrap()];
        let r = sort_tensor_select(&a, 3).unwrap();
        assert_eq!(r.values, keys(&[2.0, 3.0, 4.0]).unwrap());
        assert!(r.sorted);
        let r = sort_tensor_select(&a, 1).unwrap();
        assert_eq!(r.indices.unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn matches_sorted_brute_force() {
        for seed in 0..100u64 {
            let arrays = int_arrays(seed, 3, 5, 30);
            let expected = brute_force_select(&arrays, 30).unwrap().values;
            let binary = sort_tensor_select(&arrays, 30).unwrap();
            let pairing = sort_tensor_select_with::<PairingHeap>(&arrays, 30).unwrap();
            assert_eq!(binary.values, expected);
            assert_eq!(pairing.values, expected);
            for (v, idx) in binary.values.iter().zip(binary.indices.unwrap()) {
                let s = idx.iter().enumerate().fold(0.0, |acc, (t, &i)| acc + arrays[t][i].value());
                assert_eq!(s, v.value());
            }
        }
    }
}
