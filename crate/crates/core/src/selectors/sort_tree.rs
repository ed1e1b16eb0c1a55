//! Balanced tree of lazily merged sorted streams.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::{check_inputs, left_size, LevelMeans, RunStats, SelectionResult};
use crate::error::Result;
use crate::score::ScoreKey;

/// Sorted `k` smallest sums, with index tuples when `want_indices`.
///
/// Leaves pop their array in order from a min-heap. An internal node keeps
/// the values popped so far from each child (its margins) and a heap of
/// candidate cells `(i, j)` meaning `left[i] + right[j]`. Popping a cell
/// proposes its right and lower neighbours, pulling a child value only when
/// a neighbour reaches past the margin. After a node's first pop, one pop
/// never needs to pull from both children; pops that do are counted in
/// [`RunStats::one_axis_violations`].
pub fn sort_tree_select(arrays: &[Vec<ScoreKey>], k: usize, want_indices: bool) -> Result<SelectionResult> {
    check_inputs(arrays, k)?;
    let mut root = Node::build(arrays);
    let mut values = Vec::with_capacity(k);
    for _ in 0..k {
        values.push(root.pop().expect("k is within the tensor"));
    }

    let indices = want_indices.then(|| {
        (0..k)
            .map(|r| {
                let mut tuple = Vec::with_capacity(arrays.len());
                root.write_tuple(r, &mut tuple);
                tuple
            })
            .collect()
    });

    let mut levels = LevelMeans::default();
    let mut stats = RunStats::default();
    root.collect_stats(0, &mut levels, &mut stats);
    stats.pops_per_level = levels.means();
    Ok(SelectionResult { values, sorted: true, indices, stats })
}

enum Node {
    Leaf(Leaf),
    Inner(Box<Inner>),
}

struct Leaf {
    pending: BinaryHeap<Reverse<(ScoreKey, usize)>>,
    /// Original positions in pop order.
    order: Vec<usize>,
}

struct Inner {
    left: Node,
    right: Node,
    left_values: Vec<ScoreKey>,
    right_values: Vec<ScoreKey>,
    left_done: bool,
    right_done: bool,
    hull: BinaryHeap<Reverse<(ScoreKey, u32, u32)>>,
    /// Cells ever offered; popped cells stay so they are not offered twice.
    offered: HashSet<(u32, u32)>,
    /// Cells in pop order.
    popped: Vec<(u32, u32)>,
    hull_peak: usize,
    violations: u64,
}

impl Node {
    fn build(arrays: &[Vec<ScoreKey>]) -> Node {
        if let [array] = arrays {
            return Node::Leaf(Leaf {
                pending: array.iter().enumerate().map(|(i, &v)| Reverse((v, i))).collect(),
                order: Vec::new(),
            });
        }
        let (l, r) = arrays.split_at(left_size(arrays.len()));
        Node::Inner(Box::new(Inner {
            left: Node::build(l),
            right: Node::build(r),
            left_values: Vec::new(),
            right_values: Vec::new(),
            left_done: false,
            right_done: false,
            hull: BinaryHeap::new(),
            offered: HashSet::new(),
            popped: Vec::new(),
            hull_peak: 0,
            violations: 0,
        }))
    }

    fn pops(&self) -> usize {
        match self {
            Node::Leaf(leaf) => leaf.order.len(),
            Node::Inner(inner) => inner.popped.len(),
        }
    }

    fn pop(&mut self) -> Option<ScoreKey> {
        match self {
            Node::Leaf(leaf) => {
                let Reverse((v, i)) = leaf.pending.pop()?;
                leaf.order.push(i);
                Some(v)
            }
            Node::Inner(inner) => inner.pop(),
        }
    }

    /// Appends the leaf positions behind this node's `r`-th pop, in array order.
    fn write_tuple(&self, r: usize, out: &mut Vec<usize>) {
        match self {
            Node::Leaf(leaf) => out.push(leaf.order[r]),
            Node::Inner(inner) => {
                let (i, j) = inner.popped[r];
                inner.left.write_tuple(i as usize, out);
                inner.right.write_tuple(j as usize, out);
            }
        }
    }

    fn collect_stats(&self, depth: usize, levels: &mut LevelMeans, stats: &mut RunStats) {
        levels.add(depth, self.pops() as f64);
        stats.values_generated += self.pops() as u64;
        if let Node::Inner(inner) = self {
            stats.fringe_peak = stats.fringe_peak.max(inner.hull_peak);
            stats.one_axis_violations += inner.violations;
            inner.left.collect_stats(depth + 1, levels, stats);
            inner.right.collect_stats(depth + 1, levels, stats);
        }
    }
}

impl Inner {
    /// Makes `left_values[i]` available if the left child can supply it.
    fn pull_left(&mut self, i: usize, pulls: &mut u32) -> bool {
        if i < self.left_values.len() {
            return true;
        }
        if self.left_done {
            return false;
        }
        *pulls += 1;
        match self.left.pop() {
            Some(v) => {
                self.left_values.push(v);
                true
            }
            None => {
                self.left_done = true;
                false
            }
        }
    }

    fn pull_right(&mut self, j: usize, pulls: &mut u32) -> bool {
        if j < self.right_values.len() {
            return true;
        }
        if self.right_done {
            return false;
        }
        *pulls += 1;
        match self.right.pop() {
            Some(v) => {
                self.right_values.push(v);
                true
            }
            None => {
                self.right_done = true;
                false
            }
        }
    }

    fn offer(&mut self, i: u32, j: u32) {
        if self.offered.insert((i, j)) {
            let v = self.left_values[i as usize] + self.right_values[j as usize];
            self.hull.push(Reverse((v, i, j)));
        }
    }

    fn pop(&mut self) -> Option<ScoreKey> {
        let mut pulls = 0;
        if self.popped.is_empty() && self.hull.is_empty() {
            if !(self.pull_left(0, &mut pulls) && self.pull_right(0, &mut pulls)) {
                return None;
            }
            self.offer(0, 0);
        }
        let first = self.popped.is_empty();
        self.hull_peak = self.hull_peak.max(self.hull.len());
        let Reverse((v, i, j)) = self.hull.pop()?;
        self.popped.push((i, j));
        if self.pull_left(i as usize + 1, &mut pulls) {
            self.offer(i + 1, j);
        }
        if self.pull_right(j as usize + 1, &mut pulls) {
            self.offer(i, j + 1);
        }
        if !first && pulls > 1 {
            self.violations += 1;
        }
        Some(v)
    }
}
