//! Layer-ordered heaps.
//!
//! A layer-ordered heap (LOH) of rank `alpha` partitions its values into
//! layers `L0, L1, ...` with `max(Li) <= min(Li+1)`; order inside a layer is
//! arbitrary. Cumulative layer totals follow
//! `T0 = 1, Ti+1 = max(Ti + 1, ceil(alpha * Ti))`, so the first two layers
//! hold one value each and the size ratio of consecutive layers tends to
//! `alpha`. Layers and offsets are 0-based throughout.
//!
//! Every layer-`i` position has one or two children in layer `i + 1`
//! ([`child_offsets`]), which turns an LOH into a heap-ordered forest that
//! pairwise proposal schemes can walk.

use crate::error::{Error, Result};
use crate::score::ScoreKey;
use crate::select::partition_at;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must lie in the open interval (1, 2), got {alpha}"
        )))
    }
}

/// Next cumulative total after `total` for rank `alpha`, saturating at
/// `usize::MAX`.
#[inline]
pub fn next_total(alpha: f64, total: usize) -> usize {
    let scaled = (alpha * total as f64).ceil();
    let scaled = if scaled >= usize::MAX as f64 { usize::MAX } else { scaled as usize };
    scaled.max(total.saturating_add(1))
}

/// Layer sizes for an LOH of `capacity` values.
///
/// The schedule is exact up to `capacity`; the final layer may be truncated
/// and is then smaller than its nominal size.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSchedule {
    alpha: f64,
    /// Cumulative totals; `totals[i]` counts the values in layers `0..=i`.
    totals: Vec<usize>,
}

impl LayerSchedule {
    pub fn new(alpha: f64, capacity: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if capacity == 0 {
            return Err(Error::ContractViolation("layer schedule needs n >= 1".into()));
        }
        let mut totals = vec![1];
        let mut t = 1;
        while t < capacity {
            t = next_total(alpha, t).min(capacity);
            totals.push(t);
        }
        Ok(LayerSchedule { alpha, totals })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn capacity(&self) -> usize {
        *self.totals.last().expect("schedule is never empty")
    }

    pub fn layer_count(&self) -> usize {
        self.totals.len()
    }

    pub fn totals(&self) -> &[usize] {
        &self.totals
    }

    /// Values in layers `0..=layer`.
    pub fn total_through(&self, layer: usize) -> usize {
        self.totals[layer]
    }

    /// Index of the first value of `layer` in a flat layout.
    pub fn layer_start(&self, layer: usize) -> usize {
        if layer == 0 {
            0
        } else {
            self.totals[layer - 1]
        }
    }

    /// Actual size of `layer`, truncation included.
    pub fn layer_size(&self, layer: usize) -> usize {
        self.totals[layer] - self.layer_start(layer)
    }

    /// Size `layer` would have without truncation at capacity.
    pub fn nominal_size(&self, layer: usize) -> usize {
        if layer == 0 {
            1
        } else {
            let prev = self.totals[layer - 1];
            next_total(self.alpha, prev) - prev
        }
    }

    /// Whether `layer` is the truncated final layer.
    pub fn is_truncated(&self, layer: usize) -> bool {
        self.layer_size(layer) < self.nominal_size(layer)
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.layer_count()).map(|i| self.layer_size(i)).collect()
    }

    /// Offsets in layer `layer + 1` of the children of `(layer, offset)`.
    ///
    /// Offsets are computed against the nominal size of layer `layer + 1`;
    /// when that layer is the truncated final layer, callers must drop
    /// offsets at or beyond its actual size.
    pub fn children_of(&self, layer: usize, offset: usize) -> Result<Children> {
        if layer + 1 >= self.layer_count() {
            return Err(Error::ContractViolation(format!(
                "layer {layer} has no successor in a schedule of {} layers",
                self.layer_count()
            )));
        }
        let size = self.layer_size(layer);
        if offset >= size {
            return Err(Error::ContractViolation(format!(
                "offset {offset} out of range for layer {layer} of size {size}"
            )));
        }
        Ok(child_offsets(size, self.nominal_size(layer + 1), offset))
    }
}

/// `layer_schedule(alpha, n)`: the schedule of an `n`-value LOH of rank `alpha`.
pub fn layer_schedule(alpha: f64, n: usize) -> Result<LayerSchedule> {
    LayerSchedule::new(alpha, n)
}

/// Up to two child offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Children {
    first: usize,
    second: Option<usize>,
}

impl Children {
    pub fn len(&self) -> usize {
        1 + self.second.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.first).chain(self.second)
    }
}

impl IntoIterator for Children {
    type Item = usize;
    type IntoIter = std::iter::Chain<std::iter::Once<usize>, std::option::IntoIter<usize>>;

    fn into_iter(self) -> Self::IntoIter {
        std::iter::once(self.first).chain(self.second)
    }
}

/// Child offsets of position `offset` in a layer of `size` values whose
/// successor layer holds `next_size` values (`size <= next_size <= 2 * size`).
///
/// `2 * size - next_size` positions have one child and the rest have two;
/// the two-child positions come first and map to `{2j, 2j + 1}`, the
/// one-child positions map to `j + (next_size - size)`.
#[inline]
pub fn child_offsets(size: usize, next_size: usize, offset: usize) -> Children {
    debug_assert!(size <= next_size && next_size <= 2 * size);
    debug_assert!(offset < size);
    let two_child = next_size - size;
    if offset < two_child {
        Children { first: 2 * offset, second: Some(2 * offset + 1) }
    } else {
        Children { first: offset + two_child, second: None }
    }
}

/// Parent offset in layer `i` of offset `child` in layer `i + 1`; inverse of
/// [`child_offsets`].
#[inline]
pub fn parent_offset(size: usize, next_size: usize, child: usize) -> usize {
    let two_child = next_size - size;
    if child < 2 * two_child {
        child / 2
    } else {
        child - two_child
    }
}

/// A fully materialized layer-ordered heap.
///
/// Values live in one buffer; a layer is a contiguous block of it.
#[derive(Clone, Debug)]
pub struct LayerOrderedHeap {
    values: Vec<ScoreKey>,
    /// Exclusive end of each layer in `values`.
    ends: Vec<usize>,
    schedule: Option<LayerSchedule>,
}

impl LayerOrderedHeap {
    /// Permutes `values` into an LOH of rank `alpha`.
    ///
    /// Pivot ranks are resolved median-first, so each level of the
    /// recursion costs linear time and there are `O(log #layers)` levels.
    pub fn lohify(mut values: Vec<ScoreKey>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if values.is_empty() {
            return Err(Error::ContractViolation("cannot layer-order an empty array".into()));
        }
        let schedule = LayerSchedule::new(alpha, values.len())?;
        let pivots = &schedule.totals()[..schedule.layer_count() - 1];
        partition_at_all(&mut values, pivots, 0);
        Ok(LayerOrderedHeap { ends: schedule.totals().to_vec(), values, schedule: Some(schedule) })
    }

    /// Builds a heap from explicit layers without checking them; pair with
    /// [`verify_loh`]. Such a heap carries no schedule.
    pub fn from_layers(layers: Vec<Vec<ScoreKey>>) -> Self {
        let mut values = Vec::new();
        let mut ends = Vec::with_capacity(layers.len());
        for layer in layers {
            values.extend(layer);
            ends.push(values.len());
        }
        LayerOrderedHeap { values, ends, schedule: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn layer_count(&self) -> usize {
        self.ends.len()
    }

    pub fn layer(&self, i: usize) -> &[ScoreKey] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.values[start..self.ends[i]]
    }

    pub fn layers(&self) -> impl Iterator<Item = &[ScoreKey]> + '_ {
        (0..self.layer_count()).map(move |i| self.layer(i))
    }

    pub fn schedule(&self) -> Option<&LayerSchedule> {
        self.schedule.as_ref()
    }

    pub fn values(&self) -> &[ScoreKey] {
        &self.values
    }

    pub fn into_values(self) -> Vec<ScoreKey> {
        self.values
    }
}

/// `pivots` are ascending absolute ranks; `base` is the absolute rank of `v[0]`.
fn partition_at_all(v: &mut [ScoreKey], pivots: &[usize], base: usize) {
    if pivots.is_empty() {
        return;
    }
    let mid = pivots.len() / 2;
    let split = pivots[mid] - base;
    partition_at(v, split);
    let (left, right) = v.split_at_mut(split);
    partition_at_all(left, &pivots[..mid], base);
    partition_at_all(right, &pivots[mid + 1..], base + split);
}

/// `lohify(values, alpha)`.
pub fn lohify(values: Vec<ScoreKey>, alpha: f64) -> Result<LayerOrderedHeap> {
    LayerOrderedHeap::lohify(values, alpha)
}

/// True iff consecutive layers are ordered and, when the heap carries a
/// schedule, layer sizes match it.
pub fn verify_loh(heap: &LayerOrderedHeap) -> bool {
    if let Some(schedule) = heap.schedule() {
        if schedule.totals() != heap.ends.as_slice() {
            return false;
        }
    }
    let mut prev_max: Option<ScoreKey> = None;
    for layer in heap.layers() {
        let (Some(&lo), Some(&hi)) = (layer.iter().min(), layer.iter().max()) else {
            return false;
        };
        if prev_max.is_some_and(|m| m > lo) {
            return false;
        }
        prev_max = Some(hi);
    }
    true
}

/// A source of LOH layers generated smallest-first, one whole layer at a time.
///
/// Generated layers are immutable; `max_generated` is nondecreasing.
pub trait LohGenerator {
    /// Rank of the layer schedule this generator follows.
    fn alpha(&self) -> f64;

    /// Total number of values this generator can ever produce (saturating).
    fn capacity(&self) -> usize;

    fn has_more_layers(&self) -> bool;

    /// Produces the next layer. Does nothing once exhausted.
    fn generate_next_layer(&mut self);

    fn layer_count(&self) -> usize;

    fn layer(&self, i: usize) -> &[ScoreKey];

    /// Largest value over all generated layers, `None` before the first.
    fn max_generated(&self) -> Option<ScoreKey>;

    /// Smallest value overall; available once the first layer exists.
    fn min_value(&self) -> Option<ScoreKey> {
        if self.layer_count() == 0 {
            None
        } else {
            self.layer(0).iter().copied().min()
        }
    }

    fn size_of_last_layer(&self) -> usize {
        match self.layer_count() {
            0 => 0,
            n => self.layer(n - 1).len(),
        }
    }

    fn total_generated(&self) -> usize;

    /// Number of values this node handed to its parent so far. Leaves
    /// reveal whole layers, so this equals `total_generated`.
    fn values_requested(&self) -> usize {
        self.total_generated()
    }

    /// Child generators, for tree instrumentation.
    fn children(&self) -> Vec<&dyn LohGenerator> {
        Vec::new()
    }

    /// Soft-heap pops, insertions and corruptions performed by this node.
    fn heap_counters(&self) -> HeapCounters {
        HeapCounters::default()
    }
}

/// Per-node soft-heap work counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HeapCounters {
    pub pops: u64,
    pub inserts: u64,
    pub corrupted: u64,
    pub peak_live: usize,
}

/// Leaf generator: an array layer-ordered once, revealed a layer at a time.
#[derive(Clone, Debug)]
pub struct LeafGenerator {
    heap: LayerOrderedHeap,
    alpha: f64,
    revealed: usize,
    max_revealed: Option<ScoreKey>,
}

impl LeafGenerator {
    pub fn new(values: Vec<ScoreKey>, alpha: f64) -> Result<Self> {
        let heap = LayerOrderedHeap::lohify(values, alpha)?;
        Ok(LeafGenerator { heap, alpha, revealed: 0, max_revealed: None })
    }

    /// Reveals the layers of an existing heap as they are.
    pub fn from_heap(heap: LayerOrderedHeap, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(LeafGenerator { heap, alpha, revealed: 0, max_revealed: None })
    }

    pub fn heap(&self) -> &LayerOrderedHeap {
        &self.heap
    }
}

impl LohGenerator for LeafGenerator {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn capacity(&self) -> usize {
        self.heap.len()
    }

    fn has_more_layers(&self) -> bool {
        self.revealed < self.heap.layer_count()
    }

    fn generate_next_layer(&mut self) {
        if !self.has_more_layers() {
            return;
        }
        let layer_max = self.heap.layer(self.revealed).iter().copied().max();
        self.max_revealed = self.max_revealed.max(layer_max);
        self.revealed += 1;
    }

    fn layer_count(&self) -> usize {
        self.revealed
    }

    fn layer(&self, i: usize) -> &[ScoreKey] {
        assert!(i < self.revealed, "layer {i} not generated yet");
        self.heap.layer(i)
    }

    fn max_generated(&self) -> Option<ScoreKey> {
        self.max_revealed
    }

    fn total_generated(&self) -> usize {
        match self.revealed {
            0 => 0,
            n => self.heap.ends[n - 1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::keys;
    use proptest::prelude::*;

    /// Hand evaluation of the cumulative-total recurrence.
    fn totals_by_hand(alpha: f64, n: usize) -> Vec<usize> {
        let mut out = vec![1usize];
        while *out.last().unwrap() < n {
            let t = *out.last().unwrap();
            let next = (t + 1).max((alpha * t as f64).ceil() as usize);
            out.push(next.min(n));
        }
        out
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(layer_schedule(1.9, 8).unwrap().sizes(), vec![1, 1, 2, 4]);
        assert_eq!(layer_schedule(1.1, 5).unwrap().sizes(), vec![1, 1, 1, 1, 1]);
        for alpha in [1.05, 1.5, 1.99] {
            assert_eq!(layer_schedule(alpha, 1).unwrap().sizes(), vec![1]);
        }
        for alpha in [1.05, 1.3, 1.9] {
            for n in [1, 2, 3, 17, 1000] {
                assert_eq!(layer_schedule(alpha, n).unwrap().totals(), totals_by_hand(alpha, n));
            }
        }
    }

    #[test]
    fn schedule_rejects_bad_alpha() {
        for alpha in [1.0, 2.0, 0.3, 2.5] {
            assert!(matches!(layer_schedule(alpha, 10), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn first_two_layers_are_singletons() {
        for alpha in [1.01, 1.5, 1.99] {
            let s = layer_schedule(alpha, 100).unwrap();
            assert_eq!(&s.totals()[..2], &[1, 2]);
        }
    }

    #[test]
    fn child_offset_examples() {
        // size 2 -> 3: one two-child position, one one-child position.
        assert_eq!(child_offsets(2, 3, 0).iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(child_offsets(2, 3, 1).iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(child_offsets(1, 1, 0).iter().collect::<Vec<_>>(), vec![0]);
        let mut seen: Vec<usize> = (0..4).flat_map(|j| child_offsets(4, 8, j)).collect();
        assert!((0..4).all(|j| child_offsets(4, 8, j).len() == 2));
        seen.sort();
        assert_eq!(seen, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn children_of_bounds() {
        let s = layer_schedule(1.5, 10).unwrap();
        assert!(s.children_of(s.layer_count() - 1, 0).is_err());
        assert!(s.children_of(0, 1).is_err());
        assert_eq!(s.children_of(0, 0).unwrap().iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn lohify_example() {
        let heap = lohify(keys(&[5.0, 3.0, 7.0, 1.0, 6.0, 2.0, 4.0]).unwrap(), 1.9).unwrap();
        let layers: Vec<Vec<f64>> = heap
            .layers()
            .map(|l| {
                let mut v: Vec<f64> = l.iter().map(|x| x.value()).collect();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        assert_eq!(layers, vec![vec![1.0], vec![2.0], vec![3.0, 4.0], vec![5.0, 6.0, 7.0]]);
        assert!(verify_loh(&heap));
    }

    #[test]
    fn lohify_constant_and_sorted_inputs() {
        let heap = lohify(keys(&[4.0; 3]).unwrap(), 1.5).unwrap();
        assert!(verify_loh(&heap));
        let sorted: Vec<ScoreKey> = (0..10_000).map(|i| ScoreKey::new(i as f64).unwrap()).collect();
        assert!(verify_loh(&lohify(sorted, 1.2).unwrap()));
    }

    #[test]
    fn lohify_rejects_empty() {
        assert!(matches!(lohify(Vec::new(), 1.5), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn verify_examples() {
        let bad = LayerOrderedHeap::from_layers(vec![keys(&[2.0]).unwrap(), keys(&[1.0, 3.0]).unwrap()]);
        assert!(!verify_loh(&bad));
        let tie = LayerOrderedHeap::from_layers(vec![keys(&[1.0]).unwrap(), keys(&[1.0, 1.0]).unwrap()]);
        assert!(verify_loh(&tie));
    }

    #[test]
    fn leaf_generator_reveals_layers_in_order() {
        let values = keys(&[9.0, 1.0, 8.0, 2.0, 7.0, 3.0, 6.0, 4.0, 5.0]).unwrap();
        let mut g = LeafGenerator::new(values, 1.5).unwrap();
        assert_eq!(g.layer_count(), 0);
        assert_eq!(g.max_generated(), None);
        let mut last_max = ScoreKey::new(f64::MIN).unwrap();
        while g.has_more_layers() {
            g.generate_next_layer();
            let m = g.max_generated().unwrap();
            assert!(m >= last_max);
            last_max = m;
        }
        assert_eq!(g.total_generated(), 9);
        assert_eq!(last_max.value(), 9.0);
        g.generate_next_layer();
        assert_eq!(g.total_generated(), 9);
    }

    proptest! {
        #[test]
        fn parent_inverts_children(size in 1usize..200, extra in 0.0f64..=1.0) {
            let next = size + (size as f64 * extra) as usize;
            let mut covered = vec![false; next];
            for j in 0..size {
                for c in child_offsets(size, next, j) {
                    prop_assert!(!covered[c]);
                    covered[c] = true;
                    prop_assert_eq!(parent_offset(size, next, c), j);
                }
            }
            prop_assert!(covered.into_iter().all(|c| c));
        }

        #[test]
        fn lohify_is_a_valid_permutation(values in prop::collection::vec(-100i32..100, 1..2000), alpha in 1.01f64..1.99) {
            let v: Vec<ScoreKey> = values.iter().map(|&x| ScoreKey::new(x as f64).unwrap()).collect();
            let heap = lohify(v.clone(), alpha).unwrap();
            prop_assert!(verify_loh(&heap));
            let mut a = heap.into_values();
            let mut b = v;
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn layer_prefixes_are_selections(values in prop::collection::vec(-20i32..20, 1..500), alpha in 1.01f64..1.99) {
            let v: Vec<ScoreKey> = values.iter().map(|&x| ScoreKey::new(x as f64).unwrap()).collect();
            let heap = lohify(v.clone(), alpha).unwrap();
            let schedule = heap.schedule().unwrap().clone();
            for layer in 0..heap.layer_count() {
                let t = schedule.total_through(layer);
                let prefix: crate::score::Multiset = heap.values()[..t].to_vec().into();
                prop_assert_eq!(prefix, crate::select::select_k(&v, t).unwrap());
            }
        }
    }
}
