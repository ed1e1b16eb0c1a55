//! Two-array building blocks.
//!
//! * [`soft_select_pairwise`]: k-selection on `A + B` with a soft heap over a
//!   duplicate-free proposal scheme on binary-heap-ordered inputs.
//! * [`concatenation_select`]: drives two layer generators just far enough
//!   that a selection on their concatenation `A | B` is fully generated.
//! * [`AbNode`]: a layer generator for `A + B` built on two child generators;
//!   stacking these gives the fast soft tree.

use std::mem;

use crate::error::{Error, Result};
use crate::loh::{HeapCounters, LayerSchedule, LohGenerator};
use crate::score::{Multiset, ScoreKey};
use crate::select::{partition_at, retain_smallest};
use crate::soft_heap::SoftHeap;

/// Corruption rate used by the pairwise selections.
pub const PAIRWISE_EPSILON: f64 = 0.25;

/// A 0-based index pair into `(A, B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairIndex {
    pub i: usize,
    pub j: usize,
}

/// Rearranges `v` into a binary min-heap, children of `i` at `2i+1, 2i+2`.
pub fn heapify(v: &mut [ScoreKey]) {
    for start in (0..v.len() / 2).rev() {
        let mut i = start;
        loop {
            let l = 2 * i + 1;
            if l >= v.len() {
                break;
            }
            let c = if l + 1 < v.len() && v[l + 1] < v[l] { l + 1 } else { l };
            if v[c] >= v[i] {
                break;
            }
            v.swap(c, i);
            i = c;
        }
    }
}

/// Output of one pairwise soft selection with its heap counters.
#[derive(Clone, Debug)]
pub struct PairwiseRun {
    pub values: Vec<ScoreKey>,
    pub counters: HeapCounters,
}

/// The `k` smallest values of `A + B` using [`PAIRWISE_EPSILON`].
pub fn soft_select_pairwise(a: &[ScoreKey], b: &[ScoreKey], k: usize) -> Result<Multiset> {
    soft_select_pairwise_with(a, b, k, PAIRWISE_EPSILON).map(|run| Multiset::new(run.values))
}

/// [`soft_select_pairwise`] with an explicit corruption rate.
///
/// Both inputs are heap-ordered. From `(i, j)` the proposals are
/// `(2i+1, 0), (2i+2, 0), (i, 1), (i, 2)` when `j = 0` and
/// `(i, 2j+1), (i, 2j+2)` otherwise, which reaches every pair exactly once
/// and never proposes a pair smaller than its proposer. A pair is processed
/// (its value kept, its children proposed) when it is popped uncorrupted or
/// reported as corrupted. After `k` uncorrupted pops the kept values contain
/// the answer.
pub fn soft_select_pairwise_with(a: &[ScoreKey], b: &[ScoreKey], k: usize, epsilon: f64) -> Result<PairwiseRun> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::ContractViolation("pairwise selection needs nonempty inputs".into()));
    }
    let cells = a.len().saturating_mul(b.len());
    if k == 0 || k > cells {
        return Err(Error::ContractViolation(format!("k must satisfy 1 <= k <= {cells}, got {k}")));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    heapify(&mut a);
    heapify(&mut b);

    let mut heap: SoftHeap<PairIndex> = SoftHeap::new(epsilon)?;
    let mut kept = Vec::with_capacity(2 * k);
    let mut pops = 0u64;
    let mut peak_live = 0;

    let propose = |heap: &mut SoftHeap<PairIndex>, i: usize, j: usize| {
        if i < a.len() && j < b.len() {
            heap.insert(a[i] + b[j], PairIndex { i, j });
        }
    };
    let process = |heap: &mut SoftHeap<PairIndex>, kept: &mut Vec<ScoreKey>, p: PairIndex| {
        kept.push(a[p.i] + b[p.j]);
        if p.j == 0 {
            propose(heap, 2 * p.i + 1, 0);
            propose(heap, 2 * p.i + 2, 0);
            propose(heap, p.i, 1);
            propose(heap, p.i, 2);
        } else {
            propose(heap, p.i, 2 * p.j + 1);
            propose(heap, p.i, 2 * p.j + 2);
        }
    };

    propose(&mut heap, 0, 0);
    let mut counted = 0;
    while counted < k && !heap.is_empty() {
        peak_live = peak_live.max(heap.len());
        let (entry, newly) = heap.extract_min()?;
        pops += 1;
        for c in newly {
            process(&mut heap, &mut kept, c.payload);
        }
        if !entry.corrupted {
            process(&mut heap, &mut kept, entry.payload);
            counted += 1;
        }
    }
    retain_smallest(&mut kept, k);
    Ok(PairwiseRun {
        values: kept,
        counters: HeapCounters {
            pops,
            inserts: heap.inserts(),
            corrupted: heap.corrupted_total(),
            peak_live,
        },
    })
}

/// Generates layers of `a` and `b` until the `k` smallest values of their
/// concatenation are all generated. Returns the layer counts reached.
///
/// Layers are added to whichever side has the smaller generated maximum
/// until `k` values exist. If the maxima then differ, the smaller side gets
/// more layers until it has added as many values as the other side's last
/// layer holds, or until its maximum reaches the other's. Exhausted
/// generators simply stop contributing.
pub fn concatenation_select(a: &mut dyn LohGenerator, b: &mut dyn LohGenerator, k: usize) -> (usize, usize) {
    concatenation_select_impl(a, b, k, false)
}

/// With `relative`, each side is compared after subtracting its own
/// minimum, i.e. the selection runs on `(A - min A) | (B - min B)`.
fn concatenation_select_impl(a: &mut dyn LohGenerator, b: &mut dyn LohGenerator, k: usize, relative: bool) -> (usize, usize) {
    if a.layer_count() == 0 {
        a.generate_next_layer();
    }
    if b.layer_count() == 0 {
        b.generate_next_layer();
    }
    let (shift_a, shift_b) = shifts(a, b, relative);
    let top = |g: &dyn LohGenerator, shift: ScoreKey| g.max_generated().map(|m| m - shift);

    while a.total_generated().saturating_add(b.total_generated()) < k {
        match (a.has_more_layers(), b.has_more_layers()) {
            (false, false) => break,
            (true, false) => a.generate_next_layer(),
            (false, true) => b.generate_next_layer(),
            (true, true) => {
                if top(a, shift_a) <= top(b, shift_b) {
                    a.generate_next_layer();
                } else {
                    b.generate_next_layer();
                }
            }
        }
    }

    let (max_a, max_b) = (top(a, shift_a), top(b, shift_b));
    if max_a < max_b {
        catch_up(a, shift_a, b, shift_b);
    } else if max_b < max_a {
        catch_up(b, shift_b, a, shift_a);
    }
    (a.layer_count(), b.layer_count())
}

/// Grows `small` until it has added as many values as the last layer of
/// `large`, or its maximum has caught up with that of `large`.
fn catch_up(small: &mut dyn LohGenerator, shift_small: ScoreKey, large: &dyn LohGenerator, shift_large: ScoreKey) {
    let target = large.size_of_last_layer();
    let large_max = large.max_generated().map(|m| m - shift_large);
    let mut added = 0;
    while added < target && small.has_more_layers() {
        small.generate_next_layer();
        added += small.size_of_last_layer();
        if small.max_generated().map(|m| m - shift_small) >= large_max {
            break;
        }
    }
}

fn shifts(a: &dyn LohGenerator, b: &dyn LohGenerator, relative: bool) -> (ScoreKey, ScoreKey) {
    if relative {
        (a.min_value().unwrap_or_default(), b.min_value().unwrap_or_default())
    } else {
        (ScoreKey::ZERO, ScoreKey::ZERO)
    }
}

/// Whether the generated layers of `a` and `b` hold the `k` smallest
/// values of `A | B` (shifted by each side's minimum when `relative`).
///
/// Holds when every side that can still grow has at least `k` generated
/// values at or below its generated maximum, since anything it generates
/// later is no smaller than that maximum.
pub fn selection_is_covered(a: &dyn LohGenerator, b: &dyn LohGenerator, k: usize, relative: bool) -> bool {
    let (shift_a, shift_b) = shifts(a, b, relative);
    if a.total_generated().saturating_add(b.total_generated()) < k {
        return !a.has_more_layers() && !b.has_more_layers();
    }
    let side_ok = |x: &dyn LohGenerator, sx: ScoreKey, y: &dyn LohGenerator, sy: ScoreKey| {
        if !x.has_more_layers() {
            return true;
        }
        let Some(bound) = x.max_generated().map(|m| m - sx) else {
            return false;
        };
        let below = (0..y.layer_count())
            .flat_map(|i| y.layer(i).iter())
            .filter(|&&v| v - sy <= bound)
            .count();
        x.total_generated() + below >= k
    };
    side_ok(a, shift_a, b, shift_b) && side_ok(b, shift_b, a, shift_a)
}

/// Position of a value inside a layer-ordered heap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LayerPos {
    pub layer: usize,
    pub offset: usize,
}

const TOP: LayerPos = LayerPos { layer: 0, offset: 0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Where {
    Heap,
    Parked,
    Processed,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    a: LayerPos,
    b: LayerPos,
    at: Where,
}

/// Where every proposal made by an [`AbNode`] currently is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CandidateAccounting {
    pub proposed: u64,
    pub in_heap: u64,
    pub parked: u64,
    pub processed: u64,
    /// Proposals past the end of a child's final, truncated layer.
    pub dropped: u64,
}

/// Layer generator for `A + B` over two child generators.
///
/// Each new output layer of cumulative size `t` is produced by
///
/// 1. a concatenation selection of size `t + 1` on the children, with each
///    side shifted by its minimum; this generates every child value that can
///    appear in the `t` smallest sums,
/// 2. releasing parked proposals whose blocking child has since grown,
/// 3. a soft selection over pair positions, where children of a position
///    are its children in the child heap's layer structure and proposals
///    into ungenerated child layers are parked in one of three purgatory
///    lists (blocked on `A`, on `B`, or on both),
/// 4. a selection of the layer's size over this round's values plus those
///    left over from earlier rounds, the remainder carried over, and
/// 5. rebuilding the soft heap from its uncorrupted entries so corruption
///    does not accumulate across layers.
pub struct AbNode {
    left: Box<dyn LohGenerator>,
    right: Box<dyn LohGenerator>,
    left_schedule: LayerSchedule,
    right_schedule: LayerSchedule,
    schedule: LayerSchedule,
    values: Vec<ScoreKey>,
    ends: Vec<usize>,
    max_generated: Option<ScoreKey>,
    heap: SoftHeap<u32>,
    candidates: Vec<Candidate>,
    purgatory_a: Vec<u32>,
    purgatory_b: Vec<u32>,
    purgatory_ab: Vec<u32>,
    /// Child layer counts at the last purgatory flush.
    flushed: (usize, usize),
    carryover: Vec<ScoreKey>,
    round: Vec<ScoreKey>,
    dropped: u64,
    pops: u64,
    inserts: u64,
    peak_live: usize,
    #[cfg(debug_assertions)]
    seen: std::collections::HashSet<(LayerPos, LayerPos)>,
}

impl AbNode {
    pub fn new(left: Box<dyn LohGenerator>, right: Box<dyn LohGenerator>, alpha: f64) -> Result<Self> {
        let capacity = left.capacity().saturating_mul(right.capacity());
        Ok(AbNode {
            left_schedule: LayerSchedule::new(left.alpha(), left.capacity())?,
            right_schedule: LayerSchedule::new(right.alpha(), right.capacity())?,
            schedule: LayerSchedule::new(alpha, capacity)?,
            left,
            right,
            values: Vec::new(),
            ends: Vec::new(),
            max_generated: None,
            heap: SoftHeap::new(PAIRWISE_EPSILON)?,
            candidates: Vec::new(),
            purgatory_a: Vec::new(),
            purgatory_b: Vec::new(),
            purgatory_ab: Vec::new(),
            flushed: (0, 0),
            carryover: Vec::new(),
            round: Vec::new(),
            dropped: 0,
            pops: 0,
            inserts: 0,
            peak_live: 0,
            #[cfg(debug_assertions)]
            seen: Default::default(),
        })
    }

    pub fn left(&self) -> &dyn LohGenerator {
        &*self.left
    }

    pub fn right(&self) -> &dyn LohGenerator {
        &*self.right
    }

    pub fn schedule(&self) -> &LayerSchedule {
        &self.schedule
    }

    /// Values generated but not emitted yet.
    pub fn carryover(&self) -> &[ScoreKey] {
        &self.carryover
    }

    pub fn purgatory_sizes(&self) -> (usize, usize, usize) {
        (self.purgatory_a.len(), self.purgatory_b.len(), self.purgatory_ab.len())
    }

    pub fn accounting(&self) -> CandidateAccounting {
        let mut acc = CandidateAccounting {
            proposed: self.candidates.len() as u64 + self.dropped,
            dropped: self.dropped,
            ..Default::default()
        };
        for c in &self.candidates {
            match c.at {
                Where::Heap => acc.in_heap += 1,
                Where::Parked => acc.parked += 1,
                Where::Processed => acc.processed += 1,
            }
        }
        acc
    }

    fn value_of(&self, a: LayerPos, b: LayerPos) -> ScoreKey {
        self.left.layer(a.layer)[a.offset] + self.right.layer(b.layer)[b.offset]
    }

    /// Places candidate `id` in the heap or the purgatory list it is blocked on.
    fn place(&mut self, id: u32) {
        let Candidate { a, b, .. } = self.candidates[id as usize];
        let a_ready = a.layer < self.left.layer_count();
        let b_ready = b.layer < self.right.layer_count();
        let at = match (a_ready, b_ready) {
            (true, true) => {
                let key = self.value_of(a, b);
                self.heap.insert(key, id);
                self.inserts += 1;
                Where::Heap
            }
            (false, true) => {
                self.purgatory_a.push(id);
                Where::Parked
            }
            (true, false) => {
                self.purgatory_b.push(id);
                Where::Parked
            }
            (false, false) => {
                self.purgatory_ab.push(id);
                Where::Parked
            }
        };
        self.candidates[id as usize].at = at;
    }

    fn propose(&mut self, a: LayerPos, b: LayerPos) {
        #[cfg(debug_assertions)]
        assert!(self.seen.insert((a, b)), "pair {a:?} {b:?} proposed twice");
        let id = u32::try_from(self.candidates.len()).expect("candidate arena exceeds u32");
        self.candidates.push(Candidate { a, b, at: Where::Parked });
        self.place(id);
    }

    fn flush_purgatories(&mut self) {
        let now = (self.left.layer_count(), self.right.layer_count());
        let a_grew = now.0 > self.flushed.0;
        let b_grew = now.1 > self.flushed.1;
        if a_grew {
            for id in mem::take(&mut self.purgatory_a) {
                self.place(id);
            }
        }
        if b_grew {
            for id in mem::take(&mut self.purgatory_b) {
                self.place(id);
            }
        }
        if a_grew || b_grew {
            // Entries unblocked on one side only move to the other side's list.
            for id in mem::take(&mut self.purgatory_ab) {
                self.place(id);
            }
        }
        self.flushed = now;
    }

    /// Child positions of `pos` that exist in the child heap.
    fn child_positions(schedule: &LayerSchedule, pos: LayerPos, dropped: &mut u64) -> Vec<LayerPos> {
        let next = pos.layer + 1;
        if next >= schedule.layer_count() {
            return Vec::new();
        }
        let size = schedule.layer_size(next);
        let mut out = Vec::with_capacity(2);
        for offset in schedule.children_of(pos.layer, pos.offset).expect("position inside schedule") {
            if offset < size {
                out.push(LayerPos { layer: next, offset });
            } else {
                *dropped += 1;
            }
        }
        out
    }

    /// Keeps the candidate's value and proposes its children. Pairs with
    /// `b` at the top of `B` advance along `A` and step once into `B`; all
    /// other pairs advance along `B` only, so each pair has one proposer.
    fn process(&mut self, id: u32) {
        let Candidate { a, b, at } = self.candidates[id as usize];
        debug_assert_ne!(at, Where::Processed);
        self.candidates[id as usize].at = Where::Processed;
        self.round.push(self.value_of(a, b));
        if b == TOP {
            for ca in Self::child_positions(&self.left_schedule, a, &mut self.dropped) {
                self.propose(ca, b);
            }
        }
        for cb in Self::child_positions(&self.right_schedule, b, &mut self.dropped) {
            self.propose(a, cb);
        }
    }

    fn soft_select(&mut self, count: usize) {
        let mut counted = 0;
        while counted < count && !self.heap.is_empty() {
            self.peak_live = self.peak_live.max(self.heap.len());
            let (entry, newly) = self.heap.extract_min().expect("heap is nonempty");
            self.pops += 1;
            for c in newly {
                self.process(c.payload);
            }
            if !entry.corrupted {
                self.process(entry.payload);
                counted += 1;
            }
        }
        // Corruption caused by the last insertions must still be processed
        // before the heap is rebuilt.
        loop {
            let newly = self.heap.take_newly_corrupted();
            if newly.is_empty() {
                break;
            }
            for c in newly {
                self.process(c.payload);
            }
        }
    }

    fn rebuild_heap(&mut self) {
        for entry in self.heap.drain() {
            if self.candidates[entry.payload as usize].at == Where::Heap {
                self.heap.insert(entry.original_key, entry.payload);
            }
        }
    }
}

impl LohGenerator for AbNode {
    fn alpha(&self) -> f64 {
        self.schedule.alpha()
    }

    fn capacity(&self) -> usize {
        self.schedule.capacity()
    }

    fn has_more_layers(&self) -> bool {
        self.ends.len() < self.schedule.layer_count()
    }

    fn generate_next_layer(&mut self) {
        if !self.has_more_layers() {
            return;
        }
        let layer = self.ends.len();
        let through = self.schedule.total_through(layer);
        let size = self.schedule.layer_size(layer);

        let k = through.saturating_add(1);
        concatenation_select_impl(&mut *self.left, &mut *self.right, k, true);
        debug_assert!(selection_is_covered(&*self.left, &*self.right, k, true));

        if layer == 0 {
            self.propose(TOP, TOP);
        }
        self.flush_purgatories();
        self.soft_select(size);

        let mut pool = mem::take(&mut self.carryover);
        pool.append(&mut self.round);
        debug_assert!(pool.len() >= size, "pool of {} cannot fill a layer of {size}", pool.len());
        let size = size.min(pool.len());
        partition_at(&mut pool, size);
        self.carryover = pool.split_off(size);
        self.max_generated = self.max_generated.max(pool.iter().copied().max());
        self.values.extend_from_slice(&pool);
        self.ends.push(self.values.len());

        self.rebuild_heap();
    }

    fn layer_count(&self) -> usize {
        self.ends.len()
    }

    fn layer(&self, i: usize) -> &[ScoreKey] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.values[start..self.ends[i]]
    }

    fn max_generated(&self) -> Option<ScoreKey> {
        self.max_generated
    }

    fn total_generated(&self) -> usize {
        self.values.len()
    }

    fn children(&self) -> Vec<&dyn LohGenerator> {
        vec![&*self.left, &*self.right]
    }

    fn heap_counters(&self) -> HeapCounters {
        HeapCounters {
            pops: self.pops,
            inserts: self.inserts,
            corrupted: self.heap.corrupted_total(),
            peak_live: self.peak_live,
        }
    }
}
