//! Soft heap in the style of Kaplan, Tarjan and Zwick.
//!
//! The heap is a list of binary trees of distinct ranks, combined like a
//! binary counter on insertion. Every node owns a list of items sharing one
//! current key. Nodes of rank above a threshold `r` want `ceil(3/2 * s)`
//! items where `s` is the target of their children; when a node's list runs
//! short it absorbs whole child lists, raising the keys of everything it
//! absorbs. Raised items are *corrupted*.
//!
//! With `r = ceil(log2(27 / epsilon))` at most `epsilon * I` items in the
//! heap are corrupted at any time, where `I` counts insertions since the
//! heap was created or last drained. Insert is amortized `O(1)`; extract-min
//! is `O(log 1/epsilon)` amortized plus a scan of the root list.
//!
//! Items are never lowered. An item is reported as newly corrupted exactly
//! once, by the next [`SoftHeap::extract_min`] (or
//! [`SoftHeap::take_newly_corrupted`]), and stays in the heap afterwards.

use crate::error::{Error, Result};
use crate::score::ScoreKey;

const NIL: u32 = u32::MAX;

/// An entry as seen by the caller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SoftHeapEntry<P> {
    pub original_key: ScoreKey,
    pub current_key: ScoreKey,
    pub payload: P,
    pub corrupted: bool,
}

#[derive(Clone, Copy, Debug)]
struct Item<P> {
    key: ScoreKey,
    payload: P,
    next: u32,
}

/// Intrusive singly linked list over the item arena.
#[derive(Clone, Copy, Debug)]
struct ItemList {
    head: u32,
    tail: u32,
    len: usize,
}

impl ItemList {
    const EMPTY: ItemList = ItemList { head: NIL, tail: NIL, len: 0 };

    fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[derive(Clone, Debug)]
struct Node {
    key: ScoreKey,
    rank: u32,
    target: usize,
    /// Items whose original key equals `key`.
    clean: ItemList,
    /// Items whose original key is below `key`.
    dirty: ItemList,
    left: u32,
    right: u32,
}

impl Node {
    fn set_len(&self) -> usize {
        self.clean.len + self.dirty.len
    }

    fn is_leaf(&self) -> bool {
        self.left == NIL && self.right == NIL
    }
}

/// A corruption-tolerant priority queue.
///
/// `P` is an opaque, copyable payload handle.
#[derive(Clone, Debug)]
pub struct SoftHeap<P> {
    epsilon: f64,
    threshold_rank: u32,
    items: Vec<Item<P>>,
    nodes: Vec<Node>,
    free_nodes: Vec<u32>,
    /// Roots by strictly decreasing rank.
    roots: Vec<u32>,
    /// `prefix_min[i]` is the root of least key among `roots[..=i]`.
    prefix_min: Vec<u32>,
    inserts: u64,
    len: usize,
    corrupted_live: usize,
    corrupted_total: u64,
    /// Newly corrupted items not yet reported, with the key they were raised to.
    pending: Vec<(u32, ScoreKey)>,
}

impl<P: Copy> SoftHeap<P> {
    /// An empty heap with corruption parameter `epsilon` in `(0, 1/2)`.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in the open interval (0, 1/2), got {epsilon}"
            )));
        }
        let threshold_rank = (27.0 / epsilon).log2().ceil() as u32;
        Ok(SoftHeap {
            epsilon,
            threshold_rank,
            items: Vec::new(),
            nodes: Vec::new(),
            free_nodes: Vec::new(),
            roots: Vec::new(),
            prefix_min: Vec::new(),
            inserts: 0,
            len: 0,
            corrupted_live: 0,
            corrupted_total: 0,
            pending: Vec::new(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of insertions since creation or the last drain.
    pub fn inserts(&self) -> u64 {
        self.inserts
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Corrupted items currently in the heap. Always `<= epsilon * inserts()`.
    pub fn corrupted_in_heap(&self) -> usize {
        self.corrupted_live
    }

    /// Items that have ever become corrupted, extracted ones included.
    /// Survives [`drain`](Self::drain).
    pub fn corrupted_total(&self) -> u64 {
        self.corrupted_total
    }

    /// Current key of the next item [`extract_min`](Self::extract_min) would return.
    pub fn peek_key(&self) -> Option<ScoreKey> {
        self.prefix_min.last().map(|&x| self.nodes[x as usize].key)
    }

    pub fn insert(&mut self, key: ScoreKey, payload: P) {
        let id = self.items.len() as u32;
        assert!(id != NIL, "soft heap item arena exhausted");
        self.items.push(Item { key, payload, next: NIL });
        self.inserts += 1;
        self.len += 1;

        let mut x = self.alloc(Node {
            key,
            rank: 0,
            target: 1,
            clean: ItemList { head: id, tail: id, len: 1 },
            dirty: ItemList::EMPTY,
            left: NIL,
            right: NIL,
        });
        while let Some(&last) = self.roots.last() {
            if self.nodes[last as usize].rank != self.nodes[x as usize].rank {
                break;
            }
            self.roots.pop();
            self.prefix_min.pop();
            x = self.combine(x, last);
        }
        self.roots.push(x);
        let best = match self.prefix_min.last() {
            Some(&m) if self.nodes[m as usize].key <= self.nodes[x as usize].key => m,
            _ => x,
        };
        self.prefix_min.push(best);
    }

    /// Removes an item of least current key.
    ///
    /// Also returns every entry that became corrupted since the previous
    /// report; those entries remain in the heap.
    pub fn extract_min(&mut self) -> Result<(SoftHeapEntry<P>, Vec<SoftHeapEntry<P>>)> {
        let Some(&x) = self.prefix_min.last() else {
            return Err(Error::ContractViolation("extract_min on an empty soft heap".into()));
        };
        let node = &mut self.nodes[x as usize];
        let current_key = node.key;
        let id = if !node.clean.is_empty() {
            pop_front(&mut self.items, &mut node.clean)
        } else {
            pop_front(&mut self.items, &mut node.dirty)
        };
        let item = self.items[id as usize];
        let corrupted = item.key < current_key;
        if corrupted {
            self.corrupted_live -= 1;
        }
        self.len -= 1;

        if self.nodes[x as usize].set_len() == 0 {
            let pos = self.roots.iter().rposition(|&r| r == x).expect("min node is a root");
            if self.nodes[x as usize].is_leaf() {
                self.roots.remove(pos);
                self.free(x);
            } else {
                self.sift(x);
                if self.nodes[x as usize].set_len() == 0 {
                    // Every descendant was already empty; cannot happen while
                    // non-root sets stay nonempty, but keep the root list sound.
                    self.roots.remove(pos);
                    self.free(x);
                }
            }
            self.rebuild_prefix_min(pos);
        }

        let entry = SoftHeapEntry {
            original_key: item.key,
            current_key,
            payload: item.payload,
            corrupted,
        };
        Ok((entry, self.take_newly_corrupted()))
    }

    /// Reports entries corrupted since the last report without extracting.
    pub fn take_newly_corrupted(&mut self) -> Vec<SoftHeapEntry<P>> {
        self.pending
            .drain(..)
            .map(|(id, raised)| {
                let item = self.items[id as usize];
                SoftHeapEntry {
                    original_key: item.key,
                    current_key: raised,
                    payload: item.payload,
                    corrupted: true,
                }
            })
            .collect()
    }

    /// Iterates over corrupted entries still in the heap. Linear time.
    pub fn corrupted_entries(&self) -> Vec<SoftHeapEntry<P>> {
        self.live_entries().into_iter().filter(|e| e.corrupted).collect()
    }

    fn live_entries(&self) -> Vec<SoftHeapEntry<P>> {
        let mut out = Vec::with_capacity(self.len);
        let mut stack: Vec<u32> = self.roots.clone();
        while let Some(x) = stack.pop() {
            let node = &self.nodes[x as usize];
            for list in [node.clean, node.dirty] {
                let mut cur = list.head;
                while cur != NIL {
                    let item = self.items[cur as usize];
                    out.push(SoftHeapEntry {
                        original_key: item.key,
                        current_key: node.key,
                        payload: item.payload,
                        corrupted: item.key < node.key,
                    });
                    cur = item.next;
                }
            }
            stack.extend([node.left, node.right].into_iter().filter(|&c| c != NIL));
        }
        out
    }

    /// Empties the heap, returning every live entry, and resets the
    /// insertion count. Unreported corruptions are discarded with it; call
    /// [`take_newly_corrupted`](Self::take_newly_corrupted) first to see them.
    pub fn drain(&mut self) -> Vec<SoftHeapEntry<P>> {
        let out = self.live_entries();
        self.items.clear();
        self.nodes.clear();
        self.free_nodes.clear();
        self.roots.clear();
        self.prefix_min.clear();
        self.pending.clear();
        self.inserts = 0;
        self.len = 0;
        self.corrupted_live = 0;
        out
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(x) = self.free_nodes.pop() {
            self.nodes[x as usize] = node;
            x
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn free(&mut self, x: u32) {
        self.free_nodes.push(x);
    }

    fn combine(&mut self, x: u32, y: u32) -> u32 {
        let rank = self.nodes[x as usize].rank + 1;
        let target = if rank <= self.threshold_rank {
            1
        } else {
            (3 * self.nodes[x as usize].target).div_ceil(2)
        };
        let z = self.alloc(Node {
            key: self.nodes[x as usize].key,
            rank,
            target,
            clean: ItemList::EMPTY,
            dirty: ItemList::EMPTY,
            left: x,
            right: y,
        });
        self.sift(z);
        z
    }

    /// Refills `x` from its children until it holds `target` items or has
    /// no children left.
    fn sift(&mut self, x: u32) {
        let xi = x as usize;
        while self.nodes[xi].set_len() < self.nodes[xi].target && !self.nodes[xi].is_leaf() {
            let (l, r) = (self.nodes[xi].left, self.nodes[xi].right);
            if l == NIL || (r != NIL && self.nodes[l as usize].key > self.nodes[r as usize].key) {
                self.nodes[xi].left = r;
                self.nodes[xi].right = l;
            }
            let c = self.nodes[xi].left;
            let ci = c as usize;
            let new_key = self.nodes[ci].key;

            if self.nodes[xi].set_len() == 0 {
                self.nodes[xi].key = new_key;
            } else if new_key > self.nodes[xi].key {
                // Everything already here gets raised; clean items turn corrupt.
                let clean = self.nodes[xi].clean;
                let mut cur = clean.head;
                while cur != NIL {
                    self.pending.push((cur, new_key));
                    cur = self.items[cur as usize].next;
                }
                self.corrupted_live += clean.len;
                self.corrupted_total += clean.len as u64;
                let node = &mut self.nodes[xi];
                append(&mut self.items, &mut node.dirty, clean);
                node.clean = ItemList::EMPTY;
                node.key = new_key;
            }

            let (child_clean, child_dirty) = (self.nodes[ci].clean, self.nodes[ci].dirty);
            self.nodes[ci].clean = ItemList::EMPTY;
            self.nodes[ci].dirty = ItemList::EMPTY;
            let node = &mut self.nodes[xi];
            append(&mut self.items, &mut node.clean, child_clean);
            append(&mut self.items, &mut node.dirty, child_dirty);

            if self.nodes[ci].is_leaf() {
                self.nodes[xi].left = NIL;
                self.free(c);
            } else {
                self.sift(c);
            }
        }
    }

    fn rebuild_prefix_min(&mut self, from: usize) {
        self.prefix_min.truncate(from);
        for i in from..self.roots.len() {
            let x = self.roots[i];
            let best = match self.prefix_min.last() {
                Some(&m) if self.nodes[m as usize].key <= self.nodes[x as usize].key => m,
                _ => x,
            };
            self.prefix_min.push(best);
        }
    }
}

fn pop_front<P>(items: &mut [Item<P>], list: &mut ItemList) -> u32 {
    let id = list.head;
    debug_assert!(id != NIL);
    list.head = items[id as usize].next;
    list.len -= 1;
    if list.len == 0 {
        list.tail = NIL;
    }
    items[id as usize].next = NIL;
    id
}

fn append<P>(items: &mut [Item<P>], dst: &mut ItemList, src: ItemList) {
    if src.is_empty() {
        return;
    }
    if dst.is_empty() {
        *dst = src;
    } else {
        items[dst.tail as usize].next = src.head;
        dst.tail = src.tail;
        dst.len += src.len;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn key(v: f64) -> ScoreKey {
        ScoreKey::new(v).unwrap()
    }

    fn check_bound<P: Copy>(h: &SoftHeap<P>) {
        assert!(
            h.corrupted_in_heap() as f64 <= h.epsilon() * h.inserts() as f64,
            "{} corrupted > {} * {}",
            h.corrupted_in_heap(),
            h.epsilon(),
            h.inserts()
        );
    }

    #[test]
    fn construction() {
        let h = SoftHeap::<u32>::new(0.25).unwrap();
        assert_eq!(h.len(), 0);
        assert!(SoftHeap::<u32>::new(1.0 / 12.0).is_ok());
        for bad in [0.5, 0.0, -0.1, 0.7, f64::NAN] {
            assert!(matches!(SoftHeap::<u32>::new(bad), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn single_item_is_never_corrupted() {
        let mut h = SoftHeap::new(0.25).unwrap();
        h.insert(key(5.0), 42u32);
        let (e, newly) = h.extract_min().unwrap();
        assert_eq!(e.original_key, key(5.0));
        assert_eq!(e.payload, 42);
        assert!(!e.corrupted);
        assert!(newly.is_empty());
        assert!(h.is_empty());
    }

    #[test]
    fn empty_extract_is_an_error() {
        let mut h = SoftHeap::<()>::new(0.25).unwrap();
        assert!(matches!(h.extract_min(), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn tiny_epsilon_extracts_in_order() {
        let mut h = SoftHeap::new(0.01).unwrap();
        for v in [3.0, 1.0, 2.0] {
            h.insert(key(v), ());
        }
        let order: Vec<f64> = (0..3).map(|_| h.extract_min().unwrap().0.original_key.value()).collect();
        assert_eq!(order, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn keys_are_only_raised_and_nothing_is_lost() {
        let mut h = SoftHeap::new(0.1).unwrap();
        let n = 5000;
        for i in 0..n {
            h.insert(key(((i * 7919) % n) as f64), i);
        }
        let mut seen = vec![false; n];
        while !h.is_empty() {
            let (e, newly) = h.extract_min().unwrap();
            assert!(e.current_key >= e.original_key);
            for c in newly {
                assert!(c.current_key > c.original_key);
            }
            assert!(!seen[e.payload]);
            seen[e.payload] = true;
            check_bound(&h);
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn corruption_bound_extract_all() {
        let mut h = SoftHeap::new(0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            h.insert(key(rng.random()), ());
            check_bound(&h);
        }
        let mut peak = 0;
        while !h.is_empty() {
            h.extract_min().unwrap();
            peak = peak.max(h.corrupted_in_heap());
            check_bound(&h);
        }
        assert!(peak <= 2500);
    }

    #[test]
    fn corruption_is_reported_once() {
        let mut h = SoftHeap::new(0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        for i in 0..n {
            h.insert(key(rng.random()), i);
        }
        let mut reported = vec![0u8; n];
        while !h.is_empty() {
            let (_, newly) = h.extract_min().unwrap();
            for e in newly {
                reported[e.payload] += 1;
            }
        }
        assert!(reported.iter().all(|&r| r <= 1));
        let total: u64 = reported.iter().map(|&r| r as u64).sum();
        assert_eq!(total, h.corrupted_total());
        assert!(total > 0, "expected some corruption at this size");
    }

    #[test]
    fn drain_accounting() {
        let mut h = SoftHeap::<u32>::new(0.25).unwrap();
        assert!(h.drain().is_empty());
        h.insert(key(4.0), 0);
        h.insert(key(1.0), 1);
        let mut drained: Vec<f64> = h.drain().iter().map(|e| e.original_key.value()).collect();
        drained.sort_by(f64::total_cmp);
        assert_eq!(drained, vec![1.0, 4.0]);
        assert_eq!(h.inserts(), 0);
        assert!(h.is_empty());

        for i in 0..100 {
            h.insert(key(i as f64), i);
        }
        for _ in 0..37 {
            h.extract_min().unwrap();
        }
        assert_eq!(h.drain().len(), 63);
    }

    #[test]
    fn completeness_with_interleaving() {
        let mut h = SoftHeap::new(0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut inserted = Vec::new();
        let mut out = Vec::new();
        for i in 0..20_000u32 {
            if rng.random_bool(0.6) || h.is_empty() {
                let v: f64 = rng.random();
                h.insert(key(v), i);
                inserted.push(v);
            } else {
                out.push(h.extract_min().unwrap().0.original_key.value());
            }
            check_bound(&h);
            assert_eq!(h.len() as u64, h.inserts() - out.len() as u64);
        }
        out.extend(h.drain().iter().map(|e| e.original_key.value()));
        out.sort_by(f64::total_cmp);
        inserted.sort_by(f64::total_cmp);
        assert_eq!(out, inserted);
    }
}
