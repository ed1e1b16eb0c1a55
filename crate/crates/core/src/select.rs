//! One-dimensional k-selection.
//!
//! [`select_k`] is an introselect: randomized quickselect with a three-way
//! partition, switching to median-of-medians pivots once a depth budget is
//! spent, so the worst case stays linear. [`select_k_loh`] reaches the same
//! answer by repeatedly layer-ordering the array and descending into the
//! layer that straddles the selection threshold.

use crate::error::{Error, Result};
use crate::loh::{check_alpha, LayerOrderedHeap};
use crate::score::{Multiset, ScoreKey};

const INSERTION_THRESHOLD: usize = 16;

/// Small deterministic generator for pivot choice. Selection output does not
/// depend on it, only the running time does.
struct PivotRng(u64);

impl PivotRng {
    fn new(len: usize) -> Self {
        PivotRng(0x9E37_79B9_7F4A_7C15 ^ (len as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
    }

    fn below(&mut self, bound: usize) -> usize {
        // splitmix64
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z % bound as u64) as usize
    }
}

fn insertion_sort<T: Ord + Copy>(v: &mut [T]) {
    for i in 1..v.len() {
        let x = v[i];
        let mut j = i;
        while j > 0 && v[j - 1] > x {
            v[j] = v[j - 1];
            j -= 1;
        }
        v[j] = x;
    }
}

/// Splits `v` into `< pivot`, `== pivot`, `> pivot`. Returns the bounds of
/// the middle run.
fn partition3<T: Ord + Copy>(v: &mut [T], pivot: T) -> (usize, usize) {
    let (mut lt, mut i, mut gt) = (0, 0, v.len());
    while i < gt {
        if v[i] < pivot {
            v.swap(lt, i);
            lt += 1;
            i += 1;
        } else if v[i] > pivot {
            gt -= 1;
            v.swap(i, gt);
        } else {
            i += 1;
        }
    }
    (lt, gt)
}

/// Median of the medians of groups of five. Reorders `v`.
fn median_of_medians<T: Ord + Copy>(v: &mut [T]) -> T {
    let n = v.len();
    if n <= 5 {
        insertion_sort(v);
        return v[n / 2];
    }
    let mut medians = 0;
    for start in (0..n).step_by(5) {
        let end = (start + 5).min(n);
        insertion_sort(&mut v[start..end]);
        v.swap(medians, start + (end - start) / 2);
        medians += 1;
    }
    let mid = medians / 2;
    nth_deterministic(&mut v[..medians], mid);
    v[mid]
}

fn nth_deterministic<T: Ord + Copy>(mut v: &mut [T], mut nth: usize) {
    loop {
        if v.len() <= INSERTION_THRESHOLD {
            insertion_sort(v);
            return;
        }
        let pivot = median_of_medians(v);
        let (lt, gt) = partition3(v, pivot);
        if nth < lt {
            v = &mut v[..lt];
        } else if nth < gt {
            return;
        } else {
            v = &mut v[gt..];
            nth -= gt;
        }
    }
}

/// Reorders `v` so that every element of `v[..rank]` is `<=` every element
/// of `v[rank..]`. Order inside the two halves is unspecified.
pub fn partition_at<T: Ord + Copy>(v: &mut [T], rank: usize) {
    if rank == 0 || rank >= v.len() {
        return;
    }
    let mut rng = PivotRng::new(v.len());
    let mut budget = 2 * (usize::BITS - v.len().leading_zeros()) as usize + 4;
    let mut seg: &mut [T] = v;
    let mut nth = rank;
    loop {
        if seg.len() <= INSERTION_THRESHOLD {
            insertion_sort(seg);
            return;
        }
        let pivot = if budget > 0 {
            budget -= 1;
            seg[rng.below(seg.len())]
        } else {
            median_of_medians(seg)
        };
        let (lt, gt) = partition3(seg, pivot);
        if nth < lt {
            seg = &mut seg[..lt];
        } else if nth < gt {
            return;
        } else {
            seg = &mut seg[gt..];
            nth -= gt;
        }
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::ContractViolation(format!(
            "k must satisfy 1 <= k <= {n}, got {k}"
        )));
    }
    Ok(())
}

/// Keeps only the `k` smallest elements of `v`, in unspecified order.
pub(crate) fn retain_smallest<T: Ord + Copy>(v: &mut Vec<T>, k: usize) {
    partition_at(v, k);
    v.truncate(k);
}

/// The `k` smallest values, by multiplicity, in expected and worst-case
/// linear time.
pub fn select_k(values: &[ScoreKey], k: usize) -> Result<Multiset> {
    check_k(k, values.len())?;
    let mut v = values.to_vec();
    retain_smallest(&mut v, k);
    Ok(Multiset::new(v))
}

/// Same contract as [`select_k`], computed through layer-ordered heaps.
///
/// The array is layer-ordered with rank `alpha`; whole layers are taken
/// smallest-first while they fit, and the first layer that would overshoot
/// is itself layer-ordered and searched for the remainder. The work obeys
/// `r(k) = k + r((alpha - 1) k)`.
pub fn select_k_loh(values: &[ScoreKey], k: usize, alpha: f64) -> Result<Multiset> {
    check_k(k, values.len())?;
    check_alpha(alpha)?;
    let mut out = Vec::with_capacity(k);
    let mut pool = values.to_vec();
    let mut need = k;
    while need > 0 {
        if need == pool.len() {
            out.append(&mut pool);
            break;
        }
        let heap = LayerOrderedHeap::lohify(pool, alpha)?;
        let mut straddle = None;
        for layer in heap.layers() {
            if layer.len() <= need {
                out.extend_from_slice(layer);
                need -= layer.len();
                if need == 0 {
                    break;
                }
            } else {
                straddle = Some(layer.to_vec());
                break;
            }
        }
        match straddle {
            Some(layer) => pool = layer,
            None => break,
        }
    }
    Ok(Multiset::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::keys;
    use proptest::prelude::*;

    fn sort_oracle(values: &[ScoreKey], k: usize) -> Multiset {
        let mut v = values.to_vec();
        v.sort();
        v.truncate(k);
        Multiset::new(v)
    }

    #[test]
    fn singleton() {
        let v = keys(&[7.0]).unwrap();
        assert_eq!(select_k(&v, 1).unwrap(), keys(&[7.0]).unwrap().into());
    }

    #[test]
    fn small_example() {
        let v = keys(&[5.0, 1.0, 3.0]).unwrap();
        assert_eq!(select_k(&v, 2).unwrap(), keys(&[1.0, 3.0]).unwrap().into());
    }

    #[test]
    fn all_equal_k_equals_n() {
        let v = keys(&[2.0; 4]).unwrap();
        assert_eq!(select_k(&v, 4).unwrap(), keys(&[2.0; 4]).unwrap().into());
    }

    #[test]
    fn rejects_out_of_range_k() {
        let v = keys(&[1.0, 2.0]).unwrap();
        assert!(matches!(select_k(&v, 0), Err(Error::ContractViolation(_))));
        assert!(matches!(select_k(&v, 3), Err(Error::ContractViolation(_))));
        assert!(select_k_loh(&v, 3, 1.5).is_err());
    }

    #[test]
    fn loh_examples() {
        let v = keys(&[9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(select_k_loh(&v, 3, 1.5).unwrap(), keys(&[0.0, 1.0, 2.0]).unwrap().into());
        let one = keys(&[1.0]).unwrap();
        assert_eq!(select_k_loh(&one, 1, 1.1).unwrap(), one.clone().into());
    }

    #[test]
    fn loh_rejects_bad_alpha() {
        let v = keys(&[1.0, 2.0]).unwrap();
        for alpha in [1.0, 2.0, 0.5, f64::NAN] {
            assert!(matches!(select_k_loh(&v, 1, alpha), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn loh_matches_select_k_on_random_uniform() {
        use rand::{Rng, SeedableRng};
        for seed in 0..100u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<ScoreKey> = (0..1000)
                .map(|_| ScoreKey::new(rng.random::<f64>()).unwrap())
                .collect();
            assert_eq!(select_k_loh(&v, 137, 1.3).unwrap(), select_k(&v, 137).unwrap());
        }
    }

    #[test]
    fn median_of_medians_path_is_exercised() {
        // Adversarially many duplicates plus a long run; nth_deterministic
        // is checked directly as well.
        let mut v: Vec<i64> = (0..5000).map(|i| (i * 7919) % 613).collect();
        let mut sorted = v.clone();
        sorted.sort();
        nth_deterministic(&mut v, 2500);
        assert_eq!(v[2500], sorted[2500]);
        assert!(v[..2500].iter().all(|&x| x <= sorted[2500]));
        assert!(v[2501..].iter().all(|&x| x >= sorted[2500]));
    }

    fn arb_values() -> impl Strategy<Value = Vec<ScoreKey>> {
        prop::collection::vec(-50i32..50, 1..400)
            .prop_map(|v| v.into_iter().map(|x| ScoreKey::new(x as f64).unwrap()).collect())
    }

    proptest! {
        #[test]
        fn select_k_matches_sort(values in arb_values(), frac in 0.0f64..1.0) {
            let k = 1 + ((values.len() - 1) as f64 * frac) as usize;
            prop_assert_eq!(select_k(&values, k).unwrap(), sort_oracle(&values, k));
        }

        #[test]
        fn select_k_loh_matches_select_k(values in arb_values(), frac in 0.0f64..1.0, alpha in 1.01f64..1.99) {
            let k = 1 + ((values.len() - 1) as f64 * frac) as usize;
            prop_assert_eq!(select_k_loh(&values, k, alpha).unwrap(), select_k(&values, k).unwrap());
        }

        #[test]
        fn partition_correctness(values in arb_values(), frac in 0.0f64..1.0) {
            let k = 1 + ((values.len() - 1) as f64 * frac) as usize;
            let mut v = values.clone();
            partition_at(&mut v, k);
            let max_left = v[..k].iter().max().unwrap();
            prop_assert!(v[k..].iter().all(|x| x >= max_left));
        }

        #[test]
        fn permutation_invariance(values in arb_values(), frac in 0.0f64..1.0, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let k = 1 + ((values.len() - 1) as f64 * frac) as usize;
            let mut shuffled = values.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(select_k(&values, k).unwrap(), select_k(&shuffled, k).unwrap());
        }
    }
}
