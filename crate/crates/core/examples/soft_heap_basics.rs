//! Insert a shuffled range into a soft heap and watch corruption stay bounded.
//!
//! `cargo run --example soft_heap_basics -- 0.1`

use cartesian_topk::{ScoreKey, SoftHeap};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cartesian_topk::Result<()> {
    let eps: f64 = std::env::args().nth(1).map_or(Ok(0.1), |s| s.parse()).expect("epsilon must be a number");
    let mut values: Vec<u32> = (0..10_000).collect();
    values.shuffle(&mut ChaCha8Rng::seed_from_u64(7));

    let mut heap = SoftHeap::new(eps)?;
    for &v in &values {
        heap.insert(ScoreKey::new(v as f64)?, v);
    }
    println!("inserted {} items, {} currently corrupted (bound {:.0})", heap.inserts(), heap.corrupted_in_heap(), eps * heap.inserts() as f64);

    let mut out_of_order = 0;
    let mut last = f64::NEG_INFINITY;
    let mut reported = 0;
    while !heap.is_empty() {
        let (entry, newly) = heap.extract_min()?;
        reported += newly.len();
        if entry.original_key.value() < last {
            out_of_order += 1;
        }
        last = entry.original_key.value();
    }
    println!("extracted all; {out_of_order} came out below an earlier item");
    println!("{} items were ever corrupted, {reported} reported along the way", heap.corrupted_total());
    Ok(())
}
