//! The k smallest of A + B through a soft heap, checked by enumeration.

use cartesian_topk::pairwise::{soft_select_pairwise_with, PAIRWISE_EPSILON};
use cartesian_topk::{Multiset, ScoreKey};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cartesian_topk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut draw = |n| -> Vec<ScoreKey> { (0..n).map(|_| ScoreKey::new(rng.random_range(0..1000) as f64).unwrap()).collect() };
    let (a, b) = (draw(500), draw(800));
    let k = 2000;

    let run = soft_select_pairwise_with(&a, &b, k, PAIRWISE_EPSILON)?;
    let mut all: Vec<ScoreKey> = a.iter().flat_map(|&x| b.iter().map(move |&y| x + y)).collect();
    all.sort();
    all.truncate(k);

    println!("|A|={}, |B|={}, k={k}", a.len(), b.len());
    println!("soft-heap inserts {}, corrupted {}", run.counters.inserts, run.counters.corrupted);
    println!("matches enumeration: {}", Multiset::new(run.values) == Multiset::new(all));
    Ok(())
}
