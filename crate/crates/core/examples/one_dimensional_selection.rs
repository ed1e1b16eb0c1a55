//! Linear-time selection two ways: introselect and repeated layer-ordering.

use std::time::Instant;

use cartesian_topk::{select_k, select_k_loh, ScoreKey};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cartesian_topk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let values: Vec<ScoreKey> = (0..1_000_000).map(|_| ScoreKey::new(rng.random::<f64>()).unwrap()).collect();
    let k = 1000;

    let t = Instant::now();
    let direct = select_k(&values, k)?;
    println!("select_k:     {:?}, largest kept {}", t.elapsed(), direct.max().unwrap());
    for alpha in [1.1, 1.5, 1.9] {
        let t = Instant::now();
        let via = select_k_loh(&values, k, alpha)?;
        println!("select_k_loh: {:?} at alpha {alpha}, same answer: {}", t.elapsed(), via == direct);
    }
    Ok(())
}
