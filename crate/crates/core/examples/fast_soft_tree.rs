//! Grow a FastSoftTree over many arrays and see how little each level produces.

use cartesian_topk::bench::{generate_inputs, Distribution};
use cartesian_topk::selectors::FastSoftTree;
use cartesian_topk::theoretical_exponent;

fn main() -> cartesian_topk::Result<()> {
    let (m, n, k, alpha) = (64, 256, 512, 1.05);
    let arrays = generate_inputs(Distribution::Uniform, m, n, 11)?;
    let mut tree = FastSoftTree::new(&arrays, alpha)?;
    let top = tree.select(k)?;

    println!("m={m} n={n} k={k} alpha={alpha}: work grows like m^{:.4}", theoretical_exponent(alpha));
    println!("largest selected sum {}", top.iter().max().unwrap());
    let stats = tree.stats();
    for (depth, mean) in stats.pops_per_level.iter().enumerate() {
        println!("depth {depth}: {mean:8.1} values handed up per node");
    }
    println!("soft-heap inserts {}, corrupted {}", stats.soft_heap_inserts, stats.corrupted_count);
    Ok(())
}
