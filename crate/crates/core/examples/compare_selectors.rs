//! Run every selector on the same input and compare timings and answers.

use std::time::Instant;

use cartesian_topk::bench::{generate_inputs, Distribution};
use cartesian_topk::Algorithm;

fn main() -> cartesian_topk::Result<()> {
    let (m, n, k) = (6, 12, 300);
    let arrays = generate_inputs(Distribution::Exponential, m, n, 5)?;
    let oracle = Algorithm::BruteForce.select(&arrays, k, 1.05)?.multiset();
    println!("{:<15} {:>10} {:>10} {:>8}", "selector", "time", "generated", "agrees");
    for algorithm in Algorithm::ALL {
        let t = Instant::now();
        let r = algorithm.select(&arrays, k, 1.05)?;
        let elapsed = t.elapsed();
        let agrees = r.multiset().approx_eq(&oracle, 1e-9);
        println!("{:<15} {:>10.2?} {:>10} {:>8}", algorithm.name(), elapsed, r.stats.values_generated, agrees);
    }
    Ok(())
}
