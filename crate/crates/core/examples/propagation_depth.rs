//! How deep into a SortTree each root pop reaches, for a range of k.

use cartesian_topk::bench::{self, BenchConfig, Distribution};
use cartesian_topk::Algorithm;

fn main() -> cartesian_topk::Result<()> {
    for distribution in [Distribution::Uniform, Distribution::Exponential] {
        println!("{distribution}, m=64, n=1024, mean pops per node by depth:");
        for k in [64, 256, 1024] {
            let config = BenchConfig {
                algorithms: vec![Algorithm::SortTree],
                m: 64,
                n: 1024,
                k,
                distribution,
                replicates: 5,
                ..Default::default()
            };
            let means = bench::mean_pops_per_level(&bench::run(&config)?, "sort-tree");
            let cols: Vec<String> = means.iter().map(|v| format!("{v:8.2}")).collect();
            println!("  k={k:<5}{}", cols.join(""));
        }
    }
    Ok(())
}
