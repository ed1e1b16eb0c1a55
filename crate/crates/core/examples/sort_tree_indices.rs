//! The smallest sums of five small arrays, in order, with the picks behind them.

use cartesian_topk::{keys, sort_tree_select};

fn main() -> cartesian_topk::Result<()> {
    let arrays = vec![
        keys(&[3.0, 1.0, 4.0])?,
        keys(&[1.0, 5.0, 9.0])?,
        keys(&[2.0, 6.0])?,
        keys(&[5.0, 3.0, 5.0])?,
        keys(&[8.0, 9.0, 7.0])?,
    ];
    let r = sort_tree_select(&arrays, 8, true)?;
    for (value, tuple) in r.values.iter().zip(r.indices.unwrap()) {
        let picks: Vec<String> = tuple.iter().zip(&arrays).map(|(&i, a)| format!("{}", a[i])).collect();
        println!("{value:>4} = {}   positions {tuple:?}", picks.join(" + "));
    }
    println!("pops per level: {:?}", r.stats.pops_per_level);
    Ok(())
}
