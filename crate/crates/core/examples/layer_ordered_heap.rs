//! Layer-order an array and print the schedule and each layer's range.

use cartesian_topk::{keys, lohify, verify_loh, LayerSchedule};

fn main() -> cartesian_topk::Result<()> {
    let alpha = 1.5;
    let values: Vec<f64> = (0..40).map(|i| ((i * 17) % 40) as f64).collect();
    let heap = lohify(keys(&values)?, alpha)?;

    println!("schedule totals for n=40, alpha={alpha}: {:?}", LayerSchedule::new(alpha, 40)?.totals());
    for (i, layer) in heap.layers().enumerate() {
        let lo = layer.iter().min().unwrap();
        let hi = layer.iter().max().unwrap();
        println!("layer {i}: {} values in [{lo}, {hi}]", layer.len());
    }
    println!("valid: {}", verify_loh(&heap));
    Ok(())
}
