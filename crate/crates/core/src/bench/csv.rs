//! CSV rows and the gnuplot helper.
//!
//! Columns, in order: `algorithm, replicate, seed, m, n, k, alpha,
//! distribution, wall_time_ns, kth_value, values_generated,
//! corrupted_count, fringe_peak, soft_heap_inserts, one_axis_violations`,
//! then `pops_level_0 .. pops_level_D` with `D = ceil(log2 m)`. `n` is the
//! longest array. Floats are written in scientific notation with 17
//! significant digits; a level a selector does not have is left empty.

use std::io::Write;

use super::BenchConfig;
use crate::error::Result;
use crate::score::ScoreKey;
use crate::selectors::SelectionResult;

pub const FIXED_COLUMNS: [&str; 15] = [
    "algorithm",
    "replicate",
    "seed",
    "m",
    "n",
    "k",
    "alpha",
    "distribution",
    "wall_time_ns",
    "kth_value",
    "values_generated",
    "corrupted_count",
    "fringe_peak",
    "soft_heap_inserts",
    "one_axis_violations",
];

#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub algorithm: String,
    pub replicate: usize,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub distribution: String,
    pub wall_time_ns: u128,
    /// Largest selected value.
    pub kth_value: f64,
    pub values_generated: u64,
    pub corrupted_count: u64,
    pub fringe_peak: usize,
    pub soft_heap_inserts: u64,
    pub one_axis_violations: u64,
    pub pops_per_level: Vec<f64>,
}

impl CsvRow {
    pub fn new(
        config: &BenchConfig,
        arrays: &[Vec<ScoreKey>],
        algorithm: &str,
        replicate: usize,
        wall_time_ns: u128,
        result: &SelectionResult,
    ) -> Self {
        let stats = &result.stats;
        CsvRow {
            algorithm: algorithm.to_string(),
            replicate,
            seed: config.replicate_seed(replicate),
            m: arrays.len(),
            n: arrays.iter().map(Vec::len).max().unwrap_or(0),
            k: config.k,
            alpha: config.alpha,
            distribution: config.distribution.to_string(),
            wall_time_ns,
            kth_value: result.values.iter().copied().max().map_or(f64::NAN, ScoreKey::value),
            values_generated: stats.values_generated,
            corrupted_count: stats.corrupted_count,
            fringe_peak: stats.fringe_peak,
            soft_heap_inserts: stats.soft_heap_inserts,
            one_axis_violations: stats.one_axis_violations,
            pops_per_level: stats.pops_per_level.clone(),
        }
    }
}

/// Number of per-level columns for a tree over `m` arrays.
pub fn level_columns(m: usize) -> usize {
    m.max(1).next_power_of_two().trailing_zeros() as usize + 1
}

pub fn write_csv<W: Write>(mut out: W, rows: &[CsvRow]) -> Result<()> {
    let levels = rows.iter().map(|r| level_columns(r.m).max(r.pops_per_level.len())).max().unwrap_or(1);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|c| c.to_string()).collect();
    header.extend((0..levels).map(|d| format!("pops_level_{d}")));
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let mut fields = vec![
            r.algorithm.clone(),
            r.replicate.to_string(),
            r.seed.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            float(r.alpha),
            r.distribution.clone(),
            r.wall_time_ns.to_string(),
            float(r.kth_value),
            r.values_generated.to_string(),
            r.corrupted_count.to_string(),
            r.fringe_peak.to_string(),
            r.soft_heap_inserts.to_string(),
            r.one_axis_violations.to_string(),
        ];
        fields.extend((0..levels).map(|d| r.pops_per_level.get(d).map_or(String::new(), |&v| float(v))));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A gnuplot script plotting wall time against `k` on log-log axes, one
/// series per algorithm, from a CSV written by [`write_csv`].
pub fn gnuplot_script(csv_path: &str, algorithms: &[&str]) -> String {
    let k = 1 + FIXED_COLUMNS.iter().position(|&c| c == "k").unwrap();
    let t = 1 + FIXED_COLUMNS.iter().position(|&c| c == "wall_time_ns").unwrap();
    let mut s = String::from(
        "set datafile separator ','\nset key autotitle columnhead\nset logscale xy\n\
         set xlabel 'k'\nset ylabel 'wall time (ns)'\n",
    );
    let series: Vec<String> = algorithms
        .iter()
        .map(|a| format!("'{csv_path}' using {k}:(strcol(1) eq '{a}' ? column({t}) : NaN) with points title '{a}'"))
        .collect();
    s.push_str("plot ");
    s.push_str(&series.join(", \\\n     "));
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_column_counts() {
        assert_eq!(level_columns(1), 1);
        assert_eq!(level_columns(2), 2);
        assert_eq!(level_columns(5), 4);
        assert_eq!(level_columns(64), 7);
    }

    #[test]
    fn header_and_float_format() {
        let row = CsvRow {
            algorithm: "sort-tree".into(),
            replicate: 0,
            seed: 1,
            m: 2,
            n: 3,
            k: 4,
            alpha: 1.05,
            distribution: "uniform".into(),
            wall_time_ns: 10,
            kth_value: 0.1,
            values_generated: 5,
            corrupted_count: 0,
            fringe_peak: 2,
            soft_heap_inserts: 0,
            one_axis_violations: 0,
            pops_per_level: vec![4.0],
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].ends_with("one_axis_violations,pops_level_0,pops_level_1"));
        assert!(lines[1].contains(",1.0500000000000000e0,"));
        assert!(lines[1].ends_with(",4.0000000000000000e0,"));
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn gnuplot_mentions_each_algorithm() {
        let s = gnuplot_script("out.csv", &["sort-tree", "soft-tree"]);
        assert!(s.contains("'sort-tree'") && s.contains("'soft-tree'"));
        assert!(s.contains("using 6:"));
    }
}
