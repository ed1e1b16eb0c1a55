//! Benchmark harness behind the `cartesian-topk` binary.
//!
//! A [`BenchConfig`] names the selectors, the input source and the number of
//! replicates. [`run`] produces one [`CsvRow`] per (selector, replicate);
//! replicate `r` draws its inputs with seed `seed + r`. With validation on,
//! every result is checked against the brute-force oracle whenever the
//! tensor fits under the oracle's guard.

mod csv;
mod inputs;

use std::path::PathBuf;
use std::time::Instant;

pub use csv::{gnuplot_script, level_columns, write_csv, CsvRow, FIXED_COLUMNS};
pub use inputs::{generate_inputs, ingest_file, parse_arrays, Distribution};

use crate::error::{Error, Result};
use crate::loh::check_alpha;
use crate::score::ScoreKey;
use crate::selectors::{brute_force_select, guard_from_env, tensor_size, Algorithm, SelectionResult};

/// Relative tolerance for comparing selections whose sums were associated
/// differently.
pub const VALIDATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub distribution: Distribution,
    pub input_file: Option<PathBuf>,
    pub seed: u64,
    pub replicates: usize,
    pub validate: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithms: Algorithm::ALL.to_vec(),
            m: 4,
            n: 4,
            k: 10,
            alpha: 1.05,
            distribution: Distribution::Uniform,
            input_file: None,
            seed: 0,
            replicates: 1,
            validate: false,
        }
    }
}

impl BenchConfig {
    /// Parameter checks that do not need the inputs.
    pub fn check(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameter("no algorithm selected".into()));
        }
        if self.k == 0 || self.replicates == 0 {
            return Err(Error::InvalidParameter("k and replicates must be at least 1".into()));
        }
        if self.distribution == Distribution::File {
            if self.input_file.is_none() {
                return Err(Error::InvalidParameter("--distribution file needs --input-file".into()));
            }
        } else if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("m and n must be at least 1".into()));
        }
        if self.algorithms.contains(&Algorithm::FastSoftTree) {
            check_alpha(self.alpha)?;
        }
        Ok(())
    }

    /// Arrays for replicate `r`.
    pub fn inputs(&self, replicate: usize) -> Result<Vec<Vec<ScoreKey>>> {
        match (&self.input_file, self.distribution) {
            (Some(path), Distribution::File) => ingest_file(path),
            _ => generate_inputs(self.distribution, self.m, self.n, self.replicate_seed(replicate)),
        }
    }

    pub fn replicate_seed(&self, replicate: usize) -> u64 {
        self.seed.wrapping_add(replicate as u64)
    }
}

/// `(arrays, k, alpha) -> result`.
pub type SelectorFn<'a> = Box<dyn Fn(&[Vec<ScoreKey>], usize, f64) -> Result<SelectionResult> + 'a>;

/// A selector under test.
pub struct NamedSelector<'a> {
    pub name: String,
    pub run: SelectorFn<'a>,
}

impl NamedSelector<'static> {
    pub fn builtin(algorithm: Algorithm) -> Self {
        NamedSelector {
            name: algorithm.name().to_string(),
            run: Box::new(move |arrays, k, alpha| algorithm.select(arrays, k, alpha)),
        }
    }
}

/// Runs the configured built-in selectors.
pub fn run(config: &BenchConfig) -> Result<Vec<CsvRow>> {
    let selectors: Vec<NamedSelector> = config.algorithms.iter().map(|&a| NamedSelector::builtin(a)).collect();
    run_custom(config, &selectors)
}

/// Runs arbitrary selectors under the harness; the configured algorithm
/// list is ignored.
pub fn run_custom(config: &BenchConfig, selectors: &[NamedSelector]) -> Result<Vec<CsvRow>> {
    config.check()?;
    let mut rows = Vec::new();
    for replicate in 0..config.replicates {
        let arrays = config.inputs(replicate)?;
        let cells = tensor_size(&arrays);
        if config.k as u128 > cells {
            return Err(Error::InvalidParameter(format!("k = {} exceeds the {cells} available sums", config.k)));
        }
        let oracle = if config.validate && cells <= guard_from_env() {
            Some(brute_force_select(&arrays, config.k)?)
        } else {
            None
        };
        for selector in selectors {
            let start = Instant::now();
            let result = (selector.run)(&arrays, config.k, config.alpha)?;
            let wall_time_ns = start.elapsed().as_nanos();
            if config.validate {
                check_result(&selector.name, &arrays, config.k, &result, oracle.as_ref())?;
            }
            rows.push(CsvRow::new(config, &arrays, &selector.name, replicate, wall_time_ns, &result));
        }
    }
    Ok(rows)
}

/// Validates one result: size, sortedness claim, index tuples, the
/// one-axis invariant and, when available, agreement with the oracle.
pub fn check_result(
    name: &str,
    arrays: &[Vec<ScoreKey>],
    k: usize,
    result: &SelectionResult,
    oracle: Option<&SelectionResult>,
) -> Result<()> {
    let fail = |what: String| Err(Error::Validation(format!("{name}: {what}")));
    if result.values.len() != k {
        return fail(format!("returned {} values, expected {k}", result.values.len()));
    }
    if result.sorted && result.values.windows(2).any(|w| w[0] > w[1]) {
        return fail("claims sorted output but is not nondecreasing".into());
    }
    if result.stats.one_axis_violations > 0 {
        return fail(format!("{} pops advanced both margins", result.stats.one_axis_violations));
    }
    if let Some(indices) = &result.indices {
        for (value, tuple) in result.values.iter().zip(indices) {
            if tuple.len() != arrays.len() || tuple.iter().zip(arrays).any(|(&i, a)| i >= a.len()) {
                return fail(format!("index tuple {tuple:?} out of range"));
            }
            let sum: f64 = tuple.iter().zip(arrays).map(|(&i, a)| a[i].value()).sum();
            let scale = 1f64.max(sum.abs()).max(value.value().abs());
            if (sum - value.value()).abs() > VALIDATION_TOLERANCE * scale {
                return fail(format!("index tuple {tuple:?} sums to {sum}, reported {value}"));
            }
        }
    }
    if let Some(oracle) = oracle {
        if !result.multiset().approx_eq(&oracle.multiset(), VALIDATION_TOLERANCE) {
            return fail("disagrees with the brute-force oracle".into());
        }
    }
    Ok(())
}

/// Mean of each per-level pops column over rows of one algorithm.
pub fn mean_pops_per_level(rows: &[CsvRow], algorithm: &str) -> Vec<f64> {
    let rows: Vec<&CsvRow> = rows.iter().filter(|r| r.algorithm == algorithm).collect();
    let depth = rows.iter().map(|r| r.pops_per_level.len()).max().unwrap_or(0);
    (0..depth)
        .map(|d| {
            let vals: Vec<f64> = rows.iter().filter_map(|r| r.pops_per_level.get(d).copied()).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig { m: 4, n: 4, k: 10, seed: 1, validate: true, ..Default::default() }
    }

    #[test]
    fn all_algorithms_agree() {
        let rows = run(&small()).unwrap();
        assert_eq!(rows.len(), 6);
        let kth: Vec<f64> = rows.iter().map(|r| r.kth_value).collect();
        assert!(kth.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12));
    }

    #[test]
    fn fault_injection_is_caught() {
        let broken = NamedSelector {
            name: "broken".into(),
            run: Box::new(|arrays, k, alpha| {
                let mut r = Algorithm::SortTensor.select(arrays, k, alpha)?;
                let last = r.values.len() - 1;
                r.values[last] = r.values[last] + ScoreKey::new(1e-3).unwrap();
                Ok(r)
            }),
        };
        assert!(matches!(run_custom(&small(), &[broken]), Err(Error::Validation(_))));
    }

    #[test]
    fn bad_configs() {
        let bad = |f: fn(&mut BenchConfig)| {
            let mut c = small();
            f(&mut c);
            run(&c).unwrap_err()
        };
        assert!(matches!(bad(|c| c.k = 0), Error::InvalidParameter(_)));
        assert!(matches!(bad(|c| c.k = 257), Error::InvalidParameter(_)));
        assert!(matches!(bad(|c| c.alpha = 2.5), Error::InvalidParameter(_)));
        assert!(matches!(bad(|c| c.distribution = Distribution::File), Error::InvalidParameter(_)));
    }

    #[test]
    fn deterministic_apart_from_timing() {
        let strip = |rows: Vec<CsvRow>| {
            rows.into_iter()
                .map(|mut r| {
                    r.wall_time_ns = 0;
                    r
                })
                .collect::<Vec<_>>()
        };
        let c = BenchConfig { replicates: 3, ..small() };
        assert_eq!(strip(run(&c).unwrap()), strip(run(&c).unwrap()));
    }
}
