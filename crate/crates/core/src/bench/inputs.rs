//! Synthetic input generation and file ingestion.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::score::ScoreKey;

/// Where input arrays come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    /// Uniform on `[0, 1)`.
    Uniform,
    /// Exponential with rate 1.
    Exponential,
    /// Read from `--input-file`.
    File,
}

impl Distribution {
    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Exponential => "exponential",
            Distribution::File => "file",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "exponential" => Ok(Distribution::Exponential),
            "file" => Ok(Distribution::File),
            _ => Err(Error::InvalidParameter(format!("unknown distribution {s:?}"))),
        }
    }
}

/// `m` arrays of `n` draws from a ChaCha8 stream seeded with `seed`.
///
/// Arrays are filled one after another from the same stream, so the output
/// is a pure function of the arguments on every platform.
pub fn generate_inputs(distribution: Distribution, m: usize, n: usize, seed: u64) -> Result<Vec<Vec<ScoreKey>>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw: fn(&mut ChaCha8Rng) -> f64 = match distribution {
        Distribution::Uniform => |rng| rng.random::<f64>(),
        Distribution::Exponential => |rng| rng.sample(Exp1),
        Distribution::File => {
            return Err(Error::InvalidParameter("file inputs are read with ingest_file".into()));
        }
    };
    (0..m)
        .map(|_| (0..n).map(|_| ScoreKey::new(draw(&mut rng))).collect())
        .collect()
}

/// Reads one array per line; values are separated by commas and/or
/// whitespace. Blank lines are skipped and arrays may differ in length.
pub fn ingest_file(path: &Path) -> Result<Vec<Vec<ScoreKey>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_arrays(&text)
}

pub fn parse_arrays(text: &str) -> Result<Vec<Vec<ScoreKey>>> {
    let mut arrays = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let mut array = Vec::new();
        for (column, token) in tokens(line) {
            let err = |message: String| Error::Parse { line: line_no + 1, column, message };
            let value: f64 = token.parse().map_err(|_| err(format!("not a number: {token:?}")))?;
            if !value.is_finite() {
                return Err(err(format!("non-finite value: {token:?}")));
            }
            array.push(ScoreKey::new(value)?);
        }
        if !array.is_empty() {
            arrays.push(array);
        }
    }
    if arrays.is_empty() {
        return Err(Error::Parse { line: 1, column: 1, message: "input holds no arrays".into() });
    }
    Ok(arrays)
}

/// Maximal runs of non-separator characters with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let is_sep = |c: char| c == ',' || c.is_whitespace();
    let mut rest = line.char_indices().peekable();
    std::iter::from_fn(move || {
        while rest.next_if(|&(_, c)| is_sep(c)).is_some() {}
        let &(start, _) = rest.peek()?;
        let mut end = line.len();
        while let Some(&(i, c)) = rest.peek() {
            if is_sep(c) {
                end = i;
                break;
            }
            rest.next();
        }
        let column = line[..start].chars().count() + 1;
        Some((column, &line[start..end]))
    })
}
