//! Totally ordered score keys and multiset comparison.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// A finite real-valued score.
///
/// NaN and infinities are rejected at construction so that every
/// `ScoreKey` participates in a total order.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct ScoreKey(f64);

impl ScoreKey {
    pub const ZERO: ScoreKey = ScoreKey(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(ScoreKey(value))
        } else {
            Err(Error::NonFinite(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl Eq for ScoreKey {}

impl Ord for ScoreKey {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        // Both sides are finite, so partial_cmp never fails. -0.0 == 0.0.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for ScoreKey {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ScoreKey {
    type Output = ScoreKey;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        let sum = self.0 + rhs.0;
        debug_assert!(sum.is_finite(), "score sum overflowed: {} + {}", self.0, rhs.0);
        ScoreKey(sum)
    }
}

impl Sub for ScoreKey {
    type Output = ScoreKey;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let diff = self.0 - rhs.0;
        debug_assert!(diff.is_finite(), "score difference overflowed");
        ScoreKey(diff)
    }
}

impl TryFrom<f64> for ScoreKey {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        ScoreKey::new(value)
    }
}

impl From<ScoreKey> for f64 {
    fn from(key: ScoreKey) -> f64 {
        key.0
    }
}

impl fmt::Debug for ScoreKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for ScoreKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Converts a slice of raw floats into score keys, failing on the first
/// non-finite value.
pub fn keys(values: &[f64]) -> Result<Vec<ScoreKey>> {
    values.iter().map(|&v| ScoreKey::new(v)).collect()
}

/// An unordered collection of scores with multiplicity.
///
/// Equality ignores order and respects multiplicity. Items are kept in
/// whatever order they were produced; comparisons sort a copy.
#[derive(Clone, Default)]
pub struct Multiset {
    items: Vec<ScoreKey>,
}

impl Multiset {
    pub fn new(items: Vec<ScoreKey>) -> Self {
        Multiset { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[ScoreKey] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<ScoreKey> {
        self.items
    }

    /// The items in nondecreasing order.
    pub fn sorted(&self) -> Vec<ScoreKey> {
        let mut items = self.items.clone();
        items.sort_unstable();
        items
    }

    pub fn max(&self) -> Option<ScoreKey> {
        self.items.iter().copied().max()
    }

    /// Multiset equality up to a floating-point tolerance.
    ///
    /// Items are paired after sorting; each pair must agree within
    /// `tolerance * max(1, |a|, |b|)`. Used where the two sides summed the
    /// same terms in a different association order.
    pub fn approx_eq(&self, other: &Multiset, tolerance: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        self.sorted().iter().zip(other.sorted()).all(|(a, b)| {
            let (a, b) = (a.value(), b.value());
            let scale = 1f64.max(a.abs()).max(b.abs());
            (a - b).abs() <= tolerance * scale
        })
    }
}

impl PartialEq for Multiset {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.sorted() == other.sorted()
    }
}

impl Eq for Multiset {}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sorted()).finish()
    }
}

impl From<Vec<ScoreKey>> for Multiset {
    fn from(items: Vec<ScoreKey>) -> Self {
        Multiset::new(items)
    }
}

impl FromIterator<ScoreKey> for Multiset {
    fn from_iter<I: IntoIterator<Item = ScoreKey>>(iter: I) -> Self {
        Multiset::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(values: &[f64]) -> Multiset {
        keys(values).unwrap().into()
    }

    #[test]
    fn rejects_nan_and_infinity() {
        assert!(matches!(ScoreKey::new(f64::NAN), Err(Error::NonFinite(_))));
        assert!(ScoreKey::new(f64::INFINITY).is_err());
        assert!(ScoreKey::new(f64::NEG_INFINITY).is_err());
        assert!(ScoreKey::new(-3.5).is_ok());
    }

    #[test]
    fn total_order() {
        let mut v = keys(&[3.0, -1.0, 0.0, -0.0, 2.5]).unwrap();
        v.sort();
        assert_eq!(v[0].value(), -1.0);
        assert_eq!(v[4].value(), 3.0);
        assert_eq!(ScoreKey::new(0.0).unwrap(), ScoreKey::new(-0.0).unwrap());
    }

    #[test]
    fn multiset_equality_is_order_insensitive_and_counts_multiplicity() {
        assert_eq!(ms(&[1.0, 2.0, 2.0]), ms(&[2.0, 1.0, 2.0]));
        assert_ne!(ms(&[1.0, 2.0, 2.0]), ms(&[1.0, 1.0, 2.0]));
        assert_ne!(ms(&[1.0, 2.0]), ms(&[1.0, 2.0, 2.0]));
    }

    #[test]
    fn approx_equality() {
        assert!(ms(&[0.1 + 0.2, 1.0]).approx_eq(&ms(&[1.0, 0.3]), 1e-12));
        assert!(!ms(&[0.3, 1.0]).approx_eq(&ms(&[0.31, 1.0]), 1e-12));
    }
}
