//! Sign-vector labels.

use alloc::vec::Vec;

use crate::{Error, Result};

/// A vector over `{-1, +1}`: the hidden community labels and every
/// estimate of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    entries: Vec<i8>,
}

impl LabelVector {
    /// Validates that every entry is `-1` or `+1`.
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidParameter("label entries must be -1 or +1"));
        }
        Ok(LabelVector { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> i8 {
        self.entries[i]
    }

    /// The globally flipped vector `-eta`.
    pub fn flipped(&self) -> Self {
        LabelVector {
            entries: self.entries.iter().map(|&e| -e).collect(),
        }
    }

    /// Inner product with another label vector, in `[-n, n]`.
    pub fn dot(&self, other: &LabelVector) -> i64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a as i64) * (b as i64))
            .sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&e| e as f64).collect()
    }
}

/// Entrywise sign with the convention `sign(0) := +1`.
pub fn sign_vec(x: &[f64]) -> LabelVector {
    LabelVector {
        entries: x.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect(),
    }
}
