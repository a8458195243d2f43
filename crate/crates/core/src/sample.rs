use crate::error::{RankError, Result};

/// `n` paired real observations `(x1[i], x2[i])`.
///
/// Construction rejects unequal lengths, `n < 2` and non-finite entries, so
/// every estimator can assume a clean, rankable input.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    x1: Vec<f64>,
    x2: Vec<f64>,
}

impl PairedSample {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>) -> Result<Self> {
        if x1.len() != x2.len() {
            return Err(RankError::LengthMismatch {
                x1: x1.len(),
                x2: x2.len(),
            });
        }
        if x1.len() < 2 {
            return Err(RankError::InsufficientData {
                required: 2,
                actual: x1.len(),
            });
        }
        if let Some(index) = x1.iter().position(|v| !v.is_finite()) {
            return Err(RankError::NonFinite { column: "x1", index });
        }
        if let Some(index) = x2.iter().position(|v| !v.is_finite()) {
            return Err(RankError::NonFinite { column: "x2", index });
        }
        Ok(Self { x1, x2 })
    }

    /// Builds a sample from `(x1, x2)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (x1, x2) = pairs.iter().copied().unzip();
        Self::new(x1, x2)
    }

    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }

    /// Returns a copy with the second coordinate replaced; the first is kept.
    pub(crate) fn with_x2(&self, x2: Vec<f64>) -> Self {
        debug_assert_eq!(x2.len(), self.x1.len());
        Self {
            x1: self.x1.clone(),
            x2,
        }
    }

    pub fn has_ties_x1(&self) -> bool {
        has_ties(&self.x1)
    }

    pub fn has_ties_x2(&self) -> bool {
        has_ties(&self.x2)
    }
}

fn has_ties(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}
