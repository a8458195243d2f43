//! Limits of the form `Σ_{v1,v2} λ_{v1,v2} (ξ²_{v1,v2} - 1)`.
//!
//! `λ` depends on `(v1, v2)` only through `k = v1 v2`, so the `d_k` terms
//! sharing a weight sum to `λ_k (χ²_{d_k} - d_k)`. Sampling one chi-square
//! per distinct product draws from exactly the same distribution as
//! sampling every normal, with roughly a third of the draws.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EmpiricalBank, NullModel};
use crate::error::{RankError, Result};
use crate::seed;

pub const MIN_TRUNCATION: usize = 50;
pub const MIN_DRAWS: usize = 100_000;
pub const DEFAULT_TRUNCATION: usize = 100;
pub const DEFAULT_DRAWS: usize = 1_000_000;

const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EigenKind {
    /// Shared by Hoeffding's D and Blum–Kiefer–Rosenblatt's R.
    DOrR,
    TauStar,
}

impl EigenKind {
    /// Numerator of `λ = c / (π⁴ v1² v2²)`.
    pub fn scale(self) -> f64 {
        match self {
            EigenKind::DOrR => 1.0,
            EigenKind::TauStar => 36.0,
        }
    }

    /// `Σλ` over all `v1, v2 >= 1`.
    pub fn full_weight_sum(self) -> f64 {
        self.scale() / 36.0
    }

    /// `Σλ²` over all `v1, v2 >= 1`.
    pub fn full_weight_square_sum(self) -> f64 {
        self.scale() * self.scale() / 8100.0
    }

    pub(crate) fn code(self) -> u32 {
        match self {
            EigenKind::DOrR => 0,
            EigenKind::TauStar => 1,
        }
    }

    pub(crate) fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(EigenKind::DOrR),
            1 => Some(EigenKind::TauStar),
            _ => None,
        }
    }
}

/// The truncated eigenvalue grid `λ_{v1,v2}`, `1 <= v1, v2 <= V`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGrid {
    pub kind: EigenKind,
    pub truncation: usize,
    weights: Vec<f64>,
}

impl EigenGrid {
    pub fn new(kind: EigenKind, truncation: usize) -> Result<Self> {
        if truncation < MIN_TRUNCATION {
            return Err(RankError::InvalidTruncation {
                min: MIN_TRUNCATION,
                actual: truncation,
            });
        }
        let c = kind.scale() / PI.powi(4);
        let weights = (1..=truncation)
            .flat_map(|a| (1..=truncation).map(move |b| c / ((a * a * b * b) as f64)))
            .collect();
        Ok(Self {
            kind,
            truncation,
            weights,
        })
    }

    /// `λ_{v1,v2}` for 1-based indices.
    pub fn weight(&self, v1: usize, v2: usize) -> f64 {
        self.weights[(v1 - 1) * self.truncation + (v2 - 1)]
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight_square_sum(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// Upper bound on `Σλ²` over the omitted indices, from `Σ_{v>V} v⁻⁴ < 1/(3V³)`.
    /// This is the variance (up to the factor 2) of the dropped remainder.
    pub fn omitted_square_sum_bound(&self) -> f64 {
        let c = self.kind.scale() / PI.powi(4);
        let zeta4 = PI.powi(4) / 90.0;
        let tail4 = 1.0 / (3.0 * (self.truncation as f64).powi(3));
        c * c * (2.0 * zeta4 * tail4 + tail4 * tail4)
    }

    /// Distinct weights with their multiplicities.
    fn grouped(&self) -> Vec<(f64, usize)> {
        let mut by_product: BTreeMap<usize, usize> = BTreeMap::new();
        for a in 1..=self.truncation {
            for b in 1..=self.truncation {
                *by_product.entry(a * b).or_default() += 1;
            }
        }
        let c = self.kind.scale() / PI.powi(4);
        by_product
            .into_iter()
            .map(|(k, d)| (c / ((k * k) as f64), d))
            .collect()
    }
}

enum Term {
    Single(f64),
    Pooled(f64, f64, ChiSquared<f64>),
}

fn draw_block(terms: &[Term], count: usize, block: u64, seed: u64) -> Vec<f64> {
    let mut rng = seed::replicate_stream(seed, "weighted-chisq-bank", block);
    (0..count)
        .map(|_| {
            // small weights first so the large terms are added last
            terms
                .iter()
                .rev()
                .map(|t| match t {
                    Term::Single(w) => {
                        let z: f64 = rng.sample(StandardNormal);
                        w * (z * z - 1.0)
                    }
                    Term::Pooled(w, d, chi) => w * (chi.sample(&mut rng) - d),
                })
                .sum()
        })
        .collect()
}

/// Simulates `draws` realizations of the truncated weighted chi-square limit.
///
/// Work is split into fixed-size blocks seeded by `(seed, block index)`, so
/// the bank does not depend on the number of worker threads.
pub fn weighted_chisq_null(
    kind: EigenKind,
    truncation: usize,
    draws: usize,
    seed: u64,
) -> Result<NullModel> {
    let grid = EigenGrid::new(kind, truncation)?;
    if draws < MIN_DRAWS {
        return Err(RankError::InvalidDrawCount {
            min: MIN_DRAWS,
            actual: draws,
        });
    }
    let terms: Vec<Term> = grid
        .grouped()
        .into_iter()
        .map(|(w, d)| match d {
            1 => Term::Single(w),
            d => Term::Pooled(w, d as f64, ChiSquared::new(d as f64).expect("positive dof")),
        })
        .collect();
    let blocks = draws.div_ceil(BLOCK);
    let values: Vec<f64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let count = BLOCK.min(draws - b * BLOCK);
            draw_block(&terms, count, b as u64, seed)
        })
        .collect();
    Ok(NullModel::WeightedChisq {
        grid,
        bank: EmpiricalBank::new(values),
    })
}
