//! Null distributions used to calibrate the independence tests.

mod bank_io;
mod diagnostic;
mod empirical;
mod normal;
mod weighted_chisq;

use serde::{Deserialize, Serialize};

pub use bank_io::{read_bank, write_bank, BANK_HEADER_LEN, BANK_MAGIC};
pub use diagnostic::{xi_projection_diagnostic, xi_projection_terms};
pub use empirical::{
    monte_carlo_null, permutation_null, uniform_null_sample, MIN_MONTE_CARLO_REPS, MIN_PERMUTATIONS,
};
pub use normal::{normal_xi_null, standard_normal_cdf, standard_normal_quantile, XI_NULL_VARIANCE};
pub use weighted_chisq::{
    weighted_chisq_null, EigenGrid, EigenKind, DEFAULT_DRAWS, DEFAULT_TRUNCATION, MIN_DRAWS,
    MIN_TRUNCATION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NullKind {
    NormalXi,
    WeightedChisq,
    MonteCarloEmpirical,
    PermutationEmpirical,
}

/// A sorted bank of simulated null statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalBank {
    sorted: Vec<f64>,
}

impl EmpiricalBank {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        Self { sorted: values }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Lower empirical quantile: the order statistic at `ceil(p B)` (1-based).
    pub fn quantile(&self, p: f64) -> f64 {
        let b = self.sorted.len();
        let k = (p.clamp(0.0, 1.0) * b as f64).ceil() as usize;
        self.sorted[k.clamp(1, b) - 1]
    }

    /// Largest `j` with `j / B <= alpha` in floating point, so that
    /// `count / B <= alpha` exactly when `count <= j`.
    fn tail_allowance(&self, alpha: f64, denominator: usize) -> usize {
        let d = denominator as f64;
        let mut j = (alpha * d).floor().max(0.0) as usize;
        while j > 0 && j as f64 / d > alpha {
            j -= 1;
        }
        while ((j + 1) as f64 / d) <= alpha {
            j += 1;
        }
        j
    }

    /// Upper critical value for a one-sided test at level `alpha`: the lower
    /// empirical quantile at `1 - alpha`. A statistic `t` exceeds it exactly
    /// when `#{bank >= t} / B <= alpha`.
    pub fn upper_critical(&self, alpha: f64) -> f64 {
        let b = self.sorted.len();
        let j = self.tail_allowance(alpha, b).min(b - 1);
        self.sorted[b - j - 1]
    }

    /// Critical value matching the `(1 + count) / (B + 1)` p-value: `t`
    /// exceeds it exactly when that p-value is at most `alpha`. Infinite
    /// when no outcome can reach level `alpha`.
    pub fn permutation_critical(&self, alpha: f64) -> f64 {
        let b = self.sorted.len();
        match self.tail_allowance(alpha, b + 1) {
            0 => f64::INFINITY,
            j => self.sorted[b - (j - 1).min(b - 1) - 1],
        }
    }

    /// `#{bank >= x}`.
    pub fn count_at_least(&self, x: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&v| v < x)
    }

    /// Fraction of the bank at or above `x`.
    pub fn upper_tail(&self, x: f64) -> f64 {
        self.count_at_least(x) as f64 / self.sorted.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.sorted.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (self.sorted.len() - 1) as f64
    }
}

/// A limiting or resampled null distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum NullModel {
    /// `√n ξₙ → N(0, variance)`.
    NormalXi { variance: f64 },
    /// Simulated `Σ λ (ξ² - 1)` over a truncated eigenvalue grid.
    WeightedChisq { grid: EigenGrid, bank: EmpiricalBank },
    /// Statistic simulated on independent uniform samples of size `n`;
    /// `settings` records whatever else the statistic depended on.
    MonteCarlo {
        n: usize,
        settings: String,
        bank: EmpiricalBank,
    },
    /// Statistic re-evaluated under random permutations of the second coordinate.
    Permutation { observed: f64, bank: EmpiricalBank },
}

impl NullModel {
    pub fn kind(&self) -> NullKind {
        match self {
            NullModel::NormalXi { .. } => NullKind::NormalXi,
            NullModel::WeightedChisq { .. } => NullKind::WeightedChisq,
            NullModel::MonteCarlo { .. } => NullKind::MonteCarloEmpirical,
            NullModel::Permutation { .. } => NullKind::PermutationEmpirical,
        }
    }

    pub fn bank(&self) -> Option<&EmpiricalBank> {
        match self {
            NullModel::NormalXi { .. } => None,
            NullModel::WeightedChisq { bank, .. }
            | NullModel::MonteCarlo { bank, .. }
            | NullModel::Permutation { bank, .. } => Some(bank),
        }
    }

    /// Quantile function; monotone nondecreasing in `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            NullModel::NormalXi { variance } => variance.sqrt() * standard_normal_quantile(p),
            _ => self.bank().map(|b| b.quantile(p)).unwrap_or(f64::NAN),
        }
    }

    /// The same weighted chi-square draws under another eigenvalue grid.
    /// The grids differ by a constant factor, so this equals rebuilding with
    /// the same seed up to floating-point rounding.
    pub fn rescaled(&self, kind: EigenKind) -> Option<NullModel> {
        let NullModel::WeightedChisq { grid, bank } = self else {
            return None;
        };
        let factor = kind.scale() / grid.kind.scale();
        Some(NullModel::WeightedChisq {
            grid: EigenGrid::new(kind, grid.truncation).ok()?,
            bank: EmpiricalBank::new(bank.values().iter().map(|v| v * factor).collect()),
        })
    }

    /// Permutation p-value `(1 + #{permuted >= observed}) / (P + 1)`.
    pub fn permutation_p_value(&self) -> Option<f64> {
        match self {
            NullModel::Permutation { observed, bank } => {
                Some((1 + bank.count_at_least(*observed)) as f64 / (bank.len() + 1) as f64)
            }
            _ => None,
        }
    }
}
