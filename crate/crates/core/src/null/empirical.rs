use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{EmpiricalBank, NullModel};
use crate::error::{RankError, Result};
use crate::sample::PairedSample;
use crate::seed;

pub const MIN_MONTE_CARLO_REPS: usize = 100;
pub const MIN_PERMUTATIONS: usize = 99;

/// Independent standard uniform pairs, keyed on `(seed, index)`.
pub fn uniform_null_sample(n: usize, seed: u64, index: u64) -> Result<PairedSample> {
    let mut rng = seed::replicate_stream(seed, "uniform-null", index);
    let x1: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let x2: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    PairedSample::new(x1, x2)
}

fn run_replicates<F>(reps: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|i| {
            f(i).map_err(|e| RankError::Replicate {
                index: i,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Bank of `statistic` evaluated on `reps` independent uniform samples of size `n`.
pub fn monte_carlo_null<F>(statistic: F, n: usize, reps: usize, seed: u64) -> Result<NullModel>
where
    F: Fn(&PairedSample) -> Result<f64> + Sync,
{
    if reps < MIN_MONTE_CARLO_REPS {
        return Err(RankError::InvalidDrawCount {
            min: MIN_MONTE_CARLO_REPS,
            actual: reps,
        });
    }
    let values = run_replicates(reps, |i| statistic(&uniform_null_sample(n, seed, i as u64)?))?;
    Ok(NullModel::MonteCarlo {
        n,
        settings: String::new(),
        bank: EmpiricalBank::new(values),
    })
}

/// Bank of `statistic` under `permutations` uniformly random reorderings of
/// `x2`, with `x1` held fixed.
pub fn permutation_null<F>(
    sample: &PairedSample,
    statistic: F,
    permutations: usize,
    seed: u64,
) -> Result<NullModel>
where
    F: Fn(&PairedSample) -> Result<f64> + Sync,
{
    if permutations < MIN_PERMUTATIONS {
        return Err(RankError::InvalidDrawCount {
            min: MIN_PERMUTATIONS,
            actual: permutations,
        });
    }
    let observed = statistic(sample)?;
    let values = run_replicates(permutations, |i| {
        let mut rng = seed::replicate_stream(seed, "permutation", i as u64);
        let mut x2 = sample.x2().to_vec();
        x2.shuffle(&mut rng);
        statistic(&sample.with_x2(x2))
    })?;
    Ok(NullModel::Permutation {
        observed,
        bank: EmpiricalBank::new(values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::xi_n;
    use crate::ranks::compute_rank_artifacts;

    fn xi(sample: &PairedSample) -> Result<f64> {
        Ok(xi_n(&compute_rank_artifacts(sample, 0)?)?.value)
    }

    #[test]
    fn constant_statistic() {
        let null = monte_carlo_null(|_| Ok(2.5), 20, 100, 1).unwrap();
        for p in [0.0, 0.1, 0.5, 0.99, 1.0] {
            assert_eq!(null.quantile(p), 2.5);
        }
        assert_eq!(null.bank().unwrap().len(), 100);
    }

    #[test]
    fn replicate_errors_carry_index() {
        let err = monte_carlo_null(
            |s| if s.x1()[0] > 0.5 { Err(RankError::DegenerateMarginal) } else { Ok(0.0) },
            5,
            100,
            3,
        )
        .unwrap_err();
        assert!(matches!(err, RankError::Replicate { .. }));
        assert!(monte_carlo_null(|_| Ok(0.0), 5, 99, 3).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = monte_carlo_null(xi, 50, 200, 9).unwrap();
        let b = monte_carlo_null(xi, 50, 200, 9).unwrap();
        let c = monte_carlo_null(xi, 50, 200, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invariant_statistic_has_unit_p_value() {
        let s = PairedSample::new((0..10).map(f64::from).collect(), (0..10).map(|i| f64::from(i * 7 % 10)).collect()).unwrap();
        let null = permutation_null(&s, |s| Ok(s.x2().iter().sum()), 99, 4).unwrap();
        assert!(null.bank().unwrap().values().iter().all(|&v| v == 45.0));
        assert_eq!(null.permutation_p_value(), Some(1.0));
    }

    #[test]
    fn p_value_counting_convention() {
        // observed exceeds every permuted value
        let s = PairedSample::new((0..10).map(f64::from).collect(), (0..10).map(f64::from).collect()).unwrap();
        let is_identity = |s: &PairedSample| Ok(if s.x2() == s.x1() { 1.0 } else { 0.0 });
        let null = permutation_null(&s, is_identity, 99, 5).unwrap();
        assert_eq!(null.permutation_p_value(), Some(0.01));
        // observed below every permuted value
        let null = permutation_null(&s, |s| Ok(if s.x2() == s.x1() { -1.0 } else { 0.0 }), 99, 5).unwrap();
        assert_eq!(null.permutation_p_value(), Some(1.0));
        assert!(permutation_null(&s, is_identity, 98, 5).is_err());
    }
}
