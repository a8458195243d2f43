//! Tests of independence built on the coefficients and their nulls.
//!
//! All rejections use strict inequalities: a statistic sitting exactly on
//! the critical value is not rejected.

use serde::Serialize;

use crate::coefficients::{
    default_grid, estimate, xi_n, xi_star_n, CoefficientKind, Kernel, KernelSpec,
};
use crate::error::{RankError, Result};
use crate::null::{
    monte_carlo_null, normal_xi_null, permutation_null, standard_normal_cdf, EigenKind, NullKind, NullModel, XI_NULL_VARIANCE,
};
use crate::ranks::compute_rank_artifacts;
use crate::sample::PairedSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub kind: CoefficientKind,
    /// The quantity compared with `critical_value`: `√n ξₙ`, `n μₙ`, or the
    /// raw coefficient for empirical nulls (`|ξₙ|` for permuted ξ).
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub null_kind: NullKind,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(RankError::InvalidAlpha(alpha))
    }
}

fn require_no_ties(sample: &PairedSample, what: &'static str) -> Result<()> {
    if sample.has_ties_x1() || sample.has_ties_x2() {
        Err(RankError::TiesUnsupported(what))
    } else {
        Ok(())
    }
}

/// Two-sided asymptotic test: reject when `√n |ξₙ| > √(2/5) z_{1-α/2}`.
pub fn test_xi(sample: &PairedSample, alpha: f64, seed: u64) -> Result<TestResult> {
    check_alpha(alpha)?;
    if sample.has_ties_x2() {
        return Err(RankError::TiesUnsupported(
            "the normal limit of xi needs a continuous second margin; use the permutation test",
        ));
    }
    let artifacts = compute_rank_artifacts(sample, seed)?;
    let xi = xi_n(&artifacts)?.value;
    let statistic = (sample.len() as f64).sqrt() * xi;
    let null = normal_xi_null();
    let critical_value = null.quantile(1.0 - alpha / 2.0);
    let sd = XI_NULL_VARIANCE.sqrt();
    let p_value = (2.0 * (1.0 - standard_normal_cdf(statistic.abs() / sd))).clamp(0.0, 1.0);
    Ok(TestResult {
        kind: CoefficientKind::Xi,
        statistic,
        critical_value,
        p_value,
        reject: statistic.abs() > critical_value,
        alpha,
        null_kind: null.kind(),
    })
}

/// The eigenvalue grid whose limit applies to `n μₙ`.
pub fn eigen_kind_for(kind: CoefficientKind) -> Option<EigenKind> {
    match kind {
        CoefficientKind::D | CoefficientKind::R => Some(EigenKind::DOrR),
        CoefficientKind::TauStar => Some(EigenKind::TauStar),
        CoefficientKind::Xi | CoefficientKind::XiStar => None,
    }
}

/// One-sided asymptotic test: reject when `n μₙ` exceeds the bank's
/// `(1-α)` quantile; the p-value is the bank's upper-tail frequency.
pub fn test_mu(
    sample: &PairedSample,
    kind: CoefficientKind,
    alpha: f64,
    null: &NullModel,
    seed: u64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    let expected = eigen_kind_for(kind).ok_or_else(|| {
        RankError::KindMismatch(format!("{kind} has no weighted chi-square limit"))
    })?;
    let NullModel::WeightedChisq { grid, bank } = null else {
        return Err(RankError::KindMismatch(format!(
            "{kind} needs a weighted chi-square null, got {:?}",
            null.kind()
        )));
    };
    if grid.kind != expected {
        return Err(RankError::KindMismatch(format!(
            "{kind} needs the {expected:?} grid, got {:?}",
            grid.kind
        )));
    }
    require_no_ties(sample, "the weighted chi-square limit assumes continuous margins")?;
    let mu = estimate(kind, sample, seed)?.value;
    let statistic = sample.len() as f64 * mu;
    let critical_value = bank.upper_critical(alpha);
    Ok(TestResult {
        kind,
        statistic,
        critical_value,
        p_value: bank.upper_tail(statistic),
        reject: statistic > critical_value,
        alpha,
        null_kind: NullKind::WeightedChisq,
    })
}

/// Identifies the estimator settings a ξ* Monte Carlo null was built with.
pub fn xi_star_settings<K: Kernel>(spec: &KernelSpec<K>, grid: usize) -> String {
    format!(
        "{} h1={:e} h2={:e} grid={grid}",
        spec.kernel.name(),
        spec.h1,
        spec.h2
    )
}

/// Monte Carlo null of ξ*ₙ at sample size `n` with the given settings.
pub fn xi_star_null<K: Kernel>(
    n: usize,
    spec: &KernelSpec<K>,
    grid: usize,
    reps: usize,
    seed: u64,
) -> Result<NullModel> {
    let statistic = |s: &PairedSample| Ok(xi_star_n(&compute_rank_artifacts(s, 0)?, spec, grid)?.value);
    match monte_carlo_null(statistic, n, reps, seed)? {
        NullModel::MonteCarlo { n, bank, .. } => Ok(NullModel::MonteCarlo {
            n,
            settings: xi_star_settings(spec, grid),
            bank,
        }),
        _ => unreachable!("monte_carlo_null returns a Monte Carlo model"),
    }
}

/// As [`xi_star_null`] with the default kernel, bandwidths and grid for `n`.
pub fn default_xi_star_null(n: usize, reps: usize, seed: u64) -> Result<NullModel> {
    xi_star_null(n, &KernelSpec::default_for(n), default_grid(n), reps, seed)
}

/// One-sided Monte Carlo test: reject when ξ*ₙ exceeds the null bank's
/// `(1-α)` quantile. The grid is the default for the sample size.
pub fn test_xi_star<K: Kernel>(
    sample: &PairedSample,
    alpha: f64,
    spec: &KernelSpec<K>,
    null: &NullModel,
    seed: u64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    let n = sample.len();
    let grid = default_grid(n);
    let NullModel::MonteCarlo {
        n: null_n,
        settings,
        bank,
    } = null
    else {
        return Err(RankError::NullMismatch(format!(
            "xi* needs a Monte Carlo null, got {:?}",
            null.kind()
        )));
    };
    let wanted = xi_star_settings(spec, grid);
    if *null_n != n || *settings != wanted {
        return Err(RankError::NullMismatch(format!(
            "null built for n={null_n} [{settings}], sample has n={n} [{wanted}]"
        )));
    }
    require_no_ties(sample, "the xi* Monte Carlo null assumes continuous margins")?;
    let statistic = xi_star_n(&compute_rank_artifacts(sample, seed)?, spec, grid)?.value;
    let critical_value = bank.upper_critical(alpha);
    Ok(TestResult {
        kind: CoefficientKind::XiStar,
        statistic,
        critical_value,
        p_value: bank.upper_tail(statistic),
        reject: statistic > critical_value,
        alpha,
        null_kind: NullKind::MonteCarloEmpirical,
    })
}

/// Permutation test; one-sided for every coefficient except ξ, which is
/// tested two-sided through `|ξₙ|`. Ties are allowed.
pub fn test_permutation(
    sample: &PairedSample,
    kind: CoefficientKind,
    alpha: f64,
    permutations: usize,
    seed: u64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    let statistic = |s: &PairedSample| {
        let v = estimate(kind, s, seed)?.value;
        Ok(if kind == CoefficientKind::Xi { v.abs() } else { v })
    };
    let null = permutation_null(sample, statistic, permutations, seed)?;
    let NullModel::Permutation { observed, bank } = &null else {
        unreachable!("permutation_null returns a permutation model");
    };
    let critical_value = bank.permutation_critical(alpha);
    Ok(TestResult {
        kind,
        statistic: *observed,
        critical_value,
        p_value: null.permutation_p_value().expect("permutation model"),
        reject: *observed > critical_value,
        alpha,
        null_kind: NullKind::PermutationEmpirical,
    })
}

/// Routes to the asymptotic test where its null applies and to the
/// permutation test otherwise (ties, or no prebuilt null for ξ*).
pub fn test_auto(
    sample: &PairedSample,
    kind: CoefficientKind,
    alpha: f64,
    null: Option<&NullModel>,
    permutations: usize,
    seed: u64,
) -> Result<TestResult> {
    let tied = sample.has_ties_x1() || sample.has_ties_x2();
    match (kind, null) {
        (CoefficientKind::Xi, _) if !sample.has_ties_x2() => test_xi(sample, alpha, seed),
        (CoefficientKind::XiStar, Some(null)) if !tied => {
            test_xi_star(sample, alpha, &KernelSpec::default_for(sample.len()), null, seed)
        }
        (CoefficientKind::D | CoefficientKind::R | CoefficientKind::TauStar, Some(null)) if !tied => {
            test_mu(sample, kind, alpha, null, seed)
        }
        _ => test_permutation(sample, kind, alpha, permutations, seed),
    }
}
