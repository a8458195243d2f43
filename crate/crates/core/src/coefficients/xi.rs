use super::{require_n, CoefficientEstimate, CoefficientKind};
use crate::error::{RankError, Result};
use crate::ranks::RankArtifacts;

fn successive_abs_diff(r: &[usize]) -> u64 {
    r.windows(2).map(|w| w[0].abs_diff(w[1]) as u64).sum()
}

/// Chatterjee's coefficient in its tie-aware form:
/// `1 - n * sum|r[i+1] - r[i]| / (2 * sum l[i] (n - l[i]))`.
pub fn xi_n(artifacts: &RankArtifacts) -> Result<CoefficientEstimate> {
    let n = artifacts.n();
    require_n(n, 2)?;
    let denom: u64 = artifacts
        .l
        .iter()
        .map(|&l| (l * (n - l)) as u64)
        .sum();
    if denom == 0 {
        return Err(RankError::DegenerateMarginal);
    }
    let num = n as u64 * successive_abs_diff(&artifacts.r);
    Ok(CoefficientEstimate {
        kind: CoefficientKind::Xi,
        value: 1.0 - num as f64 / (2 * denom) as f64,
        n,
        algorithm: "rank-increments (tie form)",
    })
}

/// The simplified form `1 - 3 * sum|r[i+1] - r[i]| / (n^2 - 1)`, valid only
/// without ties in the second coordinate.
pub fn xi_n_untied(artifacts: &RankArtifacts) -> Result<CoefficientEstimate> {
    let n = artifacts.n();
    require_n(n, 2)?;
    if artifacts.has_ties_x2 {
        return Err(RankError::TiesUnsupported("the untied form of xi needs distinct values"));
    }
    let nn = n as u64;
    Ok(CoefficientEstimate {
        kind: CoefficientKind::Xi,
        value: 1.0 - (3 * successive_abs_diff(&artifacts.r)) as f64 / (nn * nn - 1) as f64,
        n,
        algorithm: "rank-increments (untied form)",
    })
}
