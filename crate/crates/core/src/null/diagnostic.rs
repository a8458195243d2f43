use crate::error::{RankError, Result};
use crate::ranks::RankArtifacts;

/// Summands `Ξ[i] = |F[i+1] - F[i]| + F[i+1](1 - F[i+1]) + F[i](1 - F[i]) - 2/3`
/// with `F` the empirical distribution of `x2` along the `x1` order.
pub fn xi_projection_terms(artifacts: &RankArtifacts) -> Result<Vec<f64>> {
    if artifacts.has_ties_x2 {
        return Err(RankError::TiesUnsupported(
            "the projection diagnostic needs a continuous second margin",
        ));
    }
    let n = artifacts.n() as f64;
    let f: Vec<f64> = artifacts.r.iter().map(|&r| r as f64 / n).collect();
    Ok(f.windows(2)
        .map(|w| (w[1] - w[0]).abs() + w[1] * (1.0 - w[1]) + w[0] * (1.0 - w[0]) - 2.0 / 3.0)
        .collect())
}

/// `n^{-1/2} Σ Ξ[i]`; under independence this tracks `-√n ξₙ / 3`.
pub fn xi_projection_diagnostic(artifacts: &RankArtifacts) -> Result<f64> {
    let terms = xi_projection_terms(artifacts)?;
    Ok(terms.iter().sum::<f64>() / (artifacts.n() as f64).sqrt())
}
