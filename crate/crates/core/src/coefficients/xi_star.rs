use super::kernel::{Kernel, KernelSpec};
use super::{require_n, CoefficientEstimate, CoefficientKind};
use crate::error::{RankError, Result};
use crate::ranks::RankArtifacts;

/// Smallest even `M >= n^{7/16}`, and never below 4.
pub fn default_grid(n: usize) -> usize {
    let m = (n as f64).powf(7.0 / 16.0).ceil() as usize;
    let m = m.max(4);
    m + m % 2
}

/// Composite Simpson rule for `∫₀¹∫₀¹ f` on an `(m+1) x (m+1)` grid.
pub fn simpson_2d(mut f: impl FnMut(f64, f64) -> f64, m: usize) -> Result<f64> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(RankError::InvalidGrid(m));
    }
    let weight = |k: usize| match k {
        0 => 1.0,
        k if k == m => 1.0,
        k if k % 2 == 1 => 4.0,
        _ => 2.0,
    };
    let step = 1.0 / m as f64;
    let mut total = 0.0;
    for a in 0..=m {
        let u1 = a as f64 * step;
        let mut row = 0.0;
        for b in 0..=m {
            row += weight(b) * f(u1, b as f64 * step);
        }
        total += weight(a) * row;
    }
    Ok(total * (step / 3.0) * (step / 3.0))
}

/// `6 ∫∫ ζ² - 2` for an arbitrary integrand, by 2-D Simpson quadrature.
pub fn xi_star_from_integrand(mut zeta: impl FnMut(f64, f64) -> f64, m: usize) -> Result<f64> {
    let q = simpson_2d(
        |u1, u2| {
            let z = zeta(u1, u2);
            z * z
        },
        m,
    )?;
    Ok(6.0 * q - 2.0)
}

fn zeta_scaled<K: Kernel>(r_scaled: &[f64], spec: &KernelSpec<K>, u1: f64, u2: f64) -> f64 {
    let n = r_scaled.len();
    let nf = n as f64;
    // only i with |u1 - i/n| < h1 contribute
    let lo = ((u1 - spec.h1) * nf).floor().max(1.0) as usize;
    let hi = (((u1 + spec.h1) * nf).ceil() as usize).min(n);
    let mut sum = 0.0;
    for i in lo..=hi {
        let k = spec.kernel.density((u1 - i as f64 / nf) / spec.h1);
        if k != 0.0 {
            sum += k * spec.kernel.cdf((u2 - r_scaled[i - 1]) / spec.h2);
        }
    }
    sum / (nf * spec.h1)
}

fn scaled_ranks(artifacts: &RankArtifacts) -> Result<Vec<f64>> {
    if artifacts.has_ties_x2 {
        return Err(RankError::TiesUnsupported("the kernel estimator of xi* needs distinct ranks"));
    }
    let n = artifacts.n() as f64;
    Ok(artifacts.r.iter().map(|&r| r as f64 / n).collect())
}

/// Kernel estimate of the copula's first partial derivative at `(u1, u2)`:
/// `(1/(n h1)) Σ K((u1 - i/n)/h1) K̄((u2 - r[i]/n)/h2)`.
pub fn zeta_n<K: Kernel>(
    artifacts: &RankArtifacts,
    spec: &KernelSpec<K>,
    u1: f64,
    u2: f64,
) -> Result<f64> {
    let r_scaled = scaled_ranks(artifacts)?;
    Ok(zeta_scaled(&r_scaled, spec, u1, u2))
}

/// Dette–Siburg–Stoimenov coefficient `6 ∫∫ ζₙ² - 2`, integrated with the
/// 2-D Simpson rule on `grid_points_per_axis` intervals per axis. Each grid
/// node costs `O(n h1)` kernel evaluations.
pub fn xi_star_n<K: Kernel>(
    artifacts: &RankArtifacts,
    spec: &KernelSpec<K>,
    grid_points_per_axis: usize,
) -> Result<CoefficientEstimate> {
    let n = artifacts.n();
    require_n(n, 2)?;
    let r_scaled = scaled_ranks(artifacts)?;
    let value = xi_star_from_integrand(
        |u1, u2| zeta_scaled(&r_scaled, spec, u1, u2),
        grid_points_per_axis,
    )?;
    Ok(CoefficientEstimate {
        kind: CoefficientKind::XiStar,
        value,
        n,
        algorithm: "kernel copula derivative + 2-D Simpson",
    })
}
