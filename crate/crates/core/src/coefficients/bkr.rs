use super::brute::for_each_distinct_tuple;
use super::hoeffding::{anchor_kernel_sum, d_n_fast};
use super::taustar::taustar_n;
use super::{falling_factorial, require_n, CoefficientEstimate, CoefficientKind};
use crate::error::{RankError, Result};
use crate::ranks::{le_counts, RankArtifacts};
use crate::sample::PairedSample;

pub(crate) const R_BRUTE_MAX_N: usize = 12;

/// Blum–Kiefer–Rosenblatt `R_n`.
///
/// Without ties this uses `R_n = (τ*_n - 12 D_n) / 24`; with ties in either
/// coordinate it falls back to [`r_n_pairwise`], which is exact for any input.
pub fn r_n(sample: &PairedSample, artifacts: &RankArtifacts) -> Result<CoefficientEstimate> {
    let n = sample.len();
    require_n(n, 6)?;
    if artifacts.has_ties_x1 || artifacts.has_ties_x2 {
        return r_n_pairwise(sample);
    }
    let tau = taustar_n(sample)?.value;
    let d = d_n_fast(artifacts)?.value;
    Ok(CoefficientEstimate {
        kind: CoefficientKind::R,
        value: (tau - 12.0 * d) / 24.0,
        n,
        algorithm: "(tau* - 12 D) / 24",
    })
}

/// `R_n` in `O(n²)` time: for each ordered anchor pair `(i5, i6)` the other
/// points are classified by `x1 <= x1[i5]` and `x2 <= x2[i6]`, and the inner
/// quadruple sum is the same closed form in the cell counts as for `D_n`.
pub fn r_n_pairwise(sample: &PairedSample) -> Result<CoefficientEstimate> {
    let n = sample.len();
    require_n(n, 6)?;
    let xle = le_counts(sample.x1());
    let yle = le_counts(sample.x2());
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_unstable_by(|&a, &b| sample.x2()[a].total_cmp(&sample.x2()[b]));

    let mut cum = vec![0i64; n + 1];
    let mut total: i128 = 0;
    let rest = n as i64 - 2;
    for m in 0..n {
        let xm = xle[m];
        for (t, &j) in by_y.iter().enumerate() {
            cum[t + 1] = cum[t] + (xle[j] <= xm) as i64;
        }
        for mp in 0..n {
            if mp == m {
                continue;
            }
            let m_in = (yle[m] <= yle[mp]) as i64;
            let mp_in = (xle[mp] <= xm) as i64;
            let n11 = cum[yle[mp]] - m_in - mp_in;
            let first = xm as i64 - 1 - mp_in;
            let second = yle[mp] as i64 - 1 - m_in;
            let n10 = first - n11;
            let n01 = second - n11;
            let n00 = rest - first - second + n11;
            total += anchor_kernel_sum(n11, n10, n01, n00);
        }
    }
    Ok(CoefficientEstimate {
        kind: CoefficientKind::R,
        value: total as f64 / falling_factorial(n, 6) as f64,
        n,
        algorithm: "anchor-pair cell counts O(n^2)",
    })
}

#[inline]
fn le(a: f64, b: f64) -> i32 {
    (a <= b) as i32
}

/// Literal sextuple sum over ordered 6-tuples of distinct indices.
pub fn r_n_brute(sample: &PairedSample) -> Result<CoefficientEstimate> {
    let n = sample.len();
    require_n(n, 6)?;
    if n > R_BRUTE_MAX_N {
        return Err(RankError::TooLargeForBruteForce {
            max: R_BRUTE_MAX_N,
            actual: n,
        });
    }
    let (x, y) = (sample.x1(), sample.x2());
    let mut total: i64 = 0;
    for_each_distinct_tuple::<6>(n, |t| {
        let [i1, i2, i3, i4, i5, i6] = *t;
        let a = (le(x[i1], x[i5]) - le(x[i2], x[i5])) * (le(x[i3], x[i5]) - le(x[i4], x[i5]));
        if a == 0 {
            return;
        }
        let b = (le(y[i1], y[i6]) - le(y[i2], y[i6])) * (le(y[i3], y[i6]) - le(y[i4], y[i6]));
        total += (a * b) as i64;
    });
    Ok(CoefficientEstimate {
        kind: CoefficientKind::R,
        value: total as f64 / (4 * falling_factorial(n, 6)) as f64,
        n,
        algorithm: "brute force (ordered 6-tuples)",
    })
}
