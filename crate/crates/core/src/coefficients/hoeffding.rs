use super::brute::for_each_distinct_tuple;
use super::{falling_factorial, require_n, CoefficientEstimate, CoefficientKind};
use crate::error::{RankError, Result};
use crate::ranks::RankArtifacts;
use crate::sample::PairedSample;

pub(crate) const D_BRUTE_MAX_N: usize = 14;

/// Fenwick tree over `1..=n` holding counts.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize) {
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, mut i: usize) -> u32 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Sum over ordered disjoint index pairs `(i1,i2),(i3,i4)` of the two
/// bracket products, divided by 4, given the 2x2 cell counts of the other
/// observations relative to an anchor (`n11`: both coordinates `<=`).
#[inline]
pub(crate) fn anchor_kernel_sum(n11: i64, n10: i64, n01: i64, n00: i64) -> i128 {
    let concordant = (n11 * n00) as i128 * ((n11 - 1) * (n00 - 1)) as i128;
    let discordant = (n10 * n01) as i128 * ((n10 - 1) * (n01 - 1)) as i128;
    concordant + discordant - 2 * (n11 * n00) as i128 * (n10 * n01) as i128
}

/// Hoeffding's `D_n` from the rank artifacts in `O(n log n)`.
///
/// For every anchor `i5` the remaining points fall into four cells according
/// to `x1 <= x1[i5]` and `x2 <= x2[i5]`; the inner quadruple sum then has a
/// closed form in the cell counts. The `n11` counts come from one sweep over
/// the first-coordinate order with a Fenwick tree on `r`. Ties in either
/// coordinate are handled exactly.
pub fn d_n_fast(artifacts: &RankArtifacts) -> Result<CoefficientEstimate> {
    let n = artifacts.n();
    require_n(n, 5)?;
    let mut tree = Fenwick::new(n);
    let mut total: i128 = 0;
    let mut start = 0;
    while start < n {
        let end = artifacts.x1_le[start];
        for p in start..end {
            tree.add(artifacts.r[p]);
        }
        for p in start..end {
            let both = tree.prefix(artifacts.r[p]) as i64 - 1;
            let first = end as i64 - 1;
            let second = artifacts.r[p] as i64 - 1;
            let n10 = first - both;
            let n01 = second - both;
            let n00 = n as i64 - 1 - first - second + both;
            total += anchor_kernel_sum(both, n10, n01, n00);
        }
        start = end;
    }
    Ok(CoefficientEstimate {
        kind: CoefficientKind::D,
        value: total as f64 / falling_factorial(n, 5) as f64,
        n,
        algorithm: "anchor cell counts (Fenwick sweep)",
    })
}

#[inline]
fn le(a: f64, b: f64) -> i32 {
    (a <= b) as i32
}

/// Literal quintuple sum over ordered 5-tuples of distinct indices.
pub fn d_n_brute(sample: &PairedSample) -> Result<CoefficientEstimate> {
    let n = sample.len();
    require_n(n, 5)?;
    if n > D_BRUTE_MAX_N {
        return Err(RankError::TooLargeForBruteForce {
            max: D_BRUTE_MAX_N,
            actual: n,
        });
    }
    let (x, y) = (sample.x1(), sample.x2());
    let mut total: i64 = 0;
    for_each_distinct_tuple::<5>(n, |t| {
        let [i1, i2, i3, i4, i5] = *t;
        let a = (le(x[i1], x[i5]) - le(x[i2], x[i5])) * (le(x[i3], x[i5]) - le(x[i4], x[i5]));
        let b = (le(y[i1], y[i5]) - le(y[i2], y[i5])) * (le(y[i3], y[i5]) - le(y[i4], y[i5]));
        total += (a * b) as i64;
    });
    Ok(CoefficientEstimate {
        kind: CoefficientKind::D,
        value: total as f64 / (4 * falling_factorial(n, 5)) as f64,
        n,
        algorithm: "brute force (ordered 5-tuples)",
    })
}
