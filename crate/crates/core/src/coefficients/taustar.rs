//! Bergsma–Dassios–Yanagimoto `τ*ₙ`.
//!
//! Summing the order-4 kernel over the 24 orderings of one 4-point set gives
//! `8 (3 [same] - [both])`, where `[both]` says the set splits strictly into
//! a low pair and a high pair in each coordinate and `[same]` says the two
//! splits are the same partition. With `S` the number of sets with identical
//! splits and `T` the number with different splits,
//! `τ*ₙ = (2S - T) / (3 C(n,4))`. Both counts are accumulated over the
//! first-coordinate low pair of each set, which takes `O(n²)` time.

use super::brute::for_each_distinct_tuple;
use super::{falling_factorial, require_n, CoefficientEstimate, CoefficientKind};
use crate::error::{RankError, Result};
use crate::ranks::dense_ranks;
use crate::sample::PairedSample;

pub(crate) const TAUSTAR_BRUTE_MAX_N: usize = 16;

/// Second-coordinate summaries of the points lying strictly above the
/// current first-coordinate threshold.
struct UpperSet {
    size: u64,
    /// `#{k : ry_k <= t}`
    le: Vec<u64>,
    /// `Σ_{d : ry_d <= t} #{c : ry_c < ry_d}`
    pairs_le: Vec<u64>,
}

impl UpperSet {
    fn new(levels: usize) -> Self {
        Self {
            size: 0,
            le: vec![0; levels],
            pairs_le: vec![0; levels],
        }
    }

    #[inline]
    fn lt(&self, t: usize) -> u64 {
        if t == 0 {
            0
        } else {
            self.le[t - 1]
        }
    }

    fn insert(&mut self, s: usize) {
        let below = self.lt(s);
        let base = self.le[s];
        for t in s..self.le.len() {
            self.pairs_le[t] += below + (self.le[t] - base);
            self.le[t] += 1;
        }
        self.size += 1;
    }
}

/// `τ*ₙ` by exact `O(n²)` pattern counting; ties in either coordinate are
/// handled through strict separations.
pub fn taustar_n(sample: &PairedSample) -> Result<CoefficientEstimate> {
    let n = sample.len();
    require_n(n, 4)?;
    let (rx, _) = dense_ranks(sample.x1());
    let (ry, levels) = dense_ranks(sample.x2());

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| rx[b].cmp(&rx[a]));

    let mut upper = UpperSet::new(levels);
    let mut same: u128 = 0;
    let mut different: u128 = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && rx[idx[end]] == rx[idx[start]] {
            end += 1;
        }
        // every unordered pair whose larger first coordinate lies in this group
        for (gi, &p) in idx[start..end].iter().enumerate() {
            let yp = ry[p];
            for &q in &idx[start + gi + 1..] {
                let yq = ry[q];
                let (lo, hi) = if yp <= yq { (yp, yq) } else { (yq, yp) };
                let above = upper.size - upper.le[hi];
                let below = upper.lt(lo);
                same += (above * above.saturating_sub(1) / 2) as u128;
                same += (below * below.saturating_sub(1) / 2) as u128;
                if lo < hi {
                    let under_hi = upper.lt(hi);
                    different += ((upper.size - under_hi) * under_hi) as u128;
                    different += (upper.pairs_le[hi - 1] - upper.pairs_le[lo]) as u128;
                }
            }
        }
        for &p in &idx[start..end] {
            upper.insert(ry[p]);
        }
        start = end;
    }
    let numerator = 2 * same as i128 - different as i128;
    let sets = falling_factorial(n, 4) / 24;
    Ok(CoefficientEstimate {
        kind: CoefficientKind::TauStar,
        value: numerator as f64 / (3 * sets) as f64,
        n,
        algorithm: "pairwise pattern counting O(n^2)",
    })
}

#[inline]
fn below_both(a: f64, b: f64, c: f64, d: f64) -> i32 {
    (a.max(b) < c.min(d)) as i32
}

#[inline]
fn pattern(v: &[f64], [i1, i2, i3, i4]: [usize; 4]) -> i32 {
    below_both(v[i1], v[i3], v[i2], v[i4]) + below_both(v[i2], v[i4], v[i1], v[i3])
        - below_both(v[i1], v[i4], v[i2], v[i3])
        - below_both(v[i2], v[i3], v[i1], v[i4])
}

/// Literal quadruple sum over ordered 4-tuples of distinct indices.
pub fn taustar_n_brute(sample: &PairedSample) -> Result<CoefficientEstimate> {
    let n = sample.len();
    require_n(n, 4)?;
    if n > TAUSTAR_BRUTE_MAX_N {
        return Err(RankError::TooLargeForBruteForce {
            max: TAUSTAR_BRUTE_MAX_N,
            actual: n,
        });
    }
    let mut total: i64 = 0;
    for_each_distinct_tuple::<4>(n, |t| {
        total += (pattern(sample.x1(), *t) * pattern(sample.x2(), *t)) as i64;
    });
    Ok(CoefficientEstimate {
        kind: CoefficientKind::TauStar,
        value: total as f64 / falling_factorial(n, 4) as f64,
        n,
        algorithm: "brute force (ordered 4-tuples)",
    })
}
