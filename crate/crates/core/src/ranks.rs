//! Orderings, rank counts and tie bookkeeping shared by every estimator.

use rand::Rng;

use crate::error::{RankError, Result};
use crate::sample::PairedSample;
use crate::seed;

/// Ranks of a sample after sorting by the first coordinate.
///
/// Positions are 0-based: `order[i]` is the sample index of the `i`-th
/// smallest first coordinate, and `r[i]`, `l[i]` refer to that observation:
///
/// * `r[i] = #{j : x2[order[j]] <= x2[order[i]]}`
/// * `l[i] = #{j : x2[order[j]] >= x2[order[i]]}`
///
/// `x1_le[i] = #{j : x1[j] <= x1[order[i]]}` keeps the first-coordinate tie
/// structure that the randomized ordering hides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankArtifacts {
    pub order: Vec<usize>,
    pub r: Vec<usize>,
    pub l: Vec<usize>,
    pub x1_le: Vec<usize>,
    pub has_ties_x1: bool,
    pub has_ties_x2: bool,
}

impl RankArtifacts {
    pub fn n(&self) -> usize {
        self.order.len()
    }
}

/// Sorts by `x1`, breaking ties with a seeded shuffle, and counts ranks of `x2`.
///
/// The tie-break stream is keyed on `(seed, "x1-ties")`, so every estimator
/// fed the same seed sees the same ordering.
pub fn compute_rank_artifacts(sample: &PairedSample, seed: u64) -> Result<RankArtifacts> {
    let n = sample.len();
    if n < 2 {
        return Err(RankError::InsufficientData {
            required: 2,
            actual: n,
        });
    }
    let x1 = sample.x1();
    let x2 = sample.x2();

    let mut rng = seed::stream(seed, "x1-ties");
    let keys: Vec<u64> = (0..n).map(|_| rng.random()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        x1[a]
            .total_cmp(&x1[b])
            .then(keys[a].cmp(&keys[b]))
            .then(a.cmp(&b))
    });

    let mut x1_le = vec![0; n];
    let mut has_ties_x1 = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && x1[order[end]] == x1[order[start]] {
            end += 1;
        }
        has_ties_x1 |= end - start > 1;
        x1_le[start..end].fill(end);
        start = end;
    }

    let mut sorted_x2 = x2.to_vec();
    sorted_x2.sort_unstable_by(f64::total_cmp);
    let has_ties_x2 = sorted_x2.windows(2).any(|w| w[0] == w[1]);

    let (r, l) = order
        .iter()
        .map(|&k| {
            let y = x2[k];
            let le = sorted_x2.partition_point(|&v| v <= y);
            let lt = sorted_x2.partition_point(|&v| v < y);
            (le, n - lt)
        })
        .unzip();

    Ok(RankArtifacts {
        order,
        r,
        l,
        x1_le,
        has_ties_x1,
        has_ties_x2,
    })
}

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn midranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(RankError::InsufficientData {
            required: 1,
            actual: 0,
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(RankError::NonFinite {
            column: "values",
            index,
        });
    }
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end, averaged
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &idx[start..end] {
            out[k] = avg;
        }
        start = end;
    }
    Ok(out)
}

/// `#{j : v[j] <= v[i]}` for every `i`, in input order.
pub(crate) fn le_counts(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    values
        .iter()
        .map(|&v| sorted.partition_point(|&s| s <= v))
        .collect()
}

/// Dense ranks `0..k` (equal values share a rank) and the number of distinct values.
pub(crate) fn dense_ranks(values: &[f64]) -> (Vec<usize>, usize) {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted.dedup();
    let ranks = values
        .iter()
        .map(|&v| sorted.partition_point(|&s| s < v))
        .collect();
    (ranks, sorted.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(x1: &[f64], x2: &[f64]) -> PairedSample {
        PairedSample::new(x1.to_vec(), x2.to_vec()).unwrap()
    }

    /// Literal O(n^2) evaluation of the r / l definitions.
    fn naive_counts(s: &PairedSample, order: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let y: Vec<f64> = order.iter().map(|&k| s.x2()[k]).collect();
        let r = y.iter().map(|&a| y.iter().filter(|&&b| b <= a).count()).collect();
        let l = y.iter().map(|&a| y.iter().filter(|&&b| b >= a).count()).collect();
        (r, l)
    }

    #[test]
    fn distinct_example() {
        let a = compute_rank_artifacts(&sample(&[1.0, 2.0, 3.0], &[10.0, 30.0, 20.0]), 0).unwrap();
        assert_eq!(a.order, vec![0, 1, 2]);
        assert_eq!(a.r, vec![1, 3, 2]);
        assert_eq!(a.l, vec![3, 1, 2]);
        assert!(!a.has_ties_x1 && !a.has_ties_x2);
    }

    #[test]
    fn constant_second_coordinate() {
        let a = compute_rank_artifacts(&sample(&[3.0, 1.0, 2.0], &[5.0, 5.0, 5.0]), 0).unwrap();
        assert_eq!(a.order, vec![1, 2, 0]);
        assert_eq!(a.r, vec![3, 3, 3]);
        assert_eq!(a.l, vec![3, 3, 3]);
        assert!(a.has_ties_x2);
        assert!(!a.has_ties_x1);
    }

    #[test]
    fn tie_break_depends_on_seed() {
        let s = sample(&[1.0, 1.0], &[1.0, 2.0]);
        let orders: std::collections::HashSet<Vec<usize>> = (0..32)
            .map(|seed| compute_rank_artifacts(&s, seed).unwrap().order)
            .collect();
        assert_eq!(orders.len(), 2);
        for seed in 0..32 {
            let a = compute_rank_artifacts(&s, seed).unwrap();
            let (r, l) = naive_counts(&s, &a.order);
            assert_eq!(a.r, r);
            assert_eq!(a.l, l);
            assert!(a.has_ties_x1);
            assert_eq!(a.x1_le, vec![2, 2]);
        }
    }

    #[test]
    fn midrank_examples() {
        assert_eq!(midranks(&[10.0, 20.0, 30.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(midranks(&[5.0, 5.0, 7.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert_eq!(midranks(&[2.0; 4]).unwrap(), vec![2.5; 4]);
        assert!(matches!(
            midranks(&[]),
            Err(RankError::InsufficientData { .. })
        ));
    }

    #[test]
    fn dense_and_le() {
        let v = [3.0, 1.0, 3.0, 2.0];
        assert_eq!(le_counts(&v), vec![4, 1, 4, 2]);
        assert_eq!(dense_ranks(&v), (vec![2, 0, 2, 1], 3));
    }

    fn pairs(max_n: usize, levels: i32) -> impl Strategy<Value = Vec<(i32, i32)>> {
        prop::collection::vec((0..levels, 0..levels), 2..max_n)
    }

    proptest! {
        #[test]
        fn fast_counts_match_definition(p in pairs(40, 12), seed in any::<u64>()) {
            let (x1, x2): (Vec<f64>, Vec<f64>) =
                p.iter().map(|&(a, b)| (a as f64, b as f64)).unzip();
            let s = PairedSample::new(x1.clone(), x2).unwrap();
            let a = compute_rank_artifacts(&s, seed).unwrap();
            let (r, l) = naive_counts(&s, &a.order);
            prop_assert_eq!(&a.r, &r);
            prop_assert_eq!(&a.l, &l);
            for w in a.order.windows(2) {
                prop_assert!(x1[w[0]] <= x1[w[1]]);
            }
            for (i, &k) in a.order.iter().enumerate() {
                prop_assert_eq!(a.x1_le[i], x1.iter().filter(|&&v| v <= x1[k]).count());
            }
            prop_assert_eq!(a.has_ties_x2, s.has_ties_x2());
            prop_assert_eq!(a.has_ties_x1, s.has_ties_x1());
            prop_assert_eq!(&a, &compute_rank_artifacts(&s, seed).unwrap());
        }

        #[test]
        fn complement_without_ties(perm in Just((0..30).collect::<Vec<usize>>()).prop_shuffle()) {
            let n = perm.len();
            let s = PairedSample::new(
                (0..n).map(|i| i as f64).collect(),
                perm.iter().map(|&v| v as f64).collect(),
            ).unwrap();
            let a = compute_rank_artifacts(&s, 1).unwrap();
            let mut sorted = a.r.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (1..=n).collect::<Vec<_>>());
            for i in 0..n {
                prop_assert_eq!(a.r[i] + a.l[i], n + 1);
            }
        }
    }
}
