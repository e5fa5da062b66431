use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Rank-based normal-score transform.
///
/// Maps value with rank `r` (average ranks for ties, 1-based) to
/// `Phi^{-1}((r - 0.5) / n)`. The half offset keeps the extreme quantiles
/// finite; the output is monotone in the input.
pub fn normal_score_transform(column: &[f64]) -> Result<Vec<f64>> {
    let n = column.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "normal score transform needs at least 2 observations".into(),
        ));
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "normal score transform requires finite values".into(),
        ));
    }
    let ranks = average_ranks(column);
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(ranks
        .iter()
        .map(|r| normal.inverse_cdf((r - 0.5) / n as f64))
        .collect())
}

/// 1-based ranks with ties assigned the average rank of their run.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share the average of ranks i+1..=j+1.
        let avg = (i + j + 2) as f64 / 2.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn three_point_quantiles() {
        let out = normal_score_transform(&[10.0, 20.0, 30.0]).unwrap();
        assert_abs_diff_eq!(out[0], -0.9674, epsilon = 1e-4);
        assert_abs_diff_eq!(out[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[2], 0.9674, epsilon = 1e-4);
    }

    #[test]
    fn permutation_follows_ranks() {
        let sorted = [1.0, 2.0, 5.0, 9.0];
        let shuffled = [5.0, 1.0, 9.0, 2.0];
        let a = normal_score_transform(&sorted).unwrap();
        let b = normal_score_transform(&shuffled).unwrap();
        // Same multiset, permuted exactly like the input ranks.
        assert_eq!(b[0], a[2]);
        assert_eq!(b[1], a[0]);
        assert_eq!(b[2], a[3]);
        assert_eq!(b[3], a[1]);
    }

    #[test]
    fn constant_vector_maps_to_zero() {
        let out = normal_score_transform(&[5.0, 5.0, 5.0, 5.0]).unwrap();
        for v in out {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tie_free_output_sums_to_zero() {
        let input: Vec<f64> = (0..101).map(|i| (i as f64 * 0.37).sin() + i as f64 * 1e-3).collect();
        let out = normal_score_transform(&input).unwrap();
        let sum: f64 = out.iter().sum();
        assert!(sum.abs() < 1e-9, "sum = {sum}");
    }

    #[test]
    fn too_short_rejected() {
        assert!(normal_score_transform(&[1.0]).is_err());
    }

    #[test]
    fn average_ranks_with_ties() {
        let r = average_ranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
    }
}
