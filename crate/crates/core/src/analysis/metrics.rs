//! Accuracy metrics for an estimate against a reference vector.

use crate::error::{Error, Result};

fn same_length(est: &[f64], truth: &[f64]) -> Result<()> {
    if est.len() != truth.len() {
        return Err(Error::invalid(format!("estimate has {} values, reference has {}", est.len(), truth.len())));
    }
    Ok(())
}

/// `sum_j (est_j - truth_j)^2`.
pub fn squared_loss(est: &[f64], truth: &[f64]) -> Result<f64> {
    same_length(est, truth)?;
    Ok(est.iter().zip(truth).map(|(e, t)| (e - t).powi(2)).sum())
}

/// Indices of the `k` largest values; ties go to the lower index.
pub fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Share of the estimated top `k` that is not in the true top `k`.
pub fn topk_error_rate(est: &[f64], truth: &[f64], k: usize) -> Result<f64> {
    same_length(est, truth)?;
    if k == 0 || k > est.len() {
        return Err(Error::invalid(format!("top-k needs 1 <= k <= {}, got {k}", est.len())));
    }
    let reference = top_k(truth, k);
    let missed = top_k(est, k).iter().filter(|i| !reference.contains(i)).count();
    Ok(missed as f64 / k as f64)
}

/// Linearly interpolated quantile of ascending `sorted` data, `q` in `[0, 1]`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn loss_examples() {
        assert_eq!(squared_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(squared_loss(&[2.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert!((squared_loss(&[0.2, 0.8], &[0.25, 0.75]).unwrap() - 0.005).abs() < 1e-15);
        assert!(squared_loss(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn topk_examples() {
        let truth = [4.0, 3.0, 2.0, 1.0];
        assert_eq!(topk_error_rate(&truth, &truth, 2).unwrap(), 0.0);
        assert_eq!(topk_error_rate(&[1.0, 2.0, 3.0, 4.0], &truth, 2).unwrap(), 1.0);
        assert_eq!(topk_error_rate(&[4.0, 1.0, 2.0, 3.0], &truth, 2).unwrap(), 0.5);
        assert!(topk_error_rate(&truth, &truth, 0).is_err());
        assert!(topk_error_rate(&truth, &truth, 5).is_err());
    }

    #[test]
    fn ties_prefer_lower_labels() {
        assert_eq!(top_k(&[1.0, 1.0, 1.0, 0.0], 2), vec![0, 1]);
        assert_eq!(top_k(&[0.0, 2.0, 2.0], 1), vec![1]);
    }

    #[test]
    fn quantiles() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&data, 0.0), 1.0);
        assert_eq!(quantile(&data, 0.5), 3.0);
        assert_eq!(quantile(&data, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
        assert!(quantile(&[], 0.5).is_nan());
    }

    proptest! {
        #[test]
        fn topk_is_relabeling_equivariant(
            pairs in prop::collection::vec((0u32..1000, 0u32..1000), 2..12),
            k in 1usize..12,
            shift in 0usize..12,
        ) {
            // distinct values so relabeling cannot interact with tie-breaking
            let n = pairs.len();
            let k = k.min(n);
            let est: Vec<f64> = pairs.iter().enumerate().map(|(i, p)| p.0 as f64 + i as f64 * 1e-6).collect();
            let truth: Vec<f64> = pairs.iter().enumerate().map(|(i, p)| p.1 as f64 + i as f64 * 1e-6).collect();
            let relabel = |v: &[f64]| -> Vec<f64> { (0..n).map(|i| v[(i + shift) % n]).collect() };
            prop_assert_eq!(
                topk_error_rate(&est, &truth, k).unwrap(),
                topk_error_rate(&relabel(&est), &relabel(&truth), k).unwrap()
            );
        }
    }
}
