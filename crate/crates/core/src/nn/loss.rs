use crate::error::{Error, Result};

/// `mean(max(0, -m_i (v_i - target_i)))` and its gradient with respect to `v`.
///
/// `m_i = +1` penalizes `v_i < target_i`, `m_i = -1` penalizes `v_i > target_i`.
/// The subgradient at the kink is taken as zero.
pub fn margin_ranking_loss(v: &[f64], target: &[f64], sign: &[f64]) -> Result<(f64, Vec<f64>)> {
    if v.len() != target.len() || v.len() != sign.len() {
        return Err(Error::ShapeMismatch {
            context: "margin ranking inputs",
            expected: v.len(),
            actual: if target.len() != v.len() { target.len() } else { sign.len() },
        });
    }
    if v.is_empty() {
        return Ok((0.0, Vec::new()));
    }
    let scale = 1.0 / v.len() as f64;
    let mut loss = 0.0;
    let grad = v
        .iter()
        .zip(target)
        .zip(sign)
        .map(|((&v, &t), &m)| {
            let term = -m * (v - t);
            if term > 0.0 {
                loss += term;
                -m * scale
            } else {
                0.0
            }
        })
        .collect();
    Ok((loss * scale, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(margin_ranking_loss(&[3.0, 4.0], &[3.0, 4.0], &[1.0, -1.0]).unwrap().0, 0.0);
        let (l, g) = margin_ranking_loss(&[121.0], &[105.2676], &[-1.0]).unwrap();
        assert!((l - 15.7324).abs() < 1e-12);
        assert_eq!(g, vec![1.0]);
        assert_eq!(margin_ranking_loss(&[121.0], &[16.0], &[1.0]).unwrap(), (0.0, vec![0.0]));
    }

    #[test]
    fn length_mismatch() {
        assert!(margin_ranking_loss(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn nonnegative_and_zero_iff_satisfied(
            data in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0, any::<bool>()), 1..40)
        ) {
            let v: Vec<f64> = data.iter().map(|d| d.0).collect();
            let t: Vec<f64> = data.iter().map(|d| d.1).collect();
            let m: Vec<f64> = data.iter().map(|d| if d.2 { 1.0 } else { -1.0 }).collect();
            let (loss, grad) = margin_ranking_loss(&v, &t, &m).unwrap();
            prop_assert!(loss >= 0.0);
            let satisfied: Vec<bool> = (0..v.len()).map(|i| if m[i] > 0.0 { v[i] >= t[i] } else { v[i] <= t[i] }).collect();
            prop_assert_eq!(loss == 0.0, satisfied.iter().all(|&s| s));
            for i in 0..v.len() {
                prop_assert_eq!(grad[i] == 0.0, satisfied[i]);
            }
        }
    }
}
