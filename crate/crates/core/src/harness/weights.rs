use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Exponential recency weighting: the newest example weighs `p` times the
/// oldest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecencyWeightSpec {
    pub p: f64,
}

impl Default for RecencyWeightSpec {
    fn default() -> Self {
        Self { p: 10.0 }
    }
}

/// `w_i = exp(ln(p) · i / n)` for `i = 0..=n`, `n = count - 1`. The end
/// points are exactly 1 and `p`.
pub fn recency_weights(count: usize, spec: RecencyWeightSpec) -> Result<Vec<f64>, HarnessError> {
    let p = spec.p;
    if !(p.is_finite() && p >= 1.0) {
        return Err(HarnessError::InvalidP(p));
    }
    match count {
        0 => Ok(Vec::new()),
        1 => Ok(vec![1.0]),
        _ => {
            let n = (count - 1) as f64;
            let log_p = p.ln();
            let mut weights: Vec<f64> = (0..count).map(|i| (log_p * i as f64 / n).exp()).collect();
            weights[count - 1] = p;
            Ok(weights)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_one_is_uniform() {
        let w = recency_weights(17, RecencyWeightSpec { p: 1.0 }).unwrap();
        assert!(w.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn three_weights_with_p_ten() {
        let w = recency_weights(3, RecencyWeightSpec { p: 10.0 }).unwrap();
        assert_eq!(w[0], 1.0);
        assert!((w[1] - 10f64.sqrt()).abs() < 1e-12);
        assert!((w[1] - 3.162_277_660_168_379).abs() < 1e-12);
        assert_eq!(w[2], 10.0);
    }

    #[test]
    fn single_and_empty() {
        assert_eq!(recency_weights(1, Default::default()).unwrap(), vec![1.0]);
        assert!(recency_weights(0, Default::default()).unwrap().is_empty());
    }

    #[test]
    fn p_below_one_is_rejected() {
        assert!(matches!(
            recency_weights(5, RecencyWeightSpec { p: 0.5 }),
            Err(HarnessError::InvalidP(_))
        ));
    }
}
