use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Growing,
    Sliding,
    Weighting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalKind {
    Noisy,
    Gold,
}

pub const DEFAULT_SIZES: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
const DEFAULT_OFFSET_COUNT: usize = 5;

/// Experiment configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Empty means every topic with a focused account.
    #[serde(default)]
    pub topics: Vec<String>,
    /// Growing-window sizes as fractions of `N`.
    #[serde(default)]
    pub sizes: Vec<f64>,
    /// Sliding-window start offsets as fractions of `N`.
    #[serde(default)]
    pub offsets: Vec<f64>,
    #[serde(rename = "R", default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    pub eval: EvalKind,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let p = self.effective_p();
        if !(p.is_finite() && p >= 1.0) {
            return Err(HarnessError::Config(format!("p must be >= 1, got {p}")));
        }
        let r = self.effective_r();
        if !(r > 0.0 && r <= 1.0) {
            return Err(HarnessError::Config(format!(
                "R must lie in (0, 1], got {r}"
            )));
        }
        Ok(())
    }

    /// Window fraction for sliding runs: 0.5 against noisy labels, 0.6
    /// against gold judgments unless set.
    pub fn effective_r(&self) -> f64 {
        self.r.unwrap_or(match self.eval {
            EvalKind::Noisy => 0.5,
            EvalKind::Gold => 0.6,
        })
    }

    /// 10 for weighting runs, 1 (unweighted) otherwise, unless set.
    pub fn effective_p(&self) -> f64 {
        self.p.unwrap_or(match self.experiment {
            ExperimentKind::Weighting => 10.0,
            _ => 1.0,
        })
    }

    pub fn effective_sizes(&self) -> Vec<f64> {
        if self.sizes.is_empty() {
            DEFAULT_SIZES.to_vec()
        } else {
            self.sizes.clone()
        }
    }

    /// Evenly spaced offsets from 0 to `1 - R` unless set.
    pub fn effective_offsets(&self) -> Vec<f64> {
        if !self.offsets.is_empty() {
            return self.offsets.clone();
        }
        let last = 1.0 - self.effective_r();
        let steps = (DEFAULT_OFFSET_COUNT - 1) as f64;
        (0..DEFAULT_OFFSET_COUNT)
            .map(|i| last * i as f64 / steps)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_eval_kind() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"sliding","eval":"noisy"}"#).unwrap();
        assert_eq!(c.effective_r(), 0.5);
        assert_eq!(c.effective_offsets(), vec![0.0, 0.125, 0.25, 0.375, 0.5]);
        assert_eq!(c.effective_p(), 1.0);
        let g = ExperimentConfig::from_json(r#"{"experiment":"weighting","eval":"gold"}"#).unwrap();
        assert_eq!(g.effective_r(), 0.6);
        assert_eq!(g.effective_p(), 10.0);
    }

    #[test]
    fn full_config_parses() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment":"growing","topics":["sports"],"sizes":[0.5,1.0],"R":0.5,"p":10,"eval":"noisy","seed":3}"#,
        )
        .unwrap();
        assert_eq!(c.sizes, vec![0.5, 1.0]);
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn malformed_configs() {
        for bad in [
            r#"{"experiment":"growing"}"#,
            r#"{"experiment":"other","eval":"noisy"}"#,
            r#"{"experiment":"growing","eval":"noisy","bogus":1}"#,
            r#"{"experiment":"weighting","eval":"noisy","p":0.5}"#,
            r#"{"experiment":"sliding","eval":"noisy","R":1.5}"#,
        ] {
            assert!(ExperimentConfig::from_json(bad).is_err(), "{bad}");
        }
    }
}
