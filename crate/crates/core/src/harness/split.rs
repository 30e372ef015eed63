use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::corpus::Tweet;
use crate::supervision::{GoldExample, LabeledExample};

/// Anything that carries an epoch-millisecond timestamp.
pub trait Timestamped {
    fn timestamp(&self) -> i64;
}

impl Timestamped for Tweet {
    fn timestamp(&self) -> i64 {
        self.timestamp
    }
}

impl Timestamped for LabeledExample {
    fn timestamp(&self) -> i64 {
        self.timestamp
    }
}

impl Timestamped for GoldExample {
    fn timestamp(&self) -> i64 {
        self.timestamp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
        }
    }
}

/// First `floor(train_fraction · N)` items train, the rest test. `items`
/// must already be in chronological order.
pub fn chronological_split<T: Timestamped>(
    items: &[T],
    spec: SplitSpec,
) -> Result<(&[T], &[T]), HarnessError> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(HarnessError::DegenerateSplit(format!(
            "train_fraction must lie in (0, 1), got {f}"
        )));
    }
    let n = items.len();
    if n < 2 {
        return Err(HarnessError::DegenerateSplit(format!(
            "need at least 2 items, got {n}"
        )));
    }
    let cut = (f * n as f64).floor() as usize;
    if cut == 0 || cut == n {
        return Err(HarnessError::DegenerateSplit(format!(
            "fraction {f} of {n} items leaves one side empty"
        )));
    }
    debug_assert!(items
        .windows(2)
        .all(|w| w[0].timestamp() <= w[1].timestamp()));
    Ok(items.split_at(cut))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct At(i64);
    impl Timestamped for At {
        fn timestamp(&self) -> i64 {
            self.0
        }
    }

    #[test]
    fn eighty_twenty() {
        let items: Vec<At> = (0..10).map(At).collect();
        let (train, test) = chronological_split(&items, SplitSpec::default()).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);
        assert_eq!(test[0].0, 8);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(chronological_split(&[At(1)], SplitSpec::default()).is_err());
        let items: Vec<At> = (0..3).map(At).collect();
        assert!(chronological_split(
            &items,
            SplitSpec {
                train_fraction: 0.2
            }
        )
        .is_err());
        assert!(chronological_split(
            &items,
            SplitSpec {
                train_fraction: 1.0
            }
        )
        .is_err());
    }
}
