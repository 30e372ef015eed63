/// Sparse vector of `(index, value)` pairs with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

/// TF-IDF row: a [`SparseVector`] with unit Euclidean norm when non-empty.
pub type FeatureVector = SparseVector;

impl SparseVector {
    /// Builds a vector from pairs; panics if indices are not strictly
    /// increasing or fall outside `dim`.
    pub fn new(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let (indices, values): (Vec<usize>, Vec<f64>) = pairs.into_iter().unzip();
        assert!(
            indices.windows(2).all(|w| w[0] < w[1]),
            "sparse indices must be strictly increasing"
        );
        assert!(
            indices.last().is_none_or(|&i| i < dim),
            "sparse index out of range"
        );
        Self {
            dim,
            indices,
            values,
        }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self::new(
            values.len(),
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v)),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_dot() {
        let v = SparseVector::from_dense(&[0.0, 2.0, 0.0, -1.0]);
        assert_eq!(v.indices(), &[1, 3]);
        assert_eq!(v.to_dense(), vec![0.0, 2.0, 0.0, -1.0]);
        assert_eq!(v.dot(&[5.0, 1.0, 7.0, 3.0]), -1.0);
        assert!((v.norm() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "strictly increasing")]
    fn unsorted_indices_panic() {
        SparseVector::new(4, [(2, 1.0), (1, 1.0)]);
    }
}
