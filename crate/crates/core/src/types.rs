use std::ops::{Deref, DerefMut};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A vector of arm means, one entry per action.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanVector(pub DVector<f64>);

impl MeanVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(DVector::from_vec(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn num_arms(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `max - min` over coordinates.
    pub fn diam(&self) -> f64 {
        let max = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.0.iter().copied().fold(f64::INFINITY, f64::min);
        if self.0.is_empty() {
            0.0
        } else {
            max - min
        }
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl From<Vec<f64>> for MeanVector {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl From<DVector<f64>> for MeanVector {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

impl Deref for MeanVector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

impl DerefMut for MeanVector {
    fn deref_mut(&mut self) -> &mut DVector<f64> {
        &mut self.0
    }
}

/// A square covariance-like matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix(pub DMatrix<f64>);

impl CovMatrix {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        Self(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.0.nrows();
        if self.0.ncols() != n {
            return false;
        }
        (0..n).all(|i| (0..i).all(|j| (self.0[(i, j)] - self.0[(j, i)]).abs() <= tol))
    }

    pub fn symmetrized(&self) -> CovMatrix {
        CovMatrix((&self.0 + self.0.transpose()) * 0.5)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CovMatrix) -> f64 {
        (&self.0 - &other.0).amax()
    }
}

impl Deref for CovMatrix {
    type Target = DMatrix<f64>;
    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl DerefMut for CovMatrix {
    fn deref_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.0
    }
}

/// Index of an action in `[0, A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionIndex(pub usize);

impl ActionIndex {
    pub fn checked(index: usize, num_arms: usize) -> Result<Self> {
        if index < num_arms {
            Ok(Self(index))
        } else {
            Err(Error::ActionOutOfRange { index, num_arms })
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Smallest index attaining the maximum.
pub fn argmax_tiebreak(values: &[f64]) -> Result<ActionIndex> {
    if values.is_empty() {
        return Err(Error::Empty("argmax over no values"));
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::NonFinite);
        }
        if v > values[best] {
            best = i;
        }
    }
    Ok(ActionIndex(best))
}

/// Uniformly random index among those attaining the maximum.
pub fn argmax_random_tiebreak(
    values: &[f64],
    rng: &mut crate::rng::RngStream,
) -> Result<ActionIndex> {
    let first = argmax_tiebreak(values)?;
    let best = values[first.0];
    let ties: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .map(|(i, _)| i)
        .collect();
    if ties.len() == 1 {
        return Ok(first);
    }
    Ok(ActionIndex(ties[rng.below(ties.len())]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn argmax_examples() {
        assert_eq!(argmax_tiebreak(&[0.1, 0.9, 0.3]).unwrap(), ActionIndex(1));
        assert_eq!(argmax_tiebreak(&[1.0, 1.0, 1.0]).unwrap(), ActionIndex(0));
        assert_eq!(argmax_tiebreak(&[2.0, 5.0, 5.0]).unwrap(), ActionIndex(1));
    }

    #[test]
    fn argmax_rejects_nan() {
        assert_eq!(argmax_tiebreak(&[1.0, f64::NAN]), Err(Error::NonFinite));
        assert!(argmax_tiebreak(&[]).is_err());
    }

    #[test]
    fn action_index_bounds() {
        assert!(ActionIndex::checked(2, 3).is_ok());
        assert!(ActionIndex::checked(3, 3).is_err());
    }

    proptest! {
        #[test]
        fn argmax_shift_invariant(
            values in proptest::collection::vec(-100i32..100, 1..12),
            shift in -1000i32..1000,
        ) {
            // Integer-valued inputs keep the shift exact in floating point.
            let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
            let shifted: Vec<f64> = v.iter().map(|x| x + shift as f64).collect();
            prop_assert_eq!(argmax_tiebreak(&v).unwrap(), argmax_tiebreak(&shifted).unwrap());
        }
    }
}
