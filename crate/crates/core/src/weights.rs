use alloc::vec::Vec;
use core::ops::Deref;

use crate::{Error, Result, Tolerance};

/// A probability vector over a finite index set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Weights(Vec<f64>);

/// Validate a candidate probability vector.
///
/// Negative dust in `[-eps_feas, 0)` is clamped to zero and the vector is
/// renormalized; anything more negative is rejected.
pub fn validate_weights(candidate: &[f64], expected_len: usize, tol: &Tolerance) -> Result<Weights> {
    if candidate.len() != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            found: candidate.len(),
        });
    }
    if expected_len == 0 {
        return Err(Error::SumNotOne { sum: 0.0 });
    }
    let mut w = Vec::with_capacity(candidate.len());
    for (index, &value) in candidate.iter().enumerate() {
        if !value.is_finite() || value < -tol.eps_feas {
            return Err(Error::NegativeWeight { index, value });
        }
        w.push(value.max(0.0));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > tol.eps_feas {
        return Err(Error::SumNotOne { sum });
    }
    let clamped = candidate.iter().any(|&x| x < 0.0);
    if clamped || sum != 1.0 {
        for x in &mut w {
            *x /= sum;
        }
    }
    Ok(Weights(w))
}

impl Weights {
    /// All mass on `index`.
    pub fn vertex(len: usize, index: usize) -> Self {
        let mut w = alloc::vec![0.0; len];
        w[index] = 1.0;
        Self(w)
    }

    /// Wraps a vector already known to be a convex combination of vertices.
    pub(crate) fn from_mixture(w: Vec<f64>) -> Self {
        Self(w)
    }

    pub fn uniform(len: usize) -> Self {
        Self(alloc::vec![1.0 / len as f64; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

impl Deref for Weights {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn uniform_pair() {
        let w = validate_weights(&[0.5, 0.5], 2, &tol()).unwrap();
        assert_eq!(w.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn sum_not_one() {
        assert!(matches!(
            validate_weights(&[0.7, 0.4], 2, &tol()),
            Err(Error::SumNotOne { .. })
        ));
    }

    #[test]
    fn clamps_negative_dust() {
        let w = validate_weights(&[1.0, -1e-12], 2, &tol()).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_real_negatives_and_bad_length() {
        assert!(matches!(
            validate_weights(&[1.5, -0.5], 2, &tol()),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(
            validate_weights(&[1.0], 2, &tol()),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        ));
        assert!(validate_weights(&[f64::NAN, 1.0], 2, &tol()).is_err());
    }

    proptest! {
        #[test]
        fn validation_is_idempotent(raw in prop::collection::vec(0.0f64..1.0, 1..8), dust in -1e-10f64..0.0) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-3);
            let mut v: Vec<f64> = raw.iter().map(|x| x / total).collect();
            v[0] += dust;
            let t = tol();
            if let Ok(w) = validate_weights(&v, v.len(), &t) {
                let again = validate_weights(&w, w.len(), &t).unwrap();
                prop_assert!(again.iter().zip(w.iter()).all(|(a, b)| (a - b).abs() <= 1e-15));
            }
        }
    }
}
