//! The finite alternative theorem: for a family `Φ_1..Φ_k` of functions on
//! `m` points, either some convex combination is strictly negative
//! everywhere (A1), or some probability measure on the points pairs
//! nonnegatively with every member (A2).
//!
//! Both sides come from one zero-sum game on the `k × m` member matrix with
//! generators as the minimizing player.

use alloc::vec::Vec;

use crate::lp::solve_zero_sum;
use crate::{BiMatrix, Error, Result, Tolerance, Weights, validate_weights};

/// Finitely generated family; row `k` is `Φ_k` over the point set.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionFamily {
    members: BiMatrix,
}

impl FunctionFamily {
    pub fn new(members: BiMatrix) -> Self {
        Self { members }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        crate::validate_bimatrix(rows).map(Self::new)
    }

    pub fn members(&self) -> &BiMatrix {
        &self.members
    }

    pub fn generators(&self) -> usize {
        self.members.rows()
    }

    pub fn points(&self) -> usize {
        self.members.cols()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "tag"))]
pub enum AlternativeOutcome {
    /// `max_x (comboᵀ·members)(x) = sup_value < 0`.
    A1 {
        combo: Weights,
        sup_value: f64,
        margin: f64,
    },
    /// `(members·measure)_k ≥ min_pairing` for every generator `k`.
    A2 {
        measure: Weights,
        min_pairing: f64,
        margin: f64,
    },
}

impl AlternativeOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::A1 { .. } => "A1",
            Self::A2 { .. } => "A2",
        }
    }

    /// Distance of the game value from the decision threshold.
    pub fn margin(&self) -> f64 {
        match self {
            Self::A1 { margin, .. } | Self::A2 { margin, .. } => *margin,
        }
    }

    /// `true` when the decision sits inside `|v| ≤ 10·eps_opt`.
    pub fn in_gray_zone(&self, tol: &Tolerance) -> bool {
        self.margin() <= 10.0 * tol.eps_opt
    }
}

/// Decide which alternative holds. A game value `v < −eps_feas` yields A1;
/// anything else, including exact zero, yields A2.
pub fn decide_alternative(family: &FunctionFamily, tol: &Tolerance) -> Result<AlternativeOutcome> {
    let f = &family.members;
    let game = solve_zero_sum(f, tol)?;
    let v = game.value;
    let margin = v.abs();
    Ok(if v < -tol.eps_feas {
        let sup_value = game.row_guarantee(f);
        AlternativeOutcome::A1 {
            combo: game.row_weights,
            sup_value,
            margin,
        }
    } else {
        let min_pairing = game.col_guarantee(f);
        AlternativeOutcome::A2 {
            measure: game.col_weights,
            min_pairing,
            margin,
        }
    })
}

/// Re-check an outcome against the family using plain scans.
pub fn verify_certificate(outcome: &AlternativeOutcome, family: &FunctionFamily, tol: &Tolerance) -> Result<bool> {
    let f = &family.members;
    let (k, m) = f.shape();
    match outcome {
        AlternativeOutcome::A1 { combo, sup_value, .. } => {
            if combo.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    found: combo.len(),
                });
            }
            if validate_weights(combo, k, tol).is_err() {
                return Ok(false);
            }
            let sup = (0..m)
                .map(|x| (0..k).map(|g| combo[g] * f.get(g, x)).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(sup < -tol.eps_feas && (sup - sup_value).abs() <= tol.eps_cert)
        }
        AlternativeOutcome::A2 { measure, .. } => {
            if measure.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    found: measure.len(),
                });
            }
            if validate_weights(measure, m, tol).is_err() {
                return Ok(false);
            }
            Ok((0..k).all(|g| f.row(g).iter().zip(measure.iter()).map(|(a, b)| a * b).sum::<f64>() >= -tol.eps_cert))
        }
    }
}

/// A functional on `ℝ^X` is nonnegative on the positive cone and pairs to 1
/// with the constant-one vector iff it is a probability vector.
pub fn dual_cone_membership(nu: &[f64], tol: &Tolerance) -> bool {
    !nu.is_empty()
        && nu.iter().all(|&x| x.is_finite() && x >= -tol.eps_feas)
        && (nu.iter().sum::<f64>() - 1.0).abs() <= tol.eps_feas
}
