//! Finite-instance toolkit for generalized-convexity minimax analysis.
//!
//! Everything here works on finite index sets: a bivariate function
//! `f: X × Y → ℝ` is a dense [`BiMatrix`], probability measures on a finite
//! set are [`Weights`], and the topological hypotheses of the classical
//! theorems (compactness, semicontinuity, equicontinuity) hold automatically.
//! What remains is algebra and linear programming, which this crate does
//! without `std`.
//!
//! Module map:
//!
//! - [`lp`]: dense simplex kernel and the zero-sum game solver.
//! - [`genconvex`]: t-convexlike / s-concavelike scans, infsup-convex and
//!   supinf-concave value tests, dense mixture coefficients.
//! - [`minimax`]: pure and mixed values, Simons-like checks and the
//!   theorem checkers.
//! - [`alternative`]: the A1/A2 dichotomy with certificates.
//! - [`construct`]: inf-convolution and friends, seeded generators.
//! - [`mazur`]: convex combinations of a sampled sequence with minimal
//!   uniform norm.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod matrix;
mod sequence;
mod tol;
mod weights;

pub mod alternative;
pub mod construct;
pub mod genconvex;
pub mod lp;
pub mod mazur;
pub mod minimax;
pub mod report;

pub use error::{Error, Result};
pub use matrix::{BiMatrix, validate_bimatrix};
pub use sequence::IndexSequence;
pub use tol::Tolerance;
pub use weights::{Weights, validate_weights};

/// Columnwise `λᵀF` for row weights `λ`.
pub(crate) fn row_mix(f: &BiMatrix, lambda: &[f64]) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec![0.0; f.cols()];
    for (i, &w) in lambda.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(f.row(i)) {
            *o += w * x;
        }
    }
    out
}

/// Rowwise `Fμ` for column weights `μ`.
pub(crate) fn col_mix(f: &BiMatrix, mu: &[f64]) -> alloc::vec::Vec<f64> {
    (0..f.rows())
        .map(|i| f.row(i).iter().zip(mu).map(|(a, b)| a * b).sum())
        .collect()
}

pub(crate) fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}
