//! Classifiers for generalized convexity on finite instances.
//!
//! `F` is t-convexlike when every pair of rows has a third row lying below
//! their t-mixture in every column, and s-concavelike when every pair of
//! columns has a third column above their s-mixture in every row. The
//! infsup-convex and supinf-concave tests compare pure values with the mixed
//! values computed by the game solver: allowing finite convex combinations of
//! rows is exactly optimizing over the row simplex, since the objective is a
//! maximum of linear functions.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::lp::solve_zero_sum;
use crate::minimax::pure_values;
use crate::report::{ConvexityReport, Hypothesis, Property, TheoremCheck, TheoremId, Witness};
use crate::{BiMatrix, Error, Result, Tolerance, Weights};

/// Cap on candidate vectors generated by [`dense_coefficients`].
pub const DEFAULT_COEFFICIENT_CAP: usize = 1_000_000;

fn check_unit_interval(t: f64) -> bool {
    t > 0.0 && t < 1.0
}

/// Lowest row `i3` with `F[i3][·] ≤ t·F[i1][·] + (1−t)·F[i2][·] + slack`.
pub(crate) fn convexlike_witness(f: &BiMatrix, t: f64, i1: usize, i2: usize, slack: f64) -> Option<usize> {
    let (r1, r2) = (f.row(i1), f.row(i2));
    (0..f.rows()).find(|&i3| {
        f.row(i3)
            .iter()
            .zip(r1.iter().zip(r2))
            .all(|(&x, (&a, &b))| x <= t * a + (1.0 - t) * b + slack)
    })
}

/// Scan all ordered row pairs for a t-convexlike witness.
pub fn is_t_convexlike(f: &BiMatrix, t: f64, tol: &Tolerance) -> Result<ConvexityReport> {
    if !check_unit_interval(t) {
        return Err(Error::TOutOfRange(t));
    }
    let mut witness = None;
    'outer: for i1 in 0..f.rows() {
        for i2 in 0..f.rows() {
            if i1 != i2 && convexlike_witness(f, t, i1, i2, tol.eps_feas).is_none() {
                let mixture = f
                    .row(i1)
                    .iter()
                    .zip(f.row(i2))
                    .map(|(a, b)| t * a + (1.0 - t) * b)
                    .collect();
                witness = Some(Witness {
                    pair: (i1, i2),
                    mixture,
                });
                break 'outer;
            }
        }
    }
    Ok(ConvexityReport {
        property: Property::TConvexlike,
        holds: witness.is_none(),
        t: Some(t),
        witness,
        lhs_value: None,
        rhs_value: None,
    })
}

/// Scan all ordered column pairs for an s-concavelike witness.
pub fn is_s_concavelike(f: &BiMatrix, s: f64, tol: &Tolerance) -> Result<ConvexityReport> {
    if !check_unit_interval(s) {
        return Err(Error::SOutOfRange(s));
    }
    let cols: Vec<Vec<f64>> = (0..f.cols()).map(|j| f.column(j).collect()).collect();
    let mut witness = None;
    'outer: for j1 in 0..f.cols() {
        for j2 in 0..f.cols() {
            if j1 == j2 {
                continue;
            }
            let mixture: Vec<f64> = cols[j1]
                .iter()
                .zip(&cols[j2])
                .map(|(a, b)| s * a + (1.0 - s) * b)
                .collect();
            let found = cols
                .iter()
                .any(|c| c.iter().zip(&mixture).all(|(&x, &m)| x >= m - tol.eps_feas));
            if !found {
                witness = Some(Witness {
                    pair: (j1, j2),
                    mixture,
                });
                break 'outer;
            }
        }
    }
    Ok(ConvexityReport {
        property: Property::TConcavelike,
        holds: witness.is_none(),
        t: Some(s),
        witness,
        lhs_value: None,
        rhs_value: None,
    })
}

/// `min_{λ ∈ Δ_m} max_j (λᵀF)_j`, attained by the game solver's row strategy.
pub fn infsup_convex_value(f: &BiMatrix, tol: &Tolerance) -> Result<f64> {
    Ok(solve_zero_sum(f, tol)?.row_guarantee(f))
}

/// `max_{μ ∈ Δ_n} min_i (Fμ)_i`, attained by the game solver's column strategy.
pub fn supinf_concave_value(f: &BiMatrix, tol: &Tolerance) -> Result<f64> {
    Ok(solve_zero_sum(f, tol)?.col_guarantee(f))
}

fn value_report(property: Property, pure: f64, mixed: f64, tol: &Tolerance) -> ConvexityReport {
    ConvexityReport {
        property,
        holds: (pure - mixed).abs() <= tol.eps_opt,
        t: None,
        witness: None,
        lhs_value: Some(pure),
        rhs_value: Some(mixed),
    }
}

/// Holds iff `min_i max_j F` equals the mixed infsup value within `eps_opt`.
pub fn is_infsup_convex(f: &BiMatrix, tol: &Tolerance) -> Result<ConvexityReport> {
    let (_, upper) = pure_values(f);
    Ok(value_report(
        Property::InfsupConvex,
        upper,
        infsup_convex_value(f, tol)?,
        tol,
    ))
}

/// Holds iff `max_j min_i F` equals the mixed supinf value within `eps_opt`.
pub fn is_supinf_concave(f: &BiMatrix, tol: &Tolerance) -> Result<ConvexityReport> {
    let (lower, _) = pure_values(f);
    Ok(value_report(
        Property::SupinfConcave,
        lower,
        supinf_concave_value(f, tol)?,
        tol,
    ))
}

/// How a coefficient vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Vertex(usize),
    /// `t·items[left] + (1−t)·items[right]`
    Mix {
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub weights: Weights,
    pub origin: Origin,
    /// Height of the mixture tree; vertices have height 0.
    pub height: usize,
}

/// Coefficient vectors reachable by iterated binary t-mixtures of simplex
/// vertices, each carrying the tree that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCoefficients {
    pub t: f64,
    pub n: usize,
    pub depth: usize,
    pub items: Vec<Coefficient>,
}

fn dedup_key(w: &[f64]) -> Vec<i64> {
    w.iter().map(|x| libm::round(x * 1e12) as i64).collect()
}

/// Enumerate all distinct mixture-tree coefficients up to `depth`, with the
/// default candidate cap.
pub fn dense_coefficients(t: f64, n: usize, depth: usize) -> Result<DenseCoefficients> {
    dense_coefficients_capped(t, n, depth, DEFAULT_COEFFICIENT_CAP)
}

/// As [`dense_coefficients`]; fails with `DepthTooLarge` once a level would
/// generate more than `cap` candidate vectors.
pub fn dense_coefficients_capped(t: f64, n: usize, depth: usize, cap: usize) -> Result<DenseCoefficients> {
    if !check_unit_interval(t) {
        return Err(Error::TOutOfRange(t));
    }
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut seen = BTreeSet::new();
    let mut items = Vec::new();
    for k in 0..n {
        let w = Weights::vertex(n, k);
        seen.insert(dedup_key(&w));
        items.push(Coefficient {
            weights: w,
            origin: Origin::Vertex(k),
            height: 0,
        });
    }
    for _ in 0..depth {
        let prev = items.len();
        let candidates = prev.saturating_mul(prev);
        if candidates > cap {
            return Err(Error::DepthTooLarge(candidates));
        }
        for left in 0..prev {
            for right in 0..prev {
                let w: Vec<f64> = items[left]
                    .weights
                    .iter()
                    .zip(items[right].weights.iter())
                    .map(|(a, b)| t * a + (1.0 - t) * b)
                    .collect();
                if seen.insert(dedup_key(&w)) {
                    let height = 1 + items[left].height.max(items[right].height);
                    items.push(Coefficient {
                        weights: Weights::from_mixture(w),
                        origin: Origin::Mix { left, right },
                        height,
                    });
                }
            }
        }
    }
    Ok(DenseCoefficients { t, n, depth, items })
}

impl DenseCoefficients {
    /// Index of the item closest to `target` in max-norm, and that distance.
    pub fn nearest(&self, target: &[f64]) -> Result<(usize, f64)> {
        if target.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: target.len(),
            });
        }
        let dist = |w: &Weights| w.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let (k, d) = self
            .items
            .iter()
            .enumerate()
            .map(|(k, c)| (k, dist(&c.weights)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        Ok((k, d))
    }
}

/// Walk the mixture tree of `coeffs.items[item]`, replacing each leaf `k`
/// by row `rows[k]` and each internal node by the lowest pairwise
/// t-convexlike witness of its children.
///
/// The returned row `i0` satisfies
/// `F[i0][·] ≤ Σ_k a_k F[rows[k]][·] + height·eps_feas`.
pub fn fact1_witness(
    f: &BiMatrix,
    rows: &[usize],
    coeffs: &DenseCoefficients,
    item: usize,
    tol: &Tolerance,
) -> Result<usize> {
    if rows.len() != coeffs.n {
        return Err(Error::LengthMismatch {
            expected: coeffs.n,
            found: rows.len(),
        });
    }
    if let Some(&index) = rows.iter().find(|&&r| r >= f.rows()) {
        return Err(Error::IndexOutOfRange { index, len: f.rows() });
    }
    if item >= coeffs.items.len() {
        return Err(Error::IndexOutOfRange {
            index: item,
            len: coeffs.items.len(),
        });
    }
    let mut memo = vec![None; coeffs.items.len()];
    resolve(f, rows, coeffs, item, tol, &mut memo)
}

fn resolve(
    f: &BiMatrix,
    rows: &[usize],
    coeffs: &DenseCoefficients,
    item: usize,
    tol: &Tolerance,
    memo: &mut Vec<Option<usize>>,
) -> Result<usize> {
    if let Some(r) = memo[item] {
        return Ok(r);
    }
    let r = match coeffs.items[item].origin {
        Origin::Vertex(k) => rows[k],
        Origin::Mix { left, right } => {
            let xl = resolve(f, rows, coeffs, left, tol, memo)?;
            let xr = resolve(f, rows, coeffs, right, tol, memo)?;
            convexlike_witness(f, coeffs.t, xl, xr, tol.eps_feas).ok_or(Error::NotTConvexlike(xl, xr))?
        }
    };
    memo[item] = Some(r);
    Ok(r)
}

/// Direct scan: `F[i0][j] ≤ Σ_k a_k F[rows[k]][j] + slack` for every `j`.
pub fn dominates_mixture(f: &BiMatrix, i0: usize, rows: &[usize], coeffs: &[f64], slack: f64) -> bool {
    (0..f.cols()).all(|j| {
        let mix: f64 = rows.iter().zip(coeffs).map(|(&r, &a)| a * f.get(r, j)).sum();
        f.get(i0, j) <= mix + slack
    })
}

/// t-convexlike ⟹ infsup-convex, on a finite (hence bounded) instance.
///
/// Vacuous when `F` is not t-convexlike.
pub fn check_prop22(f: &BiMatrix, t: f64, tol: &Tolerance) -> Result<TheoremCheck> {
    let hyp = is_t_convexlike(f, t, tol)?;
    let concl = is_infsup_convex(f, tol)?;
    let detail = match &hyp.witness {
        None => alloc::format!("t = {t}"),
        Some(w) => alloc::format!("t = {t}; no row below the mixture of rows {:?}", w.pair),
    };
    let hypotheses = vec![
        Hypothesis::checked("f_t_convexlike", hyp.holds, detail),
        Hypothesis::by_finiteness("f_bounded_on_y"),
        Hypothesis::by_finiteness("supinf_finite"),
    ];
    Ok(TheoremCheck::new(
        TheoremId::Infsup,
        hypotheses,
        concl.holds,
        &[
            ("inf_sup", concl.lhs_value.unwrap_or_default()),
            ("infsup_convex_value", concl.rhs_value.unwrap_or_default()),
            ("t", t),
        ],
    ))
}
