//! Convex combinations of a sampled function sequence with minimal uniform
//! norm.
//!
//! For a window `[m, w]` of the sequence the LP
//!
//! ```text
//! minimize u  s.t.  −u ≤ Σ_{n=m..w} λ_n f_n(z)_c ≤ u  for all z, c;  λ ∈ Δ
//! ```
//!
//! gives the smallest sup-norm over the convex hull of `f_m, …, f_w`.
//! Vector values use the max-norm over coordinates. Window indices are
//! 1-based and inclusive throughout this module.

use alloc::vec;
use alloc::vec::Vec;

use crate::lp::{Direction, LpProblem, LpStatus, Sense, solve_lp};
use crate::{Error, Result, Tolerance, Weights, validate_weights};

/// `N` functions sampled at `Z` points with `d`-dimensional values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSequence {
    funcs: usize,
    points: usize,
    dim: usize,
    data: Vec<f64>,
}

impl SampledSequence {
    /// `data[(n·Z + z)·d + c] = f_n(z)_c`.
    pub fn new(funcs: usize, points: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if funcs == 0 || points == 0 || dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let expected = funcs * points * dim;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: k / (points * dim),
                col: (k / dim) % points,
            });
        }
        Ok(Self {
            funcs,
            points,
            dim,
            data,
        })
    }

    /// Scalar sequence from one row of samples per function.
    pub fn from_scalar(rows: &[Vec<f64>]) -> Result<Self> {
        let m = crate::validate_bimatrix(rows)?;
        Self::new(m.rows(), m.cols(), 1, m.as_slice().to_vec())
    }

    pub fn from_fn(funcs: usize, points: usize, dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(funcs * points * dim);
        for n in 0..funcs {
            for z in 0..points {
                for c in 0..dim {
                    data.push(f(n, z, c));
                }
            }
        }
        Self::new(funcs, points, dim, data)
    }

    pub fn funcs(&self) -> usize {
        self.funcs
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Values of the 0-based function `n` at point `z`.
    pub fn value(&self, n: usize, z: usize) -> &[f64] {
        let base = (n * self.points + z) * self.dim;
        &self.data[base..base + self.dim]
    }

    fn check_window(&self, start: usize, end: usize) -> Result<()> {
        if start == 0 || start > end || end > self.funcs {
            return Err(Error::BadWindow {
                start,
                end,
                len: self.funcs,
            });
        }
        Ok(())
    }

    /// Sup-norm of `Σ weights[k]·f_{start+k}` by direct evaluation.
    pub fn combination_norm(&self, start: usize, weights: &[f64]) -> f64 {
        let mut norm: f64 = 0.0;
        for z in 0..self.points {
            for c in 0..self.dim {
                let v: f64 = weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w != 0.0)
                    .map(|(k, w)| w * self.value(start - 1 + k, z)[c])
                    .sum();
                norm = norm.max(v.abs());
            }
        }
        norm
    }
}

/// Optimal convex combination over one window.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MazurResult {
    pub tail_start: usize,
    pub window_end: usize,
    /// Weights over `tail_start..=window_end`.
    pub weights: Weights,
    /// Sup-norm of the combination, evaluated directly from `weights`.
    pub norm: f64,
}

impl MazurResult {
    /// 1-based index of the heaviest member; lowest on ties.
    pub fn heaviest(&self) -> usize {
        let mut best = 0;
        for (k, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = k;
            }
        }
        self.tail_start + best
    }
}

/// Minimize the sup-norm over convex combinations of `f_start..=f_end`.
pub fn mazur_extract(seq: &SampledSequence, start: usize, end: usize, tol: &Tolerance) -> Result<MazurResult> {
    seq.check_window(start, end)?;
    let k = end - start + 1;
    // Variables: λ_0..λ_{k-1}, then u.
    let mut objective = vec![0.0; k + 1];
    objective[k] = 1.0;
    let mut lp = LpProblem::new(Direction::Minimize, objective);
    let mut row = vec![0.0; k + 1];
    for z in 0..seq.points {
        for c in 0..seq.dim {
            for (i, r) in row[..k].iter_mut().enumerate() {
                *r = seq.value(start - 1 + i, z)[c];
            }
            row[k] = -1.0;
            lp.add_constraint(&row, Sense::Le, 0.0)?;
            for r in &mut row[..k] {
                *r = -*r;
            }
            lp.add_constraint(&row, Sense::Le, 0.0)?;
        }
    }
    let mut simplex = vec![1.0; k + 1];
    simplex[k] = 0.0;
    lp.add_constraint(&simplex, Sense::Eq, 1.0)?;
    let sol = solve_lp(&lp, tol)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::DimensionMismatch("window LP did not reach an optimum"));
    }
    let weights = validate_weights(&sol.primal[..k], k, tol)?;
    let norm = seq.combination_norm(start, &weights);
    Ok(MazurResult {
        tail_start: start,
        window_end: end,
        weights,
        norm,
    })
}

/// Re-check a result: valid weights over the window and a norm that matches
/// direct evaluation within `eps_cert`.
pub fn verify_mazur(result: &MazurResult, seq: &SampledSequence, tol: &Tolerance) -> bool {
    if seq.check_window(result.tail_start, result.window_end).is_err() {
        return false;
    }
    let k = result.window_end - result.tail_start + 1;
    if validate_weights(&result.weights, k, tol).is_err() {
        return false;
    }
    result.norm >= 0.0 && (seq.combination_norm(result.tail_start, &result.weights) - result.norm).abs() <= tol.eps_cert
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WindowPolicy {
    /// Fix the window end at `N` and scan the tail start upward.
    #[default]
    FixedEnd,
    /// Fix the tail start and grow the window end; the next target starts
    /// after the previous window.
    Growing,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleEntry {
    pub target: f64,
    pub met: bool,
    /// The meeting window, or the best one found when unmet. `None` only
    /// when no window was left to try.
    pub result: Option<MazurResult>,
}

/// For each target in turn, find a window whose optimal norm meets it.
pub fn mazur_schedule(
    seq: &SampledSequence,
    targets: &[f64],
    policy: WindowPolicy,
    tol: &Tolerance,
) -> Result<Vec<ScheduleEntry>> {
    if targets.iter().any(|t| !(t.is_finite() && *t > 0.0)) || targets.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::BadTargets);
    }
    let n = seq.funcs;
    let mut start = 1;
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        let mut best: Option<MazurResult> = None;
        let mut met = None;
        if start <= n {
            let windows: Vec<(usize, usize)> = match policy {
                WindowPolicy::FixedEnd => (start..=n).map(|m| (m, n)).collect(),
                WindowPolicy::Growing => (start..=n).map(|w| (start, w)).collect(),
            };
            for (m, w) in windows {
                let r = mazur_extract(seq, m, w, tol)?;
                if r.norm <= target {
                    met = Some(r);
                    break;
                }
                if best.as_ref().is_none_or(|b| r.norm < b.norm) {
                    best = Some(r);
                }
            }
        }
        match met {
            Some(r) => {
                start = match policy {
                    WindowPolicy::FixedEnd => r.tail_start,
                    WindowPolicy::Growing => r.window_end + 1,
                };
                out.push(ScheduleEntry {
                    target,
                    met: true,
                    result: Some(r),
                });
            }
            None => out.push(ScheduleEntry {
                target,
                met: false,
                result: best,
            }),
        }
    }
    Ok(out)
}

/// Tail magnitudes `max_{n ≥ m} max_c |f_n(z)_c|` per start `m` and point `z`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    pub starts: Vec<usize>,
    /// `values[k][z]` for `starts[k]`.
    pub values: Vec<Vec<f64>>,
}

/// Tail sup magnitudes at the given 1-based starts (all starts if empty).
pub fn pointwise_decay_report(seq: &SampledSequence, starts: &[usize]) -> Result<DecayReport> {
    let n = seq.funcs;
    let starts: Vec<usize> = if starts.is_empty() {
        (1..=n).collect()
    } else {
        starts.to_vec()
    };
    if let Some(&bad) = starts.iter().find(|&&m| m == 0 || m > n) {
        return Err(Error::BadWindow {
            start: bad,
            end: n,
            len: n,
        });
    }
    // suffix[m][z] for 0-based m, built from the end.
    let mut suffix = vec![vec![0.0f64; seq.points]; n + 1];
    for m in (0..n).rev() {
        let (head, tail) = suffix.split_at_mut(m + 1);
        for (z, (s, &next)) in head[m].iter_mut().zip(&tail[0]).enumerate() {
            let here = seq.value(m, z).iter().fold(0.0f64, |a, v| a.max(v.abs()));
            *s = here.max(next);
        }
    }
    let values = starts.iter().map(|&m| suffix[m - 1].clone()).collect();
    Ok(DecayReport { starts, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn alternating() -> SampledSequence {
        SampledSequence::from_scalar(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    fn powers(funcs: usize) -> SampledSequence {
        SampledSequence::from_fn(funcs, 64, 1, |n, z, _| {
            let x = 0.9 * z as f64 / 63.0;
            libm::pow(x, (n + 1) as f64)
        })
        .unwrap()
    }

    #[test]
    fn alternating_pair_cancels() {
        let r = mazur_extract(&alternating(), 1, 2, &tol()).unwrap();
        assert_eq!(r.weights.as_slice(), &[0.5, 0.5]);
        assert_eq!(r.norm, 0.0);
        assert!(verify_mazur(&r, &alternating(), &tol()));
    }

    #[test]
    fn single_function_window() {
        let s = powers(10);
        let r = mazur_extract(&s, 4, 4, &tol()).unwrap();
        assert_eq!(r.weights.as_slice(), &[1.0]);
        assert_eq!(r.norm, libm::pow(0.9, 4.0));
    }

    /// λ-grid oracle over three members at resolution 1e-2 (finer grids are
    /// exercised by the acceptance suite).
    fn grid_best(seq: &SampledSequence, members: [usize; 3], steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..=steps {
            for b in 0..=steps - a {
                let w = [
                    a as f64 / steps as f64,
                    b as f64 / steps as f64,
                    (steps - a - b) as f64 / steps as f64,
                ];
                let mut norm: f64 = 0.0;
                for z in 0..seq.points() {
                    let v: f64 = (0..3).map(|k| w[k] * seq.value(members[k] - 1, z)[0]).sum();
                    norm = norm.max(v.abs());
                }
                best = best.min(norm);
            }
        }
        best
    }

    #[test]
    fn three_member_subsample_matches_grid() {
        let s = powers(100);
        let sub = SampledSequence::from_fn(3, 64, 1, |n, z, _| s.value([97, 98, 99][n], z)[0]).unwrap();
        let r = mazur_extract(&sub, 1, 3, &tol()).unwrap();
        let grid = grid_best(&sub, [1, 2, 3], 100);
        assert!(r.norm <= grid + 1e-15);
        assert_eq!(r.heaviest(), 3);
        assert!((r.norm - libm::pow(0.9, 100.0)).abs() <= 1e-9 * libm::pow(0.9, 100.0));
    }

    #[test]
    fn bad_windows() {
        let s = alternating();
        for (m, w) in [(0, 1), (2, 1), (1, 3)] {
            assert!(matches!(mazur_extract(&s, m, w, &tol()), Err(Error::BadWindow { .. })));
        }
    }

    #[test]
    fn schedule_examples() {
        let e = mazur_schedule(&alternating(), &[0.5, 0.1], WindowPolicy::FixedEnd, &tol()).unwrap();
        assert!(e.iter().all(|x| x.met));
        for x in &e {
            let r = x.result.as_ref().unwrap();
            assert_eq!((r.tail_start, r.window_end, r.norm), (1, 2, 0.0));
        }

        let constant = SampledSequence::from_scalar(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let e = mazur_schedule(&constant, &[0.5], WindowPolicy::FixedEnd, &tol()).unwrap();
        assert!(!e[0].met);
        assert_eq!(e[0].result.as_ref().unwrap().norm, 1.0);

        let g = mazur_schedule(&alternating(), &[0.5, 0.1], WindowPolicy::Growing, &tol()).unwrap();
        assert!(g[0].met);
        assert!(!g[1].met && g[1].result.is_none());

        assert_eq!(
            mazur_schedule(&alternating(), &[0.1, 0.5], WindowPolicy::FixedEnd, &tol()).unwrap_err(),
            Error::BadTargets
        );
        assert_eq!(
            mazur_schedule(&alternating(), &[-0.1], WindowPolicy::FixedEnd, &tol()).unwrap_err(),
            Error::BadTargets
        );
    }

    #[test]
    fn decay_examples() {
        let s = powers(100);
        let d = pointwise_decay_report(&s, &[1, 50, 100]).unwrap();
        assert!(d.values.iter().all(|row| row[0] == 0.0));
        assert_eq!(d.values[1][63], libm::pow(0.9, 50.0));
        assert!((d.values[1][63] - 5.15e-3).abs() < 1e-5);

        let constant = SampledSequence::from_scalar(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let d = pointwise_decay_report(&constant, &[]).unwrap();
        assert_eq!(d.starts, vec![1, 2]);
        assert!(d.values.iter().flatten().all(|v| *v == 1.0));
        assert!(pointwise_decay_report(&constant, &[3]).is_err());
    }

    #[test]
    fn zero_extra_coordinate_keeps_norm() {
        let rows = [vec![0.3, -0.7, 0.2], vec![-0.5, 0.4, 0.9], vec![0.1, 0.1, -0.6]];
        let scalar = SampledSequence::from_scalar(&rows).unwrap();
        let explicit = SampledSequence::new(3, 3, 1, rows.concat()).unwrap();
        assert_eq!(scalar, explicit);
        let padded = SampledSequence::from_fn(3, 3, 2, |n, z, c| if c == 0 { rows[n][z] } else { 0.0 }).unwrap();
        let a = mazur_extract(&scalar, 1, 3, &tol()).unwrap();
        let b = mazur_extract(&padded, 1, 3, &tol()).unwrap();
        assert!((a.norm - b.norm).abs() <= 1e-12);
    }

    fn sequence() -> impl Strategy<Value = SampledSequence> {
        (1usize..6, 1usize..5, 1usize..3).prop_flat_map(|(n, z, d)| {
            prop::collection::vec(-1.0f64..1.0, n * z * d)
                .prop_map(move |data| SampledSequence::new(n, z, d, data).unwrap())
        })
    }

    proptest! {
        #[test]
        fn window_monotonicity(seq in sequence()) {
            let n = seq.funcs();
            let full = mazur_extract(&seq, 1, n, &tol()).unwrap();
            prop_assert!(verify_mazur(&full, &seq, &tol()));
            for m in 1..=n {
                let r = mazur_extract(&seq, m, n, &tol()).unwrap();
                prop_assert!(full.norm <= r.norm + 1e-9);
                let uniform = Weights::uniform(n - m + 1);
                prop_assert!(r.norm <= seq.combination_norm(m, &uniform) + 1e-9);
                if m > 1 {
                    let prev = mazur_extract(&seq, m - 1, n, &tol()).unwrap();
                    prop_assert!(prev.norm <= r.norm + 1e-9);
                }
            }
        }

        #[test]
        fn decay_is_nonincreasing(seq in sequence()) {
            let d = pointwise_decay_report(&seq, &[]).unwrap();
            for w in d.values.windows(2) {
                prop_assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a >= b));
            }
        }
    }
}
