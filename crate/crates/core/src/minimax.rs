//! Pure and mixed minimax values, the Simons-like inequality over
//! eventually periodic sequences, and executable theorem checkers.
//!
//! Hypotheses that hold automatically on finite index sets (boundedness,
//! compactness, semicontinuity, equicontinuity, the Simons-like inequality
//! itself) are listed as `satisfied-by-finiteness` rather than dropped, so a
//! check always documents the full hypothesis list of its theorem.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::genconvex::{is_infsup_convex, is_supinf_concave, is_t_convexlike, supinf_concave_value};
use crate::lp::{GameSolution, solve_zero_sum};
use crate::report::{ConvexityReport, Hypothesis, TheoremCheck, TheoremId};
use crate::{BiMatrix, IndexSequence, Result, Tolerance};

/// Default longest cycle sampled by [`check_km2`].
pub const DEFAULT_MAX_CYCLE: usize = 3;

/// `(max_j min_i F, min_i max_j F)`.
pub fn pure_values(f: &BiMatrix) -> (f64, f64) {
    let upper = (0..f.rows())
        .map(|i| crate::max_of(f.row(i)))
        .fold(f64::INFINITY, f64::min);
    let lower = (0..f.cols())
        .map(|j| f.column(j).fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    (lower, upper)
}

/// Lowest `i` minimizing `max_j F[i][j]`.
pub fn argmin_row_max(f: &BiMatrix) -> usize {
    let mut best = (0, f64::INFINITY);
    for i in 0..f.rows() {
        let v = crate::max_of(f.row(i));
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Lower, mixed and upper values of `F` with the attaining strategies.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValueReport {
    pub lower: f64,
    pub upper: f64,
    pub mixed: f64,
    pub gap: f64,
    pub solution: GameSolution,
}

pub fn value_report(f: &BiMatrix, tol: &Tolerance) -> Result<ValueReport> {
    let (lower, upper) = pure_values(f);
    let solution = solve_zero_sum(f, tol)?;
    Ok(ValueReport {
        lower,
        upper,
        mixed: solution.value,
        gap: upper - lower,
        solution,
    })
}

impl ValueReport {
    pub fn is_consistent(&self, tol: &Tolerance) -> bool {
        self.lower <= self.mixed + tol.eps_opt && self.mixed <= self.upper + tol.eps_opt && self.gap >= -tol.eps_opt
    }
}

/// Mixed-value identities with attaining measures, checked on `F`.
///
/// If `F` is infsup-convex, the column strategy attains the upper value:
/// `min_i (Fμ)_i = min_i max_j F`. If `F` is supinf-concave, the row strategy
/// attains the lower value: `max_j (λᵀF)_j = max_j min_i F`. Each part is
/// conditional, so the check is never vacuous.
pub fn check_lem2(f: &BiMatrix, tol: &Tolerance) -> Result<TheoremCheck> {
    let report = value_report(f, tol)?;
    let infsup = is_infsup_convex(f, tol)?;
    let supinf = is_supinf_concave(f, tol)?;
    let col_floor = report.solution.col_guarantee(f);
    let row_ceiling = report.solution.row_guarantee(f);
    let part_i = !infsup.holds || (col_floor - report.upper).abs() <= tol.eps_opt;
    let part_ii = !supinf.holds || (row_ceiling - report.lower).abs() <= tol.eps_opt;
    let hypotheses = vec![
        Hypothesis::by_finiteness("f_bounded"),
        Hypothesis::checked("part_i_applies", true, format!("infsup-convex: {}", infsup.holds)),
        Hypothesis::checked("part_ii_applies", true, format!("supinf-concave: {}", supinf.holds)),
    ];
    Ok(TheoremCheck::new(
        TheoremId::Lem2,
        hypotheses,
        part_i && part_ii,
        &[
            ("lower", report.lower),
            ("upper", report.upper),
            ("mixed", report.mixed),
            ("col_strategy_floor", col_floor),
            ("row_strategy_ceiling", row_ceiling),
        ],
    ))
}

/// `limsup_k F[x_k][j]` for each column: the maximum over the cycle's rows.
pub fn limsup_over_sequence(f: &BiMatrix, seq: &IndexSequence) -> Result<Vec<f64>> {
    seq.validate_for(f)?;
    let mut out = vec![f64::NEG_INFINITY; f.cols()];
    for &i in &seq.cycle {
        for (o, &x) in out.iter_mut().zip(f.row(i)) {
            *o = o.max(x);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimonsCheck {
    pub holds: bool,
    /// `sup_j limsup − inf_i sup_j F`; nonnegative when the inequality holds.
    pub slack: f64,
}

/// `inf_i sup_j F ≤ sup_j limsup_k F[x_k][j]` for the given sequence.
pub fn simons_like_check(f: &BiMatrix, seq: &IndexSequence, tol: &Tolerance) -> Result<SimonsCheck> {
    let limsup = limsup_over_sequence(f, seq)?;
    let (_, upper) = pure_values(f);
    let rhs = crate::max_of(&limsup);
    Ok(SimonsCheck {
        holds: upper <= rhs + tol.eps_feas,
        slack: rhs - upper,
    })
}

fn convexlike_hypothesis(report: &ConvexityReport, who: &str) -> Hypothesis {
    let t = report.t.unwrap_or_default();
    let detail = match &report.witness {
        None => format!("t = {t}"),
        Some(w) => format!("t = {t}; no row below the mixture of rows {:?}", w.pair),
    };
    Hypothesis::checked(&format!("{who}_t_convexlike"), report.holds, detail)
}

fn value_hypothesis(report: &ConvexityReport, name: &str) -> Hypothesis {
    Hypothesis::checked(
        name,
        report.holds,
        format!(
            "pure {} vs mixed {}",
            report.lhs_value.unwrap_or_default(),
            report.rhs_value.unwrap_or_default()
        ),
    )
}

/// Finite analogue of the witness-net lemma: the constant sequence at
/// `i* = argmin_i max_j F` satisfies
/// `sup_j limsup F[i*][j] ≤ sup over conv of columns of inf_i`.
pub fn witness_row(f: &BiMatrix, t: f64, tol: &Tolerance) -> Result<(usize, TheoremCheck)> {
    let hyp = is_t_convexlike(f, t, tol)?;
    let star = argmin_row_max(f);
    let limsup_sup = crate::max_of(&limsup_over_sequence(f, &IndexSequence::constant(star))?);
    let supinf = supinf_concave_value(f, tol)?;
    let check = TheoremCheck::new(
        TheoremId::Corollary0,
        vec![
            convexlike_hypothesis(&hyp, "f"),
            Hypothesis::by_finiteness("columns_bounded"),
        ],
        limsup_sup <= supinf + tol.eps_opt,
        &[
            ("witness_row", star as f64),
            ("sup_limsup", limsup_sup),
            ("supinf_concave_value", supinf),
        ],
    );
    Ok((star, check))
}

/// Two-function minimax inequality `inf sup F ≤ sup inf G` under:
/// F t-convexlike, the Simons-like inequality (automatic here), G
/// supinf-concave and `F ≤ G`.
pub fn check_km1(f: &BiMatrix, g: &BiMatrix, t: f64, tol: &Tolerance) -> Result<TheoremCheck> {
    f.same_shape(g)?;
    let convexlike = is_t_convexlike(f, t, tol)?;
    let concave = is_supinf_concave(g, tol)?;
    let below = f.dominated_by(g, tol.eps_feas)?;
    let hypotheses = vec![
        Hypothesis::by_finiteness("f_bounded_on_x"),
        convexlike_hypothesis(&convexlike, "f"),
        Hypothesis::by_finiteness("simons_like_inequality"),
        value_hypothesis(&concave, "g_supinf_concave"),
        Hypothesis::checked(
            "f_le_g",
            below,
            if below {
                "entrywise"
            } else {
                "some entry of f exceeds g"
            },
        ),
    ];
    Ok(two_function_conclusion(TheoremId::Km1, hypotheses, f, g, tol))
}

fn two_function_conclusion(
    id: TheoremId,
    hypotheses: Vec<Hypothesis>,
    f: &BiMatrix,
    g: &BiMatrix,
    tol: &Tolerance,
) -> TheoremCheck {
    let (_, inf_sup_f) = pure_values(f);
    let (sup_inf_g, _) = pure_values(g);
    TheoremCheck::new(
        id,
        hypotheses,
        inf_sup_f <= sup_inf_g + tol.eps_opt,
        &[("inf_sup_f", inf_sup_f), ("sup_inf_g", sup_inf_g)],
    )
}

/// Compact, lower-semicontinuous variant of [`check_km1`]. On a finite
/// discrete `X` compactness and semicontinuity are automatic.
pub fn check_app2(f: &BiMatrix, g: &BiMatrix, t: f64, tol: &Tolerance) -> Result<TheoremCheck> {
    let mut check = check_km1(f, g, t, tol)?;
    check.theorem = TheoremId::App2;
    check.hypotheses.retain(|h| h.name != "simons_like_inequality");
    check
        .hypotheses
        .insert(0, Hypothesis::by_finiteness("x_compact_hausdorff"));
    check
        .hypotheses
        .insert(2, Hypothesis::by_finiteness("f_lower_semicontinuous_on_x"));
    check.hypotheses.insert(3, Hypothesis::by_finiteness("g_bounded_on_x"));
    Ok(check)
}

/// Two-function minimax inequality `inf sup H ≤ sup inf L` under H
/// infsup-convex (equicontinuity automatic on finite Y), L supinf-concave
/// and `H ≤ L`.
pub fn check_cor_equic(h: &BiMatrix, l: &BiMatrix, tol: &Tolerance) -> Result<TheoremCheck> {
    h.same_shape(l)?;
    let infsup = is_infsup_convex(h, tol)?;
    let supinf = is_supinf_concave(l, tol)?;
    let below = h.dominated_by(l, tol.eps_feas)?;
    let hypotheses = vec![
        Hypothesis::by_finiteness("h_bounded"),
        Hypothesis::by_finiteness("y_pseudocompact"),
        value_hypothesis(&infsup, "h_infsup_convex"),
        Hypothesis::by_finiteness("h_family_equicontinuous"),
        value_hypothesis(&supinf, "l_supinf_concave"),
        Hypothesis::checked(
            "h_le_l",
            below,
            if below {
                "entrywise"
            } else {
                "some entry of h exceeds l"
            },
        ),
    ];
    Ok(two_function_conclusion(TheoremId::CorEquic, hypotheses, h, l, tol))
}

/// One-function equivalence on a bounded, t-convexlike, supinf-concave `F`:
/// the Simons-like inequality holds and the minimax equality holds. Uses
/// cycles of length at most [`DEFAULT_MAX_CYCLE`].
pub fn check_km2(f: &BiMatrix, t: f64, tol: &Tolerance) -> Result<TheoremCheck> {
    check_km2_with(f, t, tol, DEFAULT_MAX_CYCLE)
}

/// As [`check_km2`] with an explicit cycle-length cap.
///
/// The limsup of an eventually periodic sequence depends only on the set of
/// rows in its cycle, so every row subset of size `≤ max_cycle` is sampled
/// once, covering all cycles of that length.
pub fn check_km2_with(f: &BiMatrix, t: f64, tol: &Tolerance, max_cycle: usize) -> Result<TheoremCheck> {
    let convexlike = is_t_convexlike(f, t, tol)?;
    let concave = is_supinf_concave(f, tol)?;
    let (lower, upper) = pure_values(f);

    let mut sampled = 0usize;
    let mut min_slack = f64::INFINITY;
    let mut simons_ok = true;
    let mut subset = Vec::with_capacity(max_cycle);
    for_each_subset(f.rows(), max_cycle.max(1), &mut subset, &mut |cycle| {
        let seq = IndexSequence {
            prefix: Vec::new(),
            cycle: cycle.to_vec(),
        };
        // Indices come from 0..rows, so this cannot fail.
        if let Ok(c) = simons_like_check(f, &seq, tol) {
            sampled += 1;
            min_slack = min_slack.min(c.slack);
            simons_ok &= c.holds;
        }
    });

    let hypotheses = vec![
        Hypothesis::by_finiteness("f_bounded_on_x"),
        convexlike_hypothesis(&convexlike, "f"),
        value_hypothesis(&concave, "f_supinf_concave"),
    ];
    Ok(TheoremCheck::new(
        TheoremId::Km2,
        hypotheses,
        simons_ok && (upper - lower).abs() <= tol.eps_opt,
        &[
            ("lower", lower),
            ("upper", upper),
            ("gap", upper - lower),
            ("sequences_sampled", sampled as f64),
            ("min_simons_slack", min_slack),
        ],
    ))
}

fn for_each_subset(n: usize, max_len: usize, current: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    let start = current.last().map_or(0, |&i| i + 1);
    for i in start..n {
        current.push(i);
        visit(current);
        if current.len() < max_len {
            for_each_subset(n, max_len, current, visit);
        }
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate_bimatrix;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn mat(rows: &[&[f64]]) -> BiMatrix {
        let v: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        validate_bimatrix(&v).unwrap()
    }

    fn mp() -> BiMatrix {
        mat(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn zero_row() -> BiMatrix {
        mat(&[&[0.0, 0.0], &[1.0, 1.0]])
    }

    #[test]
    fn pure_value_examples() {
        assert_eq!(pure_values(&mp()), (0.0, 1.0));
        assert_eq!(pure_values(&mat(&[&[4.0]])), (4.0, 4.0));
        assert_eq!(pure_values(&zero_row()), (0.0, 0.0));
    }

    #[test]
    fn value_report_examples() {
        let r = value_report(&mp(), &tol()).unwrap();
        assert_eq!((r.lower, r.upper, r.gap), (0.0, 1.0, 1.0));
        assert!((r.mixed - 0.5).abs() < 1e-12);
        assert!(r.is_consistent(&tol()));
        let r = value_report(&zero_row(), &tol()).unwrap();
        assert_eq!((r.lower, r.upper, r.gap), (0.0, 0.0, 0.0));
        assert!(r.mixed.abs() < 1e-12);
        let r = value_report(&mat(&[&[-2.0]]), &tol()).unwrap();
        assert_eq!((r.lower, r.upper, r.gap), (-2.0, -2.0, 0.0));
        assert!((r.mixed + 2.0).abs() < 1e-12);
    }

    #[test]
    fn lem2_attaining_measures() {
        for f in [mp(), zero_row(), mat(&[&[3.0]]), mat(&[&[0.0, 1.0], &[0.0, 1.0]])] {
            let c = check_lem2(&f, &tol()).unwrap();
            assert!(!c.vacuous);
            assert!(c.conclusion_holds, "{c:?}");
        }
    }

    #[test]
    fn limsup_examples() {
        let f = mp();
        assert_eq!(
            limsup_over_sequence(&f, &IndexSequence::constant(0)).unwrap(),
            vec![0.0, 1.0]
        );
        let both = IndexSequence::new(vec![], vec![0, 1]).unwrap();
        assert_eq!(limsup_over_sequence(&f, &both).unwrap(), vec![1.0, 1.0]);
        let g = mat(&[&[1.0, -2.0, 3.0], &[0.0, 5.0, -1.0], &[2.0, 2.0, 2.0]]);
        let all = IndexSequence::new(vec![], vec![0, 1, 2]).unwrap();
        assert_eq!(limsup_over_sequence(&g, &all).unwrap(), vec![2.0, 5.0, 3.0]);
        let bad = IndexSequence::constant(9);
        assert!(limsup_over_sequence(&g, &bad).is_err());
    }

    #[test]
    fn simons_examples() {
        let c = simons_like_check(&mp(), &IndexSequence::constant(0), &tol()).unwrap();
        assert!(c.holds);
        assert_eq!(c.slack, 0.0);
        let c = simons_like_check(&mp(), &IndexSequence::new(vec![], vec![0, 1]).unwrap(), &tol()).unwrap();
        assert!(c.holds);
        assert_eq!(c.slack, 0.0);
        let c = simons_like_check(&mat(&[&[7.0]]), &IndexSequence::constant(0), &tol()).unwrap();
        assert!(c.holds && c.slack == 0.0);
    }

    #[test]
    fn witness_row_examples() {
        let (i, c) = witness_row(&zero_row(), 0.5, &tol()).unwrap();
        assert_eq!(i, 0);
        assert!(!c.vacuous && c.conclusion_holds);
        let (_, c) = witness_row(&mp(), 0.5, &tol()).unwrap();
        assert!(c.vacuous);
    }

    #[test]
    fn km1_examples() {
        let c = check_km1(&zero_row(), &zero_row(), 0.5, &tol()).unwrap();
        assert!(!c.vacuous && c.conclusion_holds);
        assert_eq!(c.numbers["inf_sup_f"], 0.0);
        let g = mat(&[&[-1.0, -1.0], &[0.0, 0.0]]);
        let c = check_km1(&zero_row(), &g, 0.5, &tol()).unwrap();
        assert!(c.vacuous);
        assert!(!c.hypotheses.iter().find(|h| h.name == "f_le_g").unwrap().satisfied);
        assert!(check_km1(&zero_row(), &mat(&[&[0.0]]), 0.5, &tol()).is_err());
    }

    #[test]
    fn app2_mirrors_km1() {
        let c = check_app2(&zero_row(), &zero_row(), 0.5, &tol()).unwrap();
        assert_eq!(c.theorem, TheoremId::App2);
        assert!(!c.vacuous && c.conclusion_holds);
        assert!(
            c.hypotheses
                .iter()
                .any(|h| h.name == "f_lower_semicontinuous_on_x" && h.detail == "satisfied-by-finiteness")
        );
        let g = mat(&[&[-1.0, -1.0], &[0.0, 0.0]]);
        assert!(check_app2(&zero_row(), &g, 0.5, &tol()).unwrap().vacuous);
    }

    #[test]
    fn km2_examples() {
        let c = check_km2(&zero_row(), 0.5, &tol()).unwrap();
        assert!(!c.vacuous && c.conclusion_holds);
        assert_eq!(c.numbers["sequences_sampled"], 3.0);
        assert!(check_km2(&mp(), 0.5, &tol()).unwrap().vacuous);
    }

    #[test]
    fn cor_equic_examples() {
        let c = check_cor_equic(&zero_row(), &zero_row(), &tol()).unwrap();
        assert!(!c.vacuous && c.conclusion_holds);
        let c = check_cor_equic(&mp(), &mp(), &tol()).unwrap();
        assert!(c.vacuous);
        assert!(
            !c.hypotheses
                .iter()
                .find(|h| h.name == "h_infsup_convex")
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn subset_enumeration_counts() {
        let mut count = 0;
        for_each_subset(5, 3, &mut Vec::new(), &mut |_| count += 1);
        assert_eq!(count, 5 + 10 + 10);
    }

    fn small_matrix() -> impl Strategy<Value = BiMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(m, n)| {
            prop::collection::vec(-1.0f64..1.0, m * n).prop_map(move |d| BiMatrix::from_flat(m, n, d).unwrap())
        })
    }

    fn matrix_and_sequence() -> impl Strategy<Value = (BiMatrix, IndexSequence)> {
        small_matrix().prop_flat_map(|f| {
            let m = f.rows();
            (
                Just(f),
                prop::collection::vec(0..m, 0..4),
                prop::collection::vec(0..m, 1..5),
            )
                .prop_map(|(f, prefix, cycle)| (f, IndexSequence { prefix, cycle }))
        })
    }

    proptest! {
        #[test]
        fn simons_like_always_holds((f, seq) in matrix_and_sequence()) {
            let c = simons_like_check(&f, &seq, &tol()).unwrap();
            prop_assert!(c.holds);
            prop_assert!(c.slack >= 0.0);
        }

        #[test]
        fn limsup_ignores_prefix_and_rotation((f, seq) in matrix_and_sequence(), k in 0usize..5) {
            let base = limsup_over_sequence(&f, &seq).unwrap();
            let mut cycle = seq.cycle.clone();
            let r = k % cycle.len();
            cycle.rotate_left(r);
            let rotated = IndexSequence { prefix: vec![0; k], cycle };
            prop_assert_eq!(limsup_over_sequence(&f, &rotated).unwrap(), base);
        }

        #[test]
        fn minimax_equality_law(f in small_matrix()) {
            let r = value_report(&f, &tol()).unwrap();
            prop_assert!(r.is_consistent(&tol()));
            if is_infsup_convex(&f, &tol()).unwrap().holds && is_supinf_concave(&f, &tol()).unwrap().holds {
                prop_assert!(r.gap <= tol().eps_opt);
            }
        }

        #[test]
        fn km2_law(f in small_matrix(), t in prop::sample::select(vec![0.25, 0.5, 0.75])) {
            prop_assert!(check_km2(&f, t, &tol()).unwrap().passes());
        }

        #[test]
        fn monotone_in_entries(f in small_matrix(), bump in prop::collection::vec(0.0f64..0.5, 25)) {
            let g = BiMatrix::from_fn(f.rows(), f.cols(), |i, j| f.get(i, j) + bump[i * 5 + j]).unwrap();
            let a = value_report(&f, &tol()).unwrap();
            let b = value_report(&g, &tol()).unwrap();
            let e = tol().eps_opt;
            prop_assert!(a.lower <= b.lower + e && a.mixed <= b.mixed + e && a.upper <= b.upper + e);
        }
    }
}
