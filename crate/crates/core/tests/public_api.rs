use minimaxlab_core::alternative::{AlternativeOutcome, FunctionFamily, decide_alternative, verify_certificate};
use minimaxlab_core::construct::{InstanceKind, XiVector, gen_instance, inf_convolution};
use minimaxlab_core::genconvex::{is_infsup_convex, is_t_convexlike};
use minimaxlab_core::lp::{Direction, LpProblem, LpStatus, Sense, solve_lp, solve_zero_sum};
use minimaxlab_core::mazur::{
    SampledSequence, WindowPolicy, mazur_extract, mazur_schedule, pointwise_decay_report, verify_mazur,
};
use minimaxlab_core::minimax::{check_km2, value_report};
use minimaxlab_core::{Error, Tolerance, validate_bimatrix};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn m(rows: &[&[f64]]) -> minimaxlab_core::BiMatrix {
    validate_bimatrix(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn pennies_value_and_gap() {
    let f = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let r = value_report(&f, &tol()).unwrap();
    assert_eq!((r.lower, r.upper), (0.0, 1.0));
    assert!((r.mixed - 0.5).abs() < 1e-9);
    assert!(r.solution.verify(&f, &tol()));
    assert!(!is_infsup_convex(&f, &tol()).unwrap().holds);
    assert!(!is_t_convexlike(&f, 0.5, &tol()).unwrap().holds);
}

#[test]
fn rock_paper_scissors() {
    let f = m(&[&[0.0, 1.0, -1.0], &[-1.0, 0.0, 1.0], &[1.0, -1.0, 0.0]]);
    let s = solve_zero_sum(&f, &tol()).unwrap();
    assert!(s.value.abs() < 1e-9);
    for w in s.row_weights.iter().chain(s.col_weights.iter()) {
        assert!((w - 1.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn lp_small_textbook() {
    // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3.
    let mut lp = LpProblem::new(Direction::Maximize, vec![3.0, 2.0]);
    lp.add_constraint(&[1.0, 1.0], Sense::Le, 4.0).unwrap();
    lp.add_constraint(&[1.0, 3.0], Sense::Le, 6.0).unwrap();
    lp.add_constraint(&[1.0, 0.0], Sense::Le, 3.0).unwrap();
    let s = solve_lp(&lp, &tol()).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.objective - 11.0).abs() < 1e-9);
    assert!(s.certify(&lp, &tol()));
}

#[test]
fn lp_unbounded() {
    let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 1.0]);
    lp.add_constraint(&[1.0, -1.0], Sense::Le, 1.0).unwrap();
    assert_eq!(solve_lp(&lp, &tol()).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn alternative_examples() {
    let fam = |rows: &[&[f64]]| FunctionFamily::new(m(rows));
    let a1 = fam(&[&[-1.0, -2.0]]);
    let out = decide_alternative(&a1, &tol()).unwrap();
    assert!(matches!(out, AlternativeOutcome::A1 { sup_value, .. } if (sup_value + 1.0).abs() < 1e-9));
    assert!(verify_certificate(&out, &a1, &tol()).unwrap());

    let a2 = fam(&[&[1.0, 1.0]]);
    let out = decide_alternative(&a2, &tol()).unwrap();
    assert_eq!(out.tag(), "A2");
    assert!(verify_certificate(&out, &a2, &tol()).unwrap());
}

#[test]
fn generated_km2_ready_has_no_gap() {
    for seed in 0..20 {
        let inst = gen_instance(seed, (5, 4), InstanceKind::Km2Ready).unwrap();
        let r = value_report(&inst.f, &tol()).unwrap();
        assert!(r.gap.abs() < 1e-7, "seed {seed}: gap {}", r.gap);
        let check = check_km2(&inst.f, 0.5, &tol()).unwrap();
        assert!(check.vacuous || check.conclusion_holds);
    }
}

#[test]
fn generator_is_deterministic() {
    let a = gen_instance(42, (6, 5), InstanceKind::TwoFunction).unwrap();
    let b = gen_instance(42, (6, 5), InstanceKind::TwoFunction).unwrap();
    assert_eq!(a.f, b.f);
    assert_eq!(a.g, b.g);
}

#[test]
fn inf_convolution_never_exceeds_g() {
    let g = m(&[&[3.0, 1.0], &[0.0, 2.0]]);
    let inst = inf_convolution(&g, &XiVector::new(vec![0.0, 0.0]).unwrap(), 1.0).unwrap();
    for x in 0..2 {
        for y in 0..2 {
            assert!(inst.f.get(x, y) <= g.get(x, y));
        }
    }
}

#[test]
fn mazur_powers() {
    let seq = SampledSequence::from_fn(100, 64, 1, |n, z, _| (0.9 * z as f64 / 63.0).powi(n as i32 + 1)).unwrap();
    let r = mazur_extract(&seq, 1, 100, &tol()).unwrap();
    let want = 0.9f64.powi(100);
    assert!((r.norm - want).abs() <= 1e-9 * want);
    assert_eq!(r.heaviest(), 100);
    assert!(verify_mazur(&r, &seq, &tol()));

    let schedule = mazur_schedule(&seq, &[0.5, 0.1, 0.01], WindowPolicy::FixedEnd, &tol()).unwrap();
    assert!(schedule.iter().all(|e| e.met));

    let decay = pointwise_decay_report(&seq, &[1, 50]).unwrap();
    assert_eq!(decay.values.len(), 2);
    assert!(decay.values[1][63] <= decay.values[0][63]);

    assert!(matches!(
        mazur_extract(&seq, 0, 10, &tol()),
        Err(Error::BadWindow { start: 0, .. })
    ));
    assert!(mazur_schedule(&seq, &[0.1, 0.5], WindowPolicy::Growing, &tol()).is_err());
}
