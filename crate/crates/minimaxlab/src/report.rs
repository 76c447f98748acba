//! Report documents emitted by the CLI and their re-verification.

use minimaxlab_core::alternative::{AlternativeOutcome, FunctionFamily, decide_alternative, verify_certificate};
use minimaxlab_core::construct::{Guarantee, lipschitz_transfer_check, lipschitz_transfer_holds};
use minimaxlab_core::genconvex::{
    check_prop22, is_infsup_convex, is_s_concavelike, is_supinf_concave, is_t_convexlike,
};
use minimaxlab_core::lp::{GameSolution, solve_zero_sum};
use minimaxlab_core::mazur::{DecayReport, MazurResult, SampledSequence, ScheduleEntry, verify_mazur};
use minimaxlab_core::minimax::{
    ValueReport, check_app2, check_cor_equic, check_km1, check_km2, check_lem2, pure_values, value_report, witness_row,
};
use minimaxlab_core::report::{ConvexityReport, TheoremCheck, TheoremId};
use minimaxlab_core::{BiMatrix, Tolerance};
use serde::{Deserialize, Serialize};

use crate::io::{Body, Instance, InstanceDigest};

pub const TOOL: &str = "minimaxlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The default convexity sample.
pub const DEFAULT_PARAMS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifiedOutcome {
    pub outcome: AlternativeOutcome,
    pub verified: bool,
    pub gray_zone: bool,
}

/// Full analysis of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub tolerance: Tolerance,
    pub instance: InstanceDigest,
    pub values: ValueReport,
    pub convexity: Vec<ConvexityReport>,
    pub theorems: Vec<TheoremCheck>,
    /// Manifest guarantees re-checked by the classifiers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub guarantees: Vec<GuaranteeCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative: Option<VerifiedOutcome>,
    pub certificates_verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeCheck {
    pub name: String,
    pub verified: bool,
}

impl AnalysisReport {
    /// Theorem checks that ran non-vacuously and failed.
    pub fn violations(&self) -> impl Iterator<Item = &TheoremCheck> {
        self.theorems.iter().filter(|c| !c.passes())
    }

    pub fn exit_ok(&self) -> bool {
        self.certificates_verified && self.violations().next().is_none() && self.guarantees.iter().all(|g| g.verified)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub ts: Vec<f64>,
    pub ss: Vec<f64>,
    /// Restrict theorem checks; `None` runs every applicable one.
    pub theorems: Option<Vec<TheoremId>>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            ts: DEFAULT_PARAMS.to_vec(),
            ss: DEFAULT_PARAMS.to_vec(),
            theorems: None,
        }
    }
}

impl AnalysisOptions {
    fn wants(&self, id: TheoremId) -> bool {
        self.theorems.as_ref().is_none_or(|ids| ids.contains(&id))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("{0} input cannot be analyzed; use the mazur subcommand")]
    WrongKind(&'static str),
    #[error(transparent)]
    Core(#[from] minimaxlab_core::Error),
}

pub fn analyze(instance: &Instance, opts: &AnalysisOptions, tol: &Tolerance) -> Result<AnalysisReport, AnalysisError> {
    let f = instance
        .primary()
        .ok_or(AnalysisError::WrongKind(instance.doc.kind()))?;
    let values = value_report(f, tol)?;

    let mut convexity = Vec::with_capacity(opts.ts.len() + opts.ss.len() + 2);
    for &t in &opts.ts {
        convexity.push(is_t_convexlike(f, t, tol)?);
    }
    for &s in &opts.ss {
        convexity.push(is_s_concavelike(f, s, tol)?);
    }
    convexity.push(is_infsup_convex(f, tol)?);
    convexity.push(is_supinf_concave(f, tol)?);

    let mut theorems = Vec::new();
    if opts.wants(TheoremId::Lem2) {
        theorems.push(check_lem2(f, tol)?);
    }
    let with_t = |mut c: TheoremCheck, t: f64| {
        c.numbers.insert("t".into(), t);
        c
    };
    for &t in &opts.ts {
        if opts.wants(TheoremId::Infsup) {
            theorems.push(with_t(check_prop22(f, t, tol)?, t));
        }
        if opts.wants(TheoremId::Corollary0) {
            theorems.push(with_t(witness_row(f, t, tol)?.1, t));
        }
        if opts.wants(TheoremId::Km2) {
            theorems.push(with_t(check_km2(f, t, tol)?, t));
        }
    }
    if let Body::Pair { f, g, .. } = &instance.body {
        for &t in &opts.ts {
            if opts.wants(TheoremId::Km1) {
                theorems.push(with_t(check_km1(f, g, t, tol)?, t));
            }
            if opts.wants(TheoremId::App2) {
                theorems.push(with_t(check_app2(f, g, t, tol)?, t));
            }
        }
        if opts.wants(TheoremId::CorEquic) {
            theorems.push(check_cor_equic(f, g, tol)?);
        }
    }

    let guarantees = check_guarantees(instance, &opts.ts, &opts.ss, tol)?;
    let alternative = match &instance.body {
        Body::Family(fam) => Some(alternative_for(fam, tol)?),
        _ => None,
    };
    let certificates_verified = values.solution.verify(f, tol) && alternative.as_ref().is_none_or(|a| a.verified);
    Ok(AnalysisReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        tolerance: *tol,
        instance: instance.digest(),
        values,
        convexity,
        theorems,
        guarantees,
        alternative,
        certificates_verified,
    })
}

/// Re-check each guarantee an instance manifest claims. Mixing-parameter
/// properties are checked on `ts` / `ss`, or the default sample if empty.
pub fn check_guarantees(
    instance: &Instance,
    ts: &[f64],
    ss: &[f64],
    tol: &Tolerance,
) -> minimaxlab_core::Result<Vec<GuaranteeCheck>> {
    let Some(f) = instance.primary() else {
        return Ok(Vec::new());
    };
    let ts = if ts.is_empty() { &DEFAULT_PARAMS[..] } else { ts };
    let ss = if ss.is_empty() { &DEFAULT_PARAMS[..] } else { ss };
    let convexlike = |m: &BiMatrix| -> minimaxlab_core::Result<bool> {
        for &t in ts {
            if !is_t_convexlike(m, t, tol)?.holds {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let concavelike = |m: &BiMatrix| -> minimaxlab_core::Result<bool> {
        for &s in ss {
            if !is_s_concavelike(m, s, tol)?.holds {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let second = match &instance.body {
        Body::Pair { g, .. } => Some(g),
        _ => None,
    };
    let mut out = Vec::new();
    for &g in instance.guarantees() {
        let verified = match g {
            Guarantee::TConvexlike => convexlike(f)?,
            Guarantee::SConcavelike => concavelike(f)?,
            Guarantee::InfsupConvex => is_infsup_convex(f, tol)?.holds,
            Guarantee::SupinfConcave => is_supinf_concave(f, tol)?.holds,
            Guarantee::Km2Ready => {
                let (lower, upper) = pure_values(f);
                convexlike(f)? && is_supinf_concave(f, tol)?.holds && (upper - lower).abs() <= tol.eps_opt
            }
            Guarantee::LipschitzTransfer => match &instance.body {
                Body::InfConv { inst, .. } => lipschitz_transfer_check(inst, tol),
                Body::Pair {
                    transfer: Some((xi, k)),
                    ..
                } => lipschitz_transfer_holds(f, xi, *k, tol),
                _ => false,
            },
            Guarantee::GSConcavelike => match second {
                Some(g) => concavelike(g)?,
                None => false,
            },
            Guarantee::GSupinfConcave => match second {
                Some(g) => is_supinf_concave(g, tol)?.holds,
                None => false,
            },
            Guarantee::FLeG => match second {
                Some(g) => f.dominated_by(g, tol.eps_feas)?,
                None => false,
            },
        };
        out.push(GuaranteeCheck {
            name: g.name().into(),
            verified,
        });
    }
    Ok(out)
}

pub fn alternative_for(fam: &FunctionFamily, tol: &Tolerance) -> minimaxlab_core::Result<VerifiedOutcome> {
    let outcome = decide_alternative(fam, tol)?;
    let verified = verify_certificate(&outcome, fam, tol)?;
    Ok(VerifiedOutcome {
        gray_zone: outcome.in_gray_zone(tol),
        outcome,
        verified,
    })
}

/// Output of the `game` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub tool: String,
    pub version: String,
    pub tolerance: Tolerance,
    pub instance: InstanceDigest,
    pub solution: GameSolution,
    pub verified: bool,
}

pub fn game_report(instance: &Instance, f: &BiMatrix, tol: &Tolerance) -> minimaxlab_core::Result<GameReport> {
    let solution = solve_zero_sum(f, tol)?;
    Ok(GameReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        tolerance: *tol,
        instance: instance.digest(),
        verified: solution.verify(f, tol),
        solution,
    })
}

/// Output of the `alternative` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeReport {
    pub tool: String,
    pub version: String,
    pub tolerance: Tolerance,
    pub instance: InstanceDigest,
    pub result: VerifiedOutcome,
}

/// Output of the `mazur` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MazurReport {
    pub tool: String,
    pub version: String,
    pub tolerance: Tolerance,
    pub instance: InstanceDigest,
    pub result: MazurResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<ScheduleEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayReport>,
    pub verified: bool,
}

impl MazurReport {
    pub fn results(&self) -> impl Iterator<Item = &MazurResult> {
        core::iter::once(&self.result).chain(self.schedule.iter().flatten().filter_map(|e| e.result.as_ref()))
    }
}

pub fn mazur_verified(results: &[&MazurResult], seq: &SampledSequence, tol: &Tolerance) -> bool {
    results.iter().all(|r| verify_mazur(r, seq, tol))
}

/// Any document the CLI emits, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Analysis(AnalysisReport),
    Game(GameReport),
    Alternative(AlternativeReport),
    Mazur(MazurReport),
}

impl Document {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    fn digest(&self) -> &InstanceDigest {
        match self {
            Self::Analysis(r) => &r.instance,
            Self::Game(r) => &r.instance,
            Self::Alternative(r) => &r.instance,
            Self::Mazur(r) => &r.instance,
        }
    }

    fn tolerance(&self) -> &Tolerance {
        match self {
            Self::Analysis(r) => &r.tolerance,
            Self::Game(r) => &r.tolerance,
            Self::Alternative(r) => &r.tolerance,
            Self::Mazur(r) => &r.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
}

/// Output of the `verify` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub document: String,
    pub verified: bool,
    pub checks: Vec<Check>,
}

/// Re-check every certificate in `doc` against `instance` from scratch,
/// using the tolerance recorded in the document.
pub fn verify_document(doc: &Document, instance: &Instance) -> Verification {
    let tol = doc.tolerance();
    let mut checks = vec![Check {
        name: "instance_digest".into(),
        ok: *doc.digest() == instance.digest(),
    }];
    let mut push = |name: &str, ok: bool| checks.push(Check { name: name.into(), ok });
    let kind = match doc {
        Document::Analysis(r) => {
            match instance.primary() {
                Some(f) => {
                    push("game_solution", r.values.solution.verify(f, tol));
                    let (lower, upper) = pure_values(f);
                    push("pure_values", lower == r.values.lower && upper == r.values.upper);
                }
                None => push("game_solution", false),
            }
            if let Some(alt) = &r.alternative {
                push("alternative_certificate", outcome_ok(&alt.outcome, instance, tol));
            }
            "analysis"
        }
        Document::Game(r) => {
            push(
                "game_solution",
                instance.primary().is_some_and(|f| r.solution.verify(f, tol)),
            );
            "game"
        }
        Document::Alternative(r) => {
            push("alternative_certificate", outcome_ok(&r.result.outcome, instance, tol));
            "alternative"
        }
        Document::Mazur(r) => {
            let ok = match &instance.body {
                Body::Sequence(seq) => r.results().all(|m| verify_mazur(m, seq, tol)),
                _ => false,
            };
            push("mazur_norms", ok);
            "mazur"
        }
    };
    Verification {
        document: kind.into(),
        verified: checks.iter().all(|c| c.ok),
        checks,
    }
}

fn outcome_ok(outcome: &AlternativeOutcome, instance: &Instance, tol: &Tolerance) -> bool {
    match &instance.body {
        Body::Family(fam) => verify_certificate(outcome, fam, tol).unwrap_or(false),
        _ => false,
    }
}
