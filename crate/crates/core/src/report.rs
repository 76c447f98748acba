//! Report types shared by the classifiers and theorem checkers.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// Convexity notion a [`ConvexityReport`] speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Property {
    #[cfg_attr(feature = "serde", serde(rename = "t-convexlike"))]
    TConvexlike,
    #[cfg_attr(feature = "serde", serde(rename = "t-concavelike"))]
    TConcavelike,
    #[cfg_attr(feature = "serde", serde(rename = "infsup-convex"))]
    InfsupConvex,
    #[cfg_attr(feature = "serde", serde(rename = "supinf-concave"))]
    SupinfConcave,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Self::TConvexlike => "t-convexlike",
            Self::TConcavelike => "t-concavelike",
            Self::InfsupConvex => "infsup-convex",
            Self::SupinfConcave => "supinf-concave",
        }
    }
}

/// Failing pair for a pairwise (convexlike/concavelike) scan, plus the
/// mixture no row (or column) could match.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub pair: (usize, usize),
    pub mixture: Vec<f64>,
}

/// Outcome of a convexity classifier.
///
/// Pairwise properties carry the mixing parameter in `t` and a witness on
/// failure. Value-based properties carry both compared numbers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvexityReport {
    pub property: Property,
    pub holds: bool,
    pub t: Option<f64>,
    pub witness: Option<Witness>,
    pub lhs_value: Option<f64>,
    pub rhs_value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TheoremId {
    /// Two-function minimax inequality under t-convexlikeness and the
    /// Simons-like inequality.
    Km1,
    /// One-function equivalence: Simons-like inequality iff minimax equality.
    Km2,
    /// Compact, lower-semicontinuous variant of `Km1`.
    App2,
    /// Two-function minimax under infsup-convexity and equicontinuity.
    CorEquic,
    /// Mixed-value identities with attaining measures.
    Lem2,
    /// Witness sequence bounding the limsup by the convex-hull supinf.
    Corollary0,
    /// t-convexlike implies infsup-convex.
    Infsup,
}

/// Status of one hypothesis of a checked theorem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hypothesis {
    pub name: String,
    pub satisfied: bool,
    pub detail: String,
}

pub(crate) const BY_FINITENESS: &str = "satisfied-by-finiteness";

impl Hypothesis {
    pub fn checked(name: &str, satisfied: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            satisfied,
            detail: detail.into(),
        }
    }

    /// A hypothesis that holds automatically on finite index sets.
    pub fn by_finiteness(name: &str) -> Self {
        Self::checked(name, true, BY_FINITENESS)
    }
}

/// Executable check of a theorem on a finite instance.
///
/// A check is vacuous when some hypothesis fails. A non-vacuous check with
/// `conclusion_holds == false` is a counterexample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoremCheck {
    pub theorem: TheoremId,
    pub hypotheses: Vec<Hypothesis>,
    pub vacuous: bool,
    pub conclusion_holds: bool,
    pub numbers: BTreeMap<String, f64>,
}

impl TheoremCheck {
    pub(crate) fn new(
        theorem: TheoremId,
        hypotheses: Vec<Hypothesis>,
        conclusion_holds: bool,
        numbers: &[(&str, f64)],
    ) -> Self {
        let vacuous = hypotheses.iter().any(|h| !h.satisfied);
        Self {
            theorem,
            hypotheses,
            vacuous,
            conclusion_holds,
            numbers: numbers.iter().map(|(k, v)| (String::from(*k), *v)).collect(),
        }
    }

    /// `true` unless this is a non-vacuous check whose conclusion failed.
    pub fn passes(&self) -> bool {
        self.vacuous || self.conclusion_holds
    }
}
