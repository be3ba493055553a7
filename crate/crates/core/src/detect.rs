//! Detectors built on the cone computations: the non-separating sphere
//! obstruction, the unknotting verdict, genus, the mod 2 Alexander
//! polynomial, the `HF_red = F` obstruction and the 0-surgery checker.
//!
//! Every s-scan covers `|s| <= A_max`, the largest `|A|` over the inputs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cfk::{CfkError, KnotComplex};
use crate::cone::{build_v_hat, cone_homology_hat, ConeError};
use crate::grading::Grading;
use crate::laurent::LaurentPoly;
use crate::linalg::HomologyBasis;
use crate::subquotient::{build_a_hat, build_b_hat};
use crate::twisted::novikov_dim;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error(transparent)]
    Cfk(#[from] CfkError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("no complexes given")]
    NoInput,
    #[error("dimensions must be at least 1 (got dim_y = {dim_y}, dim_n = {dim_n})")]
    InvalidDimension { dim_y: usize, dim_n: usize },
    #[error("the HF_red obstruction needs a homology sphere; pass the homology-sphere flag")]
    NotHomologySphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Fires,
    DoesNotFire,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Fires => "Fires",
            VerdictKind::DoesNotFire => "DoesNotFire",
            VerdictKind::Inconclusive => "Inconclusive",
        })
    }
}

/// A nonzero twisted group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistedHit {
    pub spinc: String,
    pub s: i64,
    pub novikov_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurgeryOutcome {
    Unknotted,
    Consistent,
    Impossible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// `(v̂_s + ĥ_s)_*` is an isomorphism for `s != 0`.
    UntwistedIso,
    /// The twisted cone vanishes over the Novikov field.
    TwistedVanishing,
    /// `dim H(Â_s) = dim H(B̂)`.
    LargeSurgeryRank,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::UntwistedIso => "(a) untwisted map is an isomorphism",
            Clause::TwistedVanishing => "(b) twisted cone vanishes",
            Clause::LargeSurgeryRank => "(c) dim H(A_s) = dim H(B)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseFailure {
    pub clause: Clause,
    pub spinc: String,
    pub s: i64,
    /// What was measured: the cone dimension for (a), the Novikov dimension
    /// for (b), `dim H(Â_s)` for (c).
    pub observed: usize,
    /// What the clause needs.
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    TwistedScan {
        a_max: i64,
        covered: Vec<String>,
        nonzero: Option<TwistedHit>,
    },
    Dimensions {
        dim_y: usize,
        dim_n: usize,
        outcome: SurgeryOutcome,
    },
    ReducedGrading {
        grading: Option<Grading>,
    },
    SurgeryConditions {
        a_max: i64,
        covered: Vec<String>,
        failure: Option<ClauseFailure>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub statement: String,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn new(kind: VerdictKind, statement: impl Into<String>, witness: Witness) -> Self {
        Self {
            kind,
            statement: statement.into(),
            witness: Some(witness),
        }
    }
}

fn with_flips(complexes: &[KnotComplex]) -> Result<Vec<KnotComplex>, DetectError> {
    if complexes.is_empty() {
        return Err(DetectError::NoInput);
    }
    Ok(complexes
        .iter()
        .map(KnotComplex::with_flip)
        .collect::<Result<_, _>>()?)
}

fn a_max_of(complexes: &[KnotComplex]) -> i64 {
    complexes.iter().map(KnotComplex::a_max).max().unwrap_or(0)
}

fn labels(complexes: &[KnotComplex]) -> Vec<String> {
    complexes.iter().map(|c| c.spinc.clone()).collect()
}

/// Fires when some twisted group `HF(Y₀, t_s; Novikov)` is nonzero, which
/// rules out a non-separating sphere in `Y₀`.
pub fn sphere_obstruction(complexes: &[KnotComplex]) -> Result<Verdict, DetectError> {
    let cs = with_flips(complexes)?;
    let a_max = a_max_of(&cs);
    for c in &cs {
        for s in -a_max..=a_max {
            let dim = novikov_dim(c, s)?;
            if dim != 0 {
                return Ok(Verdict::new(
                    VerdictKind::Fires,
                    "Y0(K) contains no non-separating two-sphere",
                    Witness::TwistedScan {
                        a_max,
                        covered: labels(&cs),
                        nonzero: Some(TwistedHit {
                            spinc: c.spinc.clone(),
                            s,
                            novikov_dim: dim,
                        }),
                    },
                ));
            }
        }
    }
    Ok(Verdict::new(
        VerdictKind::DoesNotFire,
        "all twisted groups vanish; a non-separating sphere is not ruled out",
        Witness::TwistedScan {
            a_max,
            covered: labels(&cs),
            nonzero: None,
        },
    ))
}

/// For a knot `K` in `Y` with `Y₀(K) = N # S²×S¹`, compares `dim HF-hat`
/// of `Y` and `N`.
pub fn theorem1_verdict(dim_y: usize, dim_n: usize) -> Result<Verdict, DetectError> {
    if dim_y == 0 || dim_n == 0 {
        return Err(DetectError::InvalidDimension { dim_y, dim_n });
    }
    let (kind, statement, outcome) = match dim_n.cmp(&dim_y) {
        std::cmp::Ordering::Equal => (
            VerdictKind::Fires,
            "K is unknotted and N = Y",
            SurgeryOutcome::Unknotted,
        ),
        std::cmp::Ordering::Less => (
            VerdictKind::Inconclusive,
            "consistent; no unknotting conclusion",
            SurgeryOutcome::Consistent,
        ),
        std::cmp::Ordering::Greater => (
            VerdictKind::Fires,
            "no such surgery exists: dim HF-hat(N) cannot exceed dim HF-hat(Y)",
            SurgeryOutcome::Impossible,
        ),
    };
    Ok(Verdict::new(
        kind,
        statement,
        Witness::Dimensions {
            dim_y,
            dim_n,
            outcome,
        },
    ))
}

/// Smallest `s >= 0` such that `v̂_i` induces an isomorphism for every
/// `i >= s` and every input complex.
pub fn genus(complexes: &[KnotComplex]) -> Result<usize, DetectError> {
    if complexes.is_empty() {
        return Err(DetectError::NoInput);
    }
    let a_max = a_max_of(complexes);
    let mut g = 0;
    for i in 0..=a_max {
        for c in complexes {
            if !build_v_hat(c, i)?.is_quasi_isomorphism() {
                g = i as usize + 1;
                break;
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlexanderPolynomial {
    /// The graded Euler characteristic of `HFK-hat`, reduced mod 2.
    pub polynomial: LaurentPoly,
    pub trivial_mod_2: bool,
}

/// `HFK-hat` dimensions by Alexander grading, from the associated graded
/// of `B̂`.
pub fn knot_homology_dims(c: &KnotComplex) -> BTreeMap<i64, usize> {
    let b = build_b_hat(c);
    let alexander: Vec<i64> = b
        .basis
        .iter()
        .map(|x| c.generators[x.generator].alexander)
        .collect();
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, &a) in alexander.iter().enumerate() {
        groups.entry(a).or_default().push(k);
    }
    groups
        .into_iter()
        .map(|(a, idx)| {
            let d = b.differential.submatrix(&idx, &idx);
            let dim = HomologyBasis::of_differential(&d)
                .expect("associated graded differential squares to zero")
                .dim();
            (a, dim)
        })
        .filter(|&(_, dim)| dim > 0)
        .collect()
}

pub fn alexander_polynomial(c: &KnotComplex) -> AlexanderPolynomial {
    let polynomial = LaurentPoly::from_exponents(
        knot_homology_dims(c)
            .into_iter()
            .filter(|&(_, dim)| dim % 2 == 1)
            .map(|(a, _)| a),
    );
    let trivial_mod_2 = polynomial.support().all(|k| k == 0);
    AlexanderPolynomial {
        polynomial,
        trivial_mod_2,
    }
}

/// Fires when some grading of `HF_red` of a homology sphere is exactly `F`.
pub fn prop_red1_obstruction(
    red: &BTreeMap<Grading, usize>,
    homology_sphere: bool,
) -> Result<Verdict, DetectError> {
    if !homology_sphere {
        return Err(DetectError::NotHomologySphere);
    }
    Ok(match red.iter().find(|(_, &dim)| dim == 1) {
        Some((&g, _)) => Verdict::new(
            VerdictKind::Fires,
            "no knot in Y has S^2 x S^1 as 0-surgery",
            Witness::ReducedGrading { grading: Some(g) },
        ),
        None => Verdict::new(
            VerdictKind::DoesNotFire,
            "no grading of HF_red is one-dimensional",
            Witness::ReducedGrading { grading: None },
        ),
    })
}

/// `dim HF-hat(Y) = |H₁(Y)| + 2` for a rational homology sphere `Y` with
/// `dim HF_red(Y) = 1`.
pub fn hf_hat_dim_with_red_one(h1_order: usize) -> usize {
    h1_order + 2
}

fn first_failure(c: &KnotComplex, s: i64) -> Result<Option<ClauseFailure>, DetectError> {
    let fail = |clause, observed, expected| ClauseFailure {
        clause,
        spinc: c.spinc.clone(),
        s,
        observed,
        expected,
    };
    let dim_a = build_a_hat(c, s).homology_dim();
    let dim_b = build_b_hat(c).homology_dim();
    if dim_a != dim_b {
        return Ok(Some(fail(Clause::LargeSurgeryRank, dim_a, dim_b)));
    }
    if s != 0 {
        let cone = cone_homology_hat(c, s)?;
        if cone.total_dim != 0 {
            return Ok(Some(fail(Clause::UntwistedIso, cone.total_dim, 0)));
        }
    }
    let dim = novikov_dim(c, s)?;
    if dim != 0 {
        return Ok(Some(fail(Clause::TwistedVanishing, dim, 0)));
    }
    Ok(None)
}

/// Checks the necessary conditions for `Y₀(K)` to contain a non-separating
/// sphere on the given Spin^c structures. Scans `s` upward from `-A_max`;
/// at each `s` the rank clause (c) is tested before (a) and (b).
pub fn check_prop_0surgery(complexes: &[KnotComplex]) -> Result<Verdict, DetectError> {
    let cs = with_flips(complexes)?;
    let a_max = a_max_of(&cs);
    for s in -a_max..=a_max {
        for c in &cs {
            if let Some(failure) = first_failure(c, s)? {
                return Ok(Verdict::new(
                    VerdictKind::DoesNotFire,
                    format!("{} fails at s = {s}", failure.clause),
                    Witness::SurgeryConditions {
                        a_max,
                        covered: labels(&cs),
                        failure: Some(failure),
                    },
                ));
            }
        }
    }
    Ok(Verdict::new(
        VerdictKind::Fires,
        format!(
            "all necessary conditions hold on the covered Spin^c structures ({})",
            labels(&cs).join(", ")
        ),
        Witness::SurgeryConditions {
            a_max,
            covered: labels(&cs),
            failure: None,
        },
    ))
}
