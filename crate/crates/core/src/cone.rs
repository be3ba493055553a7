//! The maps `v_s, h_s: A_s -> B` and the untwisted mapping cone.
//!
//! `v_s` keeps the part of `A_s` at `i = 0` (at `i >= 0` for plus).
//! `h_s` keeps the part at `j = s` (at `j >= s`), multiplies by `U^s`, and
//! applies the flip, landing back in `B`. In the cone, the `B` summand sits
//! one degree below the `A` summand.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cfk::{enumerate_flips, CfkError, KnotComplex, PlaneElement};
use crate::graded::GradedHomology;
use crate::grading::Grading;
use crate::linalg::{F2Matrix, HomologyBasis, LinalgError};
use crate::subquotient::{
    build_a_hat, build_b_hat, build_plus_truncated, default_truncation, plus_summary,
    truncation_limit, PlusRegion, PlusSummary, SubquotientComplex, SubquotientError, Truncation,
    UAction,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error(transparent)]
    Cfk(#[from] CfkError),
    #[error("{map} is not a chain map")]
    NotAChainMap { map: String },
    #[error(transparent)]
    Subquotient(#[from] SubquotientError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("inconsistent cone computation: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaslovShift {
    Homogeneous(Grading),
    Inhomogeneous,
}

/// A chain map between two subquotient complexes.
#[derive(Debug, Clone)]
pub struct ChainMapF2 {
    pub source: SubquotientComplex,
    pub target: SubquotientComplex,
    pub matrix: F2Matrix,
    pub maslov_shift: MaslovShift,
}

impl ChainMapF2 {
    fn new(
        name: &str,
        source: SubquotientComplex,
        target: SubquotientComplex,
        matrix: F2Matrix,
        nominal_shift: Grading,
    ) -> Result<Self, ConeError> {
        let lhs = target.differential.mul(&matrix)?;
        let rhs = matrix.mul(&source.differential)?;
        if lhs != rhs {
            return Err(ConeError::NotAChainMap { map: name.into() });
        }
        let shifts: Vec<Grading> = matrix
            .entries()
            .map(|(r, c)| target.maslov[r] - source.maslov[c])
            .collect();
        let maslov_shift = match shifts.first() {
            None => MaslovShift::Homogeneous(nominal_shift),
            Some(&first) if shifts.iter().all(|&x| x == first) => MaslovShift::Homogeneous(first),
            Some(_) => MaslovShift::Inhomogeneous,
        };
        Ok(Self {
            source,
            target,
            matrix,
            maslov_shift,
        })
    }

    /// Rank of the induced map on homology.
    pub fn induced_rank(&self) -> usize {
        self.source
            .homology()
            .induced_rank(&self.matrix, &self.target.homology())
    }

    /// True when the induced map on homology is an isomorphism.
    pub fn is_quasi_isomorphism(&self) -> bool {
        let (a, b) = (self.source.homology_dim(), self.target.homology_dim());
        a == b && self.induced_rank() == a
    }
}

/// Matrix sending each source basis element to the target elements listed
/// by `f`; images outside the target are dropped.
fn matrix_by<I>(
    source: &SubquotientComplex,
    target: &SubquotientComplex,
    mut f: impl FnMut(PlaneElement) -> I,
) -> F2Matrix
where
    I: IntoIterator<Item = PlaneElement>,
{
    let mut m = F2Matrix::zeros(target.len(), source.len());
    for (col, &x) in source.basis.iter().enumerate() {
        for y in f(x) {
            if let Some(row) = target.index_of(y) {
                m.toggle(row, col);
            }
        }
    }
    m
}

fn v_matrix(source: &SubquotientComplex, target: &SubquotientComplex) -> F2Matrix {
    matrix_by(source, target, |x| (x.i >= 0).then_some(x))
}

fn h_matrix(
    c: &KnotComplex,
    s: i64,
    source: &SubquotientComplex,
    target: &SubquotientComplex,
) -> Result<F2Matrix, ConeError> {
    let r = c.resolve();
    c.require_flip()?;
    let plus = source.region.is_plus();
    Ok(matrix_by(source, target, |x| {
        let (_, j) = x.position(c);
        let keep = if plus { j >= s } else { j == s };
        let terms: Vec<PlaneElement> = if keep {
            c.flip_terms(&r, PlaneElement::new(x.generator, x.i - s))
                .expect("flip checked")
                .collect()
        } else {
            Vec::new()
        };
        terms
    }))
}

pub fn build_v_hat(c: &KnotComplex, s: i64) -> Result<ChainMapF2, ConeError> {
    let a = build_a_hat(c, s);
    let b = build_b_hat(c);
    let m = v_matrix(&a, &b);
    ChainMapF2::new(&format!("v-hat_{s}"), a, b, m, Grading::int(0))
}

pub fn build_h_hat(c: &KnotComplex, s: i64) -> Result<ChainMapF2, ConeError> {
    let a = build_a_hat(c, s);
    let b = build_b_hat(c);
    let m = h_matrix(c, s, &a, &b)?;
    ChainMapF2::new(&format!("h-hat_{s}"), a, b, m, Grading::int(-2 * s))
}

pub fn build_v_plus(c: &KnotComplex, s: i64, n: usize) -> Result<ChainMapF2, ConeError> {
    let (a, _) = build_plus_truncated(c, PlusRegion::A { s }, n);
    let (b, _) = build_plus_truncated(c, PlusRegion::B, n);
    let m = v_matrix(&a, &b);
    ChainMapF2::new(&format!("v+_{s}"), a, b, m, Grading::int(0))
}

pub fn build_h_plus(c: &KnotComplex, s: i64, n: usize) -> Result<ChainMapF2, ConeError> {
    let (a, _) = build_plus_truncated(c, PlusRegion::A { s }, n);
    let (b, _) = build_plus_truncated(c, PlusRegion::B, n);
    let m = h_matrix(c, s, &a, &b)?;
    ChainMapF2::new(&format!("h+_{s}"), a, b, m, Grading::int(-2 * s))
}

/// The projection `Â_s -> Â_{s'}` through which `v̂_s` factors, `s <= s'`.
pub fn project_a(c: &KnotComplex, s: i64, s_prime: i64) -> Result<ChainMapF2, ConeError> {
    assert!(s <= s_prime, "project_a needs s <= s'");
    let a = build_a_hat(c, s);
    let a2 = build_a_hat(c, s_prime);
    let m = if s == s_prime {
        F2Matrix::identity(a.len())
    } else {
        matrix_by(&a, &a2, |x| (x.i == 0).then_some(x))
    };
    ChainMapF2::new(
        &format!("projection A_{s} -> A_{s_prime}"),
        a,
        a2,
        m,
        Grading::int(0),
    )
}

/// Generator-bijection flips of a complex, compared with the one
/// [`derive_flip`](crate::cfk::derive_flip) picks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlipChoices {
    /// Valid flips found; the search stops at the given limit.
    pub found: usize,
    /// Flips that differ from the derived one by an automorphism moving
    /// classes in `H(B̂)`. Cone dimensions can depend on which of these is
    /// used.
    pub nontrivial: usize,
}

/// Whether two flip permutations differ by an automorphism acting as the
/// identity on `H(B̂)`.
pub fn flips_agree_on_homology(c: &KnotComplex, sigma: &[usize], other: &[usize]) -> bool {
    let b = build_b_hat(c);
    let mut inverse = vec![0; sigma.len()];
    for (g, &t) in sigma.iter().enumerate() {
        inverse[t] = g;
    }
    let mut m = F2Matrix::zeros(b.len(), b.len());
    for (col, x) in b.basis.iter().enumerate() {
        let image = PlaneElement::new(other[inverse[x.generator]], x.i);
        let row = b.index_of(image).expect("B-hat contains every generator at i = 0");
        m.toggle(row, col);
    }
    let h = b.homology();
    h.induced_matrix(&m, &h) == F2Matrix::identity(h.dim())
}

pub fn flip_choices(c: &KnotComplex, limit: usize) -> Result<FlipChoices, CfkError> {
    let mut base = c.clone();
    base.flip = None;
    let reference = enumerate_flips(&base, true, 1)
        .pop()
        .ok_or(CfkError::NoFlipFound)?;
    let all = enumerate_flips(&base, false, limit);
    let nontrivial = all
        .iter()
        .filter(|sigma| !flips_agree_on_homology(&base, &reference, sigma))
        .count();
    Ok(FlipChoices {
        found: all.len(),
        nontrivial,
    })
}

/// `[[d_A, 0], [f, d_B]]` on `A ⊕ B`.
pub fn cone_differential(d_a: &F2Matrix, d_b: &F2Matrix, f: &F2Matrix) -> F2Matrix {
    F2Matrix::block(d_a, &F2Matrix::zeros(d_a.rows(), d_b.cols()), f, d_b)
        .expect("cone blocks have matching shapes")
}

/// Cone degrees: A keeps its Maslov grading, B drops by one.
fn cone_degrees(a: &SubquotientComplex, b: &SubquotientComplex) -> Vec<Grading> {
    a.maslov
        .iter()
        .copied()
        .chain(b.maslov.iter().map(|&m| m - 1))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeResult {
    pub s: i64,
    pub total_dim: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub rank_v: usize,
    pub rank_h: usize,
    pub rank_v_plus_h: usize,
    /// Dimensions by relative grading; only at `s = 0`, where `v` and `h`
    /// share a grading shift.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graded_dims: Option<BTreeMap<Grading, usize>>,
}

/// Homology of the cone of `v̂_s + ĥ_s`.
pub fn cone_homology_hat(c: &KnotComplex, s: i64) -> Result<ConeResult, ConeError> {
    let v = build_v_hat(c, s)?;
    let h = build_h_hat(c, s)?;
    let a = &v.source;
    let b = &v.target;
    let ha = a.homology();
    let hb = b.homology();
    let sum = v.matrix.add(&h.matrix)?;
    let rank_v = ha.induced_rank(&v.matrix, &hb);
    let rank_h = ha.induced_rank(&h.matrix, &hb);
    let rank_v_plus_h = ha.induced_rank(&sum, &hb);

    let d = cone_differential(&a.differential, &b.differential, &sum);
    let total_dim = HomologyBasis::of_differential(&d)?.dim();
    if total_dim + 2 * rank_v_plus_h != ha.dim() + hb.dim() {
        return Err(ConeError::Inconsistent(format!(
            "cone dimension {total_dim} violates rank-nullity with dims {} + {} and rank {rank_v_plus_h}",
            ha.dim(),
            hb.dim()
        )));
    }
    let graded_dims = if s == 0 {
        Some(GradedHomology::new(&d, &cone_degrees(a, b))?.dims())
    } else {
        None
    };
    Ok(ConeResult {
        s,
        total_dim,
        dim_a: ha.dim(),
        dim_b: hb.dim(),
        rank_v,
        rank_h,
        rank_v_plus_h,
        graded_dims,
    })
}

/// Homology of the cone of `v⁺_s + h⁺_s`, split into U-towers and the
/// reduced part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlusConeResult {
    pub s: i64,
    pub truncation: usize,
    pub tower_count: usize,
    pub reduced_dim: usize,
    /// Graded reduced part and tower bottoms; only at `s = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graded: Option<PlusSummary>,
}

struct PlusCone {
    d: F2Matrix,
    degrees: Vec<Grading>,
    u: UAction,
}

fn plus_cone(c: &KnotComplex, s: i64, n: usize) -> Result<PlusCone, ConeError> {
    let v = build_v_plus(c, s, n)?;
    let h = build_h_plus(c, s, n)?;
    let sum = v.matrix.add(&h.matrix)?;
    let (a, b) = (&v.source, &v.target);
    let d = cone_differential(&a.differential, &b.differential, &sum);
    let (ua, ub) = (UAction::on(a), UAction::on(b));
    let u = UAction {
        matrix: F2Matrix::block(
            &ua.matrix,
            &F2Matrix::zeros(a.len(), b.len()),
            &F2Matrix::zeros(b.len(), a.len()),
            &ub.matrix,
        )?,
    };
    Ok(PlusCone {
        d,
        degrees: cone_degrees(a, b),
        u,
    })
}

fn plus_cone_dim(c: &KnotComplex, s: i64, n: usize) -> Result<usize, ConeError> {
    Ok(HomologyBasis::of_differential(&plus_cone(c, s, n)?.d)?.dim())
}

/// Tries to read off the towers and reduced part at height `n`.
///
/// A plus complex truncated at `n` is the kernel of `U^{n+1}`, so its
/// homology has dimension `(n + 1)·towers + 2·reduced` once `U^{n+1}`
/// kills the reduced part; three consecutive heights pin both numbers.
fn plus_cone_at(c: &KnotComplex, s: i64, n: usize) -> Result<Option<PlusConeResult>, ConeError> {
    let d0 = plus_cone_dim(c, s, n)?;
    let d1 = plus_cone_dim(c, s, n + 1)?;
    let d2 = plus_cone_dim(c, s, n + 2)?;
    if d1 < d0 || d2 < d1 || d1 - d0 != d2 - d1 {
        return Ok(None);
    }
    let towers = d1 - d0;
    let Some(twice_reduced) = d0.checked_sub((n + 1) * towers) else {
        return Ok(None);
    };
    if twice_reduced % 2 != 0 {
        return Ok(None);
    }
    let graded = if s == 0 {
        let here = plus_cone(c, s, n)?;
        let next = plus_cone(c, s, n + 1)?;
        let g0 = plus_summary(&here.d, &here.degrees, &here.u, n)?;
        let g1 = plus_summary(&next.d, &next.degrees, &next.u, n + 1)?;
        if g0 != g1 {
            return Ok(None);
        }
        Some(g0)
    } else {
        None
    };
    Ok(Some(PlusConeResult {
        s,
        truncation: n,
        tower_count: towers,
        reduced_dim: twice_reduced / 2,
        graded,
    }))
}

/// Homology of the truncated plus cone with stabilization detection.
pub fn cone_homology_plus_truncated(
    c: &KnotComplex,
    s: i64,
    truncation: Truncation,
) -> Result<PlusConeResult, ConeError> {
    c.require_flip()?;
    match truncation {
        Truncation::Fixed(n) => plus_cone_at(c, s, n)?.ok_or(ConeError::Subquotient(
            SubquotientError::TruncationUnstable { limit: n },
        )),
        Truncation::Auto => {
            let limit = truncation_limit(c) + s.unsigned_abs() as usize;
            let mut n = default_truncation(c).max(1) + s.unsigned_abs() as usize;
            loop {
                if let Some(r) = plus_cone_at(c, s, n)? {
                    return Ok(r);
                }
                if n >= limit {
                    return Err(SubquotientError::TruncationUnstable { limit }.into());
                }
                n = (2 * n).min(limit);
            }
        }
    }
}
