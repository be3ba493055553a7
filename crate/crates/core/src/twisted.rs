//! The twisted cone of `v̂_s + T·ĥ_s` over `F₂[T, T⁻¹]`.
//!
//! The Novikov field is a field extension of `F₂(T)`, so dimensions over it
//! are ranks over the fraction field. The Laurent homology itself is read off
//! the Smith form of the cone differential.

use serde::Serialize;

use crate::cfk::KnotComplex;
use crate::cone::{build_h_hat, build_v_hat, ChainMapF2, ConeError};
use crate::laurent::{rank_fraction_field, smith_invariants_laurent, LaurentMatrix, LaurentPoly};
use crate::subquotient::SubquotientComplex;

/// A chain map `Â_s -> B̂` with Laurent coefficients.
#[derive(Debug, Clone)]
pub struct ChainMapLaurent {
    pub source: SubquotientComplex,
    pub target: SubquotientComplex,
    pub matrix: LaurentMatrix,
}

impl ChainMapLaurent {
    /// `f0 + T·f1`.
    pub fn combine(f0: &ChainMapF2, f1: &ChainMapF2) -> Self {
        Self {
            source: f0.source.clone(),
            target: f0.target.clone(),
            matrix: LaurentMatrix::from_linear(&f0.matrix, &f1.matrix),
        }
    }
}

/// `v̂_s + T·ĥ_s`.
pub fn twisted_map(c: &KnotComplex, s: i64) -> Result<ChainMapLaurent, ConeError> {
    let v = build_v_hat(c, s)?;
    let h = build_h_hat(c, s)?;
    Ok(ChainMapLaurent::combine(&v, &h))
}

/// The cone differential `[[∂_A, 0], [v + T·h, ∂_B]]` on `Â_s ⊕ B̂`.
pub fn twisted_cone_matrix(c: &KnotComplex, s: i64) -> Result<LaurentMatrix, ConeError> {
    let f = twisted_map(c, s)?;
    let (na, nb) = (f.source.len(), f.target.len());
    let mut d = LaurentMatrix::zeros(na + nb, na + nb);
    for (r, col) in f.source.differential.entries() {
        d.set(r, col, LaurentPoly::one());
    }
    for (r, col) in f.target.differential.entries() {
        d.set(na + r, na + col, LaurentPoly::one());
    }
    for (&(r, col), p) in f.matrix.entries() {
        d.set(na + r, col, p.clone());
    }
    if !d.mul(&d).is_zero() {
        return Err(ConeError::Inconsistent(format!(
            "twisted cone differential at s = {s} does not square to zero"
        )));
    }
    Ok(d)
}

/// Dimension of the twisted cone homology over the Novikov field.
pub fn novikov_dim(c: &KnotComplex, s: i64) -> Result<usize, ConeError> {
    let v = build_v_hat(c, s)?;
    let h = build_h_hat(c, s)?;
    let ha = v.source.homology();
    let hb = v.target.homology();
    let induced = LaurentMatrix::from_linear(
        &ha.induced_matrix(&v.matrix, &hb),
        &ha.induced_matrix(&h.matrix, &hb),
    );
    Ok(ha.dim() + hb.dim() - 2 * rank_fraction_field(&induced))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistedConeResult {
    pub s: i64,
    pub novikov_dim: usize,
    pub laurent_free_rank: usize,
    /// Non-unit invariant factors, normalized and sorted by span.
    pub torsion_factors: Vec<LaurentPoly>,
}

/// Cone homology over `F₂[T, T⁻¹]`: free rank and torsion.
pub fn twisted_homology_laurent(c: &KnotComplex, s: i64) -> Result<TwistedConeResult, ConeError> {
    let d = twisted_cone_matrix(c, s)?;
    let invariants = smith_invariants_laurent(&d);
    let laurent_free_rank = d.rows() - 2 * invariants.len();
    let mut torsion_factors: Vec<LaurentPoly> =
        invariants.into_iter().filter(|p| !p.is_unit()).collect();
    torsion_factors.sort_by(|a, b| a.report_cmp(b));
    let novikov = novikov_dim(c, s)?;
    if novikov != laurent_free_rank {
        return Err(ConeError::Inconsistent(format!(
            "Novikov dimension {novikov} differs from Laurent free rank {laurent_free_rank} at s = {s}"
        )));
    }
    Ok(TwistedConeResult {
        s,
        novikov_dim: novikov,
        laurent_free_rank,
        torsion_factors,
    })
}
