//! Finite subquotient complexes cut out of the knot complex by lattice
//! regions.
//!
//! The hat regions are `B̂ = C{i = 0}` and `Â_s = C{max(i, j - s) = 0}`; the
//! truncated plus regions replace `= 0` by `0 <= ... <= N`. Each generator
//! meets a region in a run of consecutive `i`, because both region
//! coordinates grow by exactly one with `i`. Terms of the differential that
//! leave the region are dropped.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cfk::{induced_differential, KnotComplex, PlaneElement};
use crate::graded::GradedHomology;
use crate::grading::Grading;
use crate::linalg::{F2Matrix, HomologyBasis, LinalgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    BHat,
    AHat { s: i64 },
    BPlus { n: usize },
    APlus { s: i64, n: usize },
}

impl Region {
    /// The region coordinate of `x`: `i` for B, `max(i, j - s)` for A_s.
    pub fn level(&self, c: &KnotComplex, x: PlaneElement) -> i64 {
        let (i, j) = x.position(c);
        match *self {
            Region::BHat | Region::BPlus { .. } => i,
            Region::AHat { s } | Region::APlus { s, .. } => i.max(j - s),
        }
    }

    fn top(&self) -> i64 {
        match *self {
            Region::BHat | Region::AHat { .. } => 0,
            Region::BPlus { n } | Region::APlus { n, .. } => n as i64,
        }
    }

    pub fn contains(&self, c: &KnotComplex, x: PlaneElement) -> bool {
        (0..=self.top()).contains(&self.level(c, x))
    }

    /// Offset with `level(g, i) = i + offset(g)`.
    fn offset(&self, c: &KnotComplex, g: usize) -> i64 {
        match *self {
            Region::BHat | Region::BPlus { .. } => 0,
            Region::AHat { s } | Region::APlus { s, .. } => {
                (c.generators[g].alexander - s).max(0)
            }
        }
    }

    pub fn is_plus(&self) -> bool {
        matches!(self, Region::BPlus { .. } | Region::APlus { .. })
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::BHat => write!(f, "B-hat"),
            Region::AHat { s } => write!(f, "A-hat_{s}"),
            Region::BPlus { n } => write!(f, "B+ (N={n})"),
            Region::APlus { s, n } => write!(f, "A+_{s} (N={n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubquotientError {
    #[error("truncated homology did not stabilize by N = {limit}")]
    TruncationUnstable { limit: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A finite F₂ complex on the plane elements of a region.
#[derive(Debug, Clone)]
pub struct SubquotientComplex {
    pub region: Region,
    pub basis: Vec<PlaneElement>,
    pub differential: F2Matrix,
    pub maslov: Vec<Grading>,
    index: HashMap<PlaneElement, usize>,
}

impl SubquotientComplex {
    pub fn build(c: &KnotComplex, region: Region) -> Self {
        let mut order: Vec<usize> = (0..c.generators.len()).collect();
        order.sort_by(|&x, &y| c.generators[x].name.cmp(&c.generators[y].name));
        let top = region.top();
        let basis: Vec<PlaneElement> = order
            .iter()
            .flat_map(|&g| {
                let off = region.offset(c, g);
                (0..=top).map(move |level| PlaneElement::new(g, level - off))
            })
            .collect();
        let differential = induced_differential(c, &basis);
        let maslov = basis.iter().map(|x| x.maslov(c)).collect();
        let index = basis.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        Self {
            region,
            basis,
            differential,
            maslov,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, x: PlaneElement) -> Option<usize> {
        self.index.get(&x).copied()
    }

    pub fn homology(&self) -> HomologyBasis {
        HomologyBasis::of_differential(&self.differential)
            .expect("subquotient differential squares to zero")
    }

    pub fn homology_dim(&self) -> usize {
        self.homology().dim()
    }

    pub(crate) fn graded_homology(&self) -> GradedHomology {
        GradedHomology::new(&self.differential, &self.maslov)
            .expect("subquotient differential squares to zero")
    }

    /// Homology dimensions by Maslov grading.
    pub fn graded_dims(&self) -> BTreeMap<Grading, usize> {
        self.graded_homology().dims()
    }

    pub fn labels(&self, c: &KnotComplex) -> Vec<String> {
        self.basis.iter().map(|x| x.label(c)).collect()
    }
}

/// Multiplication by `U` on a truncated plus complex.
#[derive(Debug, Clone)]
pub struct UAction {
    pub matrix: F2Matrix,
}

impl UAction {
    pub fn on(sq: &SubquotientComplex) -> Self {
        let mut m = F2Matrix::zeros(sq.len(), sq.len());
        for (col, x) in sq.basis.iter().enumerate() {
            if let Some(row) = sq.index_of(PlaneElement::new(x.generator, x.i - 1)) {
                m.toggle(row, col);
            }
        }
        Self { matrix: m }
    }

    pub fn power(&self, k: usize) -> F2Matrix {
        let mut p = F2Matrix::identity(self.matrix.cols());
        for _ in 0..k {
            p = self.matrix.mul(&p).expect("square");
        }
        p
    }
}

pub fn build_b_hat(c: &KnotComplex) -> SubquotientComplex {
    SubquotientComplex::build(c, Region::BHat)
}

pub fn build_a_hat(c: &KnotComplex, s: i64) -> SubquotientComplex {
    SubquotientComplex::build(c, Region::AHat { s })
}

/// Which plus complex to truncate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlusRegion {
    B,
    A { s: i64 },
}

pub fn build_plus_truncated(
    c: &KnotComplex,
    region: PlusRegion,
    n: usize,
) -> (SubquotientComplex, UAction) {
    let region = match region {
        PlusRegion::B => Region::BPlus { n },
        PlusRegion::A { s } => Region::APlus { s, n },
    };
    let sq = SubquotientComplex::build(c, region);
    let u = UAction::on(&sq);
    (sq, u)
}

/// How far to truncate plus complexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    #[default]
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Truncation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Truncation::Auto);
        }
        s.parse()
            .map(Truncation::Fixed)
            .map_err(|_| format!("truncation must be a count or \"auto\", got {s:?}"))
    }
}

/// Starting height: twice the generator count plus the Maslov spread.
pub fn default_truncation(c: &KnotComplex) -> usize {
    let spread = c
        .maslov_range()
        .map_or(0, |(lo, hi)| (hi - lo).ceil_i64().max(0) as usize);
    2 * c.generators.len() + spread
}

/// Height past which auto truncation gives up.
pub fn truncation_limit(c: &KnotComplex) -> usize {
    let spread = c
        .maslov_range()
        .map_or(0, |(lo, hi)| (hi - lo).ceil_i64().max(0) as usize);
    4 * c.generators.len() + spread
}

/// Graded summary of the homology of a truncated plus complex, restricted
/// to the degrees where truncation has no effect.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PlusSummary {
    /// Dimensions of the reduced part `H / U^k H` for large `k`.
    pub reduced: BTreeMap<Grading, usize>,
    /// Bottom classes of the U-towers: `ker U ∩ U^k H`.
    pub tower_bottoms: BTreeMap<Grading, usize>,
}

/// Reads the reduced part and tower bottoms off a complex truncated at
/// height `n` that is a subcomplex of its untruncated version with the same
/// chain groups in degrees up to `min degree + 2n + 1`.
pub(crate) fn plus_summary(
    d: &F2Matrix,
    degrees: &[Grading],
    u: &UAction,
    n: usize,
) -> Result<PlusSummary, LinalgError> {
    let gh = GradedHomology::new(d, degrees)?;
    let Some(&m_min) = degrees.iter().min() else {
        return Ok(PlusSummary::default());
    };
    let k = (n / 2).max(1);
    let uk = u.power(k);
    let uk1 = u.matrix.mul(&uk)?;
    let trusted = m_min + (2 * n as i64 - 2 * k as i64);
    let mut out = PlusSummary::default();
    for &g in gh.pieces.keys() {
        if g > trusted {
            continue;
        }
        let dim = gh.dim(g);
        let from = g + 2 * k as i64;
        let image = gh.induced_rank(&uk, from, &gh, g);
        let image_below = gh.induced_rank(&uk1, from, &gh, g - 2);
        if dim > image {
            out.reduced.insert(g, dim - image);
        }
        if image > image_below {
            out.tower_bottoms.insert(g, image - image_below);
        }
    }
    Ok(out)
}

/// Graded reduced homology `HF_red` modeled by `C{i >= 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedHomology {
    pub truncation: usize,
    pub dims: BTreeMap<Grading, usize>,
}

fn reduced_at(c: &KnotComplex, n: usize) -> Result<PlusSummary, SubquotientError> {
    let (b, u) = build_plus_truncated(c, PlusRegion::B, n);
    Ok(plus_summary(&b.differential, &b.maslov, &u, n)?)
}

/// Graded dimensions of the U-torsion quotient of the plus complex of `Y`,
/// found by increasing the truncation until two consecutive heights agree.
pub fn hf_red_graded(
    c: &KnotComplex,
    truncation: Truncation,
) -> Result<ReducedHomology, SubquotientError> {
    match truncation {
        Truncation::Fixed(n) => Ok(ReducedHomology {
            truncation: n,
            dims: reduced_at(c, n)?.reduced,
        }),
        Truncation::Auto => {
            let limit = truncation_limit(c);
            let mut n = default_truncation(c).max(1);
            loop {
                let here = reduced_at(c, n)?;
                let next = reduced_at(c, n + 1)?;
                if here.reduced == next.reduced {
                    return Ok(ReducedHomology {
                        truncation: n,
                        dims: here.reduced,
                    });
                }
                if n + 1 >= limit {
                    return Err(SubquotientError::TruncationUnstable { limit });
                }
                n = (2 * n).min(limit - 1);
            }
        }
    }
}
