//! Homology of an F₂ complex split by an exact rational grading.

use std::collections::BTreeMap;

use crate::grading::Grading;
use crate::linalg::{F2Matrix, F2Vector, HomologyBasis, LinalgError};

#[derive(Debug, Clone)]
pub(crate) struct DegreePiece {
    /// Global basis indices in this degree.
    pub(crate) indices: Vec<usize>,
    pub(crate) homology: HomologyBasis,
}

#[derive(Debug, Clone)]
pub(crate) struct GradedHomology {
    len: usize,
    pub(crate) pieces: BTreeMap<Grading, DegreePiece>,
}

impl GradedHomology {
    pub(crate) fn new(d: &F2Matrix, degrees: &[Grading]) -> Result<Self, LinalgError> {
        assert_eq!(d.cols(), degrees.len());
        let mut groups: BTreeMap<Grading, Vec<usize>> = BTreeMap::new();
        for (k, &g) in degrees.iter().enumerate() {
            groups.entry(g).or_default().push(k);
        }
        let empty = Vec::new();
        let mut pieces = BTreeMap::new();
        for (&g, idx) in &groups {
            let below = groups.get(&(g - 1)).unwrap_or(&empty);
            let above = groups.get(&(g + 1)).unwrap_or(&empty);
            let d_out = d.submatrix(below, idx);
            let d_in = d.submatrix(idx, above);
            let homology = HomologyBasis::new(&d_in, &d_out)?;
            pieces.insert(
                g,
                DegreePiece {
                    indices: idx.clone(),
                    homology,
                },
            );
        }
        Ok(Self {
            len: degrees.len(),
            pieces,
        })
    }

    pub(crate) fn dims(&self) -> BTreeMap<Grading, usize> {
        self.pieces
            .iter()
            .filter(|(_, p)| p.homology.dim() > 0)
            .map(|(&g, p)| (g, p.homology.dim()))
            .collect()
    }

    pub(crate) fn dim(&self, g: Grading) -> usize {
        self.pieces.get(&g).map_or(0, |p| p.homology.dim())
    }

    /// Rank of the map `H_from(self) -> H_to(target)` induced by `f`, a
    /// global matrix from this complex to `target`'s.
    pub(crate) fn induced_rank(
        &self,
        f: &F2Matrix,
        from: Grading,
        target: &GradedHomology,
        to: Grading,
    ) -> usize {
        let (Some(src), Some(tgt)) = (self.pieces.get(&from), target.pieces.get(&to)) else {
            return 0;
        };
        let columns = src
            .homology
            .representatives()
            .iter()
            .map(|z| {
                let global = F2Vector::from_ones(self.len, z.ones().map(|k| src.indices[k]));
                let image = f.apply(&global);
                let local = F2Vector::from_ones(
                    tgt.indices.len(),
                    tgt.indices
                        .iter()
                        .enumerate()
                        .filter(|(_, &g)| image.get(g))
                        .map(|(k, _)| k),
                );
                tgt.homology.coordinates(&local)
            })
            .collect();
        crate::linalg::rank_f2(&F2Matrix::from_columns(tgt.homology.dim(), columns))
    }
}
