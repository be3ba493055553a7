//! Exact linear algebra over F₂.
//!
//! Matrices are stored column-major as packed bitsets. Every differential,
//! chain map and induced map in the crate eventually lands here, so the
//! reduction routines are written once, in column form:
//!
//! - [`rank_f2`], [`kernel_basis_f2`], [`homology_dim_f2`] are the plain
//!   entry points;
//! - [`HomologyBasis`] lifts a homology basis to cycles and expresses any
//!   cycle in that basis, which is how ranks of maps *on homology* are
//!   computed without building quotient spaces.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) lies outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("entry ({row}, {col}) listed twice")]
    DuplicateEntry { row: usize, col: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("outgoing differential composed with incoming differential is nonzero")]
    CompositionNonzero,
}

/// A vector over F₂, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    words: Vec<u64>,
    len: usize,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i);
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.toggle(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range (len={})", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range (len={})", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Highest set index, used as the pivot in column reduction.
    pub fn pivot(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "F2Vector({bits})")
    }
}

/// A matrix over F₂ with `rows x cols` shape.
///
/// Logically a set of `(row, col)` positions carrying coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    columns: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            columns: vec![F2Vector::zeros(rows); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| F2Vector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from its set of nonzero positions.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, cols);
        for (row, col) in entries {
            if row >= rows || col >= cols {
                return Err(LinalgError::OutOfBounds {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
            if m.get(row, col) {
                return Err(LinalgError::DuplicateEntry { row, col });
            }
            m.columns[col].set(row);
        }
        Ok(m)
    }

    pub fn from_columns(rows: usize, columns: Vec<F2Vector>) -> Self {
        for c in &columns {
            assert_eq!(c.len(), rows, "column length mismatch");
        }
        Self {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col].get(row)
    }

    pub fn toggle(&mut self, row: usize, col: usize) {
        self.columns[col].toggle(row);
    }

    pub fn column(&self, col: usize) -> &F2Vector {
        &self.columns[col]
    }

    pub fn columns(&self) -> &[F2Vector] {
        &self.columns
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(F2Vector::is_zero)
    }

    /// Nonzero positions in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.ones().map(move |r| (r, c)))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(F2Vector::count_ones).sum()
    }

    pub fn apply(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.cols, "vector length does not match columns");
        let mut out = F2Vector::zeros(self.rows);
        for c in v.ones() {
            out.xor_assign(&self.columns[c]);
        }
        out
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &F2Matrix) -> Result<F2Matrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let columns = rhs.columns.iter().map(|c| self.apply(c)).collect();
        Ok(F2Matrix::from_columns(self.rows, columns))
    }

    pub fn add(&self, rhs: &F2Matrix) -> Result<F2Matrix, LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.columns.iter_mut().zip(&rhs.columns) {
            a.xor_assign(b);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (r, c) in self.entries() {
            t.columns[r].set(c);
        }
        t
    }

    /// The block of `self` picked out by the given row and column indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        let columns = cols
            .iter()
            .map(|&c| {
                let col = &self.columns[c];
                F2Vector::from_ones(
                    rows.len(),
                    rows.iter()
                        .enumerate()
                        .filter(|(_, &r)| col.get(r))
                        .map(|(k, _)| k),
                )
            })
            .collect();
        F2Matrix::from_columns(rows.len(), columns)
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(
        a: &F2Matrix,
        b: &F2Matrix,
        c: &F2Matrix,
        d: &F2Matrix,
    ) -> Result<F2Matrix, LinalgError> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(LinalgError::ShapeMismatch("inconsistent block shapes".into()));
        }
        let rows = a.rows + c.rows;
        let mut out = F2Matrix::zeros(rows, a.cols + b.cols);
        for (r, col) in a.entries() {
            out.columns[col].set(r);
        }
        for (r, col) in b.entries() {
            out.columns[a.cols + col].set(r);
        }
        for (r, col) in c.entries() {
            out.columns[col].set(a.rows + r);
        }
        for (r, col) in d.entries() {
            out.columns[a.cols + col].set(a.rows + r);
        }
        Ok(out)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

/// Incremental column reduction with pivot = highest set row.
///
/// Each stored column carries a tag vector; reducing an incoming vector
/// accumulates the tags of every column used, so callers can read off
/// coordinates with respect to whatever the tags encode.
#[derive(Debug, Clone)]
pub(crate) struct ColumnReducer {
    len: usize,
    tag_len: usize,
    pivot_of: Vec<Option<usize>>,
    stored: Vec<(F2Vector, F2Vector)>,
}

impl ColumnReducer {
    pub(crate) fn new(len: usize, tag_len: usize) -> Self {
        Self {
            len,
            tag_len,
            pivot_of: vec![None; len],
            stored: Vec::new(),
        }
    }

    /// Reduces `v` against the stored columns, returning the remainder and
    /// the XOR of the tags consumed.
    pub(crate) fn reduce(&self, mut v: F2Vector, mut tag: F2Vector) -> (F2Vector, F2Vector) {
        while let Some(p) = v.pivot() {
            match self.pivot_of[p] {
                Some(k) => {
                    let (col, t) = &self.stored[k];
                    v.xor_assign(col);
                    tag.xor_assign(t);
                }
                None => break,
            }
        }
        (v, tag)
    }

    /// Reduces and stores `v`. Returns `true` if it was independent of the
    /// columns already stored.
    pub(crate) fn insert(&mut self, v: F2Vector, tag: F2Vector) -> bool {
        debug_assert_eq!(v.len(), self.len);
        debug_assert_eq!(tag.len(), self.tag_len);
        let (v, tag) = self.reduce(v, tag);
        match v.pivot() {
            Some(p) => {
                self.pivot_of[p] = Some(self.stored.len());
                self.stored.push((v, tag));
                true
            }
            None => false,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.stored.len()
    }
}

/// Rank of `m` as an F₂-linear map.
pub fn rank_f2(m: &F2Matrix) -> usize {
    let mut red = ColumnReducer::new(m.rows(), 0);
    for c in m.columns() {
        red.insert(c.clone(), F2Vector::zeros(0));
    }
    red.rank()
}

/// A basis of the kernel of `m`; its size is `cols - rank`.
pub fn kernel_basis_f2(m: &F2Matrix) -> Vec<F2Vector> {
    let mut red = ColumnReducer::new(m.rows(), m.cols());
    let mut kernel = Vec::new();
    for (j, c) in m.columns().iter().enumerate() {
        let tag = F2Vector::unit(m.cols(), j);
        let (rem, tag) = red.reduce(c.clone(), tag);
        if rem.is_zero() {
            kernel.push(tag);
        } else {
            red.insert(rem, tag);
        }
    }
    kernel
}

/// `dim ker(d_out) - rank(d_in)` for composable `d_out ∘ d_in = 0`.
pub fn homology_dim_f2(d_in: &F2Matrix, d_out: &F2Matrix) -> Result<usize, LinalgError> {
    check_composable(d_in, d_out)?;
    Ok(d_out.cols() - rank_f2(d_out) - rank_f2(d_in))
}

fn check_composable(d_in: &F2Matrix, d_out: &F2Matrix) -> Result<(), LinalgError> {
    if d_in.rows() != d_out.cols() {
        return Err(LinalgError::ShapeMismatch(format!(
            "incoming differential has {} rows, outgoing has {} columns",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(LinalgError::CompositionNonzero);
    }
    Ok(())
}

/// A basis of `ker(d_out) / im(d_in)` lifted to cycles.
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    reps: Vec<F2Vector>,
    reducer: ColumnReducer,
}

impl HomologyBasis {
    pub fn new(d_in: &F2Matrix, d_out: &F2Matrix) -> Result<Self, LinalgError> {
        check_composable(d_in, d_out)?;
        let n = d_out.cols();
        let cycles = kernel_basis_f2(d_out);
        // Rank of H is bounded by the cycle count; tags index homology classes.
        let tag_len = cycles.len();
        let mut reducer = ColumnReducer::new(n, tag_len);
        for b in d_in.columns() {
            reducer.insert(b.clone(), F2Vector::zeros(tag_len));
        }
        let mut reps = Vec::new();
        for z in cycles {
            let (rem, _) = reducer.reduce(z.clone(), F2Vector::zeros(tag_len));
            if !rem.is_zero() {
                let k = reps.len();
                reducer.insert(z.clone(), F2Vector::unit(tag_len, k));
                reps.push(z);
            }
        }
        Ok(Self { reps, reducer })
    }

    /// Homology of a square differential `d` with `d² = 0`.
    pub fn of_differential(d: &F2Matrix) -> Result<Self, LinalgError> {
        Self::new(d, d)
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Cycle representatives, one per basis class.
    pub fn representatives(&self) -> &[F2Vector] {
        &self.reps
    }

    /// Coordinates of the class of `cycle` in this basis.
    ///
    /// `cycle` must actually be a cycle; this is not rechecked.
    pub fn coordinates(&self, cycle: &F2Vector) -> F2Vector {
        let tag_len = self.reducer.tag_len;
        let (rem, tag) = self
            .reducer
            .reduce(cycle.clone(), F2Vector::zeros(tag_len));
        debug_assert!(rem.is_zero(), "vector is not a cycle");
        F2Vector::from_ones(self.dim(), tag.ones().filter(|&k| k < self.dim()))
    }

    /// Matrix of the map induced on homology by `f: source -> target`,
    /// in the bases `self` (source) and `target`.
    pub fn induced_matrix(&self, f: &F2Matrix, target: &HomologyBasis) -> F2Matrix {
        let columns = self
            .reps
            .iter()
            .map(|z| target.coordinates(&f.apply(z)))
            .collect();
        F2Matrix::from_columns(target.dim(), columns)
    }

    /// Rank of the map induced on homology by `f`.
    pub fn induced_rank(&self, f: &F2Matrix, target: &HomologyBasis) -> usize {
        rank_f2(&self.induced_matrix(f, target))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(rows: usize, cols: usize, bits: &[u8]) -> F2Matrix {
        let entries = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| bits[r * cols + c] == 1);
        F2Matrix::from_entries(rows, cols, entries).unwrap()
    }

    // Image size by enumerating all inputs.
    fn brute_rank(m: &F2Matrix) -> usize {
        let mut image = std::collections::HashSet::new();
        for x in 0u32..(1 << m.cols()) {
            let v = F2Vector::from_ones(m.cols(), (0..m.cols()).filter(|i| x >> i & 1 == 1));
            image.insert(m.apply(&v));
        }
        image.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_f2(&F2Matrix::zeros(3, 3)), 0);
        assert_eq!(rank_f2(&F2Matrix::identity(2)), 2);
        // v0 + h0 on the trefoil: basis (b, Ua, c), columns b->0, Ua->c, c->c.
        let m = F2Matrix::from_entries(3, 3, [(2, 1), (2, 2)]).unwrap();
        assert_eq!(brute_rank(&m), 1);
        assert_eq!(rank_f2(&m), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis_f2(&F2Matrix::identity(2)).is_empty());
        assert_eq!(kernel_basis_f2(&F2Matrix::zeros(1, 3)).len(), 3);
        let k = kernel_basis_f2(&dense(1, 2, &[1, 1]));
        assert_eq!(k, vec![F2Vector::from_ones(2, [0, 1])]);
    }

    #[test]
    fn homology_examples() {
        assert_eq!(
            homology_dim_f2(&F2Matrix::zeros(1, 0), &F2Matrix::zeros(0, 1)).unwrap(),
            1
        );
        assert_eq!(
            homology_dim_f2(&F2Matrix::identity(2), &F2Matrix::zeros(0, 2)).unwrap(),
            0
        );
        // Trefoil B-hat: basis (a, b, c), d b = c.
        let d = F2Matrix::from_entries(3, 3, [(2, 1)]).unwrap();
        assert_eq!(homology_dim_f2(&d, &d).unwrap(), 1);
    }

    #[test]
    fn composition_nonzero_is_rejected() {
        let d = F2Matrix::identity(2);
        assert_eq!(
            homology_dim_f2(&d, &d),
            Err(LinalgError::CompositionNonzero)
        );
    }

    #[test]
    fn from_entries_rejects_bad_positions() {
        assert!(matches!(
            F2Matrix::from_entries(2, 2, [(2, 0)]),
            Err(LinalgError::OutOfBounds { .. })
        ));
        assert_eq!(
            F2Matrix::from_entries(2, 2, [(1, 1), (1, 1)]),
            Err(LinalgError::DuplicateEntry { row: 1, col: 1 })
        );
    }

    #[test]
    fn induced_rank_on_trefoil_v0() {
        // A0 basis (b, Ua, c) with d b = Ua + c; B basis (a, b, c) with d b = c.
        let da = F2Matrix::from_entries(3, 3, [(1, 0), (2, 0)]).unwrap();
        let db = F2Matrix::from_entries(3, 3, [(2, 1)]).unwrap();
        let ha = HomologyBasis::of_differential(&da).unwrap();
        let hb = HomologyBasis::of_differential(&db).unwrap();
        assert_eq!((ha.dim(), hb.dim()), (1, 1));
        // v0: b -> b, c -> c, Ua -> 0.
        let v = F2Matrix::from_entries(3, 3, [(1, 0), (2, 2)]).unwrap();
        assert_eq!(ha.induced_rank(&v, &hb), 0);
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = F2Matrix> {
        (0..=max, 0..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u8..2, r * c).prop_map(move |bits| dense(r, c, &bits))
        })
    }

    // d = X·Y with every column of X in ker Y, so d² = X(YX)Y = 0.
    fn arb_square_zero(max: usize) -> impl Strategy<Value = F2Matrix> {
        (1..=max, 0..=max).prop_flat_map(|(n, k)| {
            (
                proptest::collection::vec(0u8..2, k * n),
                proptest::collection::vec(0u8..2, k * n),
            )
                .prop_map(move |(ybits, xbits)| {
                    let y = dense(k, n, &ybits);
                    let kernel = kernel_basis_f2(&y);
                    let columns = (0..k)
                        .map(|j| {
                            let mut col = F2Vector::zeros(n);
                            for (q, kv) in kernel.iter().enumerate() {
                                if xbits[(j * n + q) % xbits.len()] == 1 {
                                    col.xor_assign(kv);
                                }
                            }
                            col
                        })
                        .collect();
                    let x = F2Matrix::from_columns(n, columns);
                    x.mul(&y).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(8)) {
            prop_assert_eq!(rank_f2(&m) + kernel_basis_f2(&m).len(), m.cols());
            for k in kernel_basis_f2(&m) {
                prop_assert!(m.apply(&k).is_zero());
            }
        }

        #[test]
        fn rank_matches_enumeration(m in arb_matrix(6)) {
            prop_assert_eq!(rank_f2(&m), brute_rank(&m));
        }

        #[test]
        fn rank_of_transpose(m in arb_matrix(8)) {
            prop_assert_eq!(rank_f2(&m), rank_f2(&m.transpose()));
        }

        #[test]
        fn homology_matches_enumeration(d in arb_square_zero(6)) {
            let n = d.cols();
            let mut cycles = 0usize;
            let mut boundaries = std::collections::HashSet::new();
            for x in 0u32..(1 << n) {
                let v = F2Vector::from_ones(n, (0..n).filter(|i| x >> i & 1 == 1));
                let dv = d.apply(&v);
                if dv.is_zero() {
                    cycles += 1;
                }
                boundaries.insert(dv);
            }
            let expected = cycles.trailing_zeros() as usize - boundaries.len().trailing_zeros() as usize;
            prop_assert_eq!(homology_dim_f2(&d, &d).unwrap(), expected);
            prop_assert_eq!(HomologyBasis::of_differential(&d).unwrap().dim(), expected);
        }
    }
}
