//! Laurent polynomials in `T` over F₂ and matrices over `F₂[T, T⁻¹]`.
//!
//! The ring is a PID whose units are exactly the monomials `T^k`, so every
//! nonzero element has a canonical representative: shift it until the
//! lowest exponent is 0. Euclidean division runs on those representatives
//! with the exponent span as the norm.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::linalg::F2Matrix;

/// An element of `F₂[T, T⁻¹]`, stored as its set of exponents.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    support: BTreeSet<i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    pub fn monomial(k: i64) -> Self {
        Self {
            support: BTreeSet::from([k]),
        }
    }

    /// `T`.
    pub fn t() -> Self {
        Self::monomial(1)
    }

    /// Sum of `T^k` over the given exponents; repeated exponents cancel.
    pub fn from_exponents(exps: impl IntoIterator<Item = i64>) -> Self {
        let mut p = Self::zero();
        for k in exps {
            p.toggle(k);
        }
        p
    }

    fn toggle(&mut self, k: i64) {
        if !self.support.remove(&k) {
            self.support.insert(k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.support.len() == 1 && self.support.contains(&0)
    }

    /// Units of the ring are the monomials.
    pub fn is_unit(&self) -> bool {
        self.support.len() == 1
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.support.iter().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.support.first().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.support.last().copied()
    }

    /// Exponent span `max - min`; the Euclidean norm. `None` for zero.
    pub fn span(&self) -> Option<i64> {
        Some(self.max_exp()? - self.min_exp()?)
    }

    pub fn shift(&self, k: i64) -> Self {
        Self {
            support: self.support.iter().map(|e| e + k).collect(),
        }
    }

    /// The associate with lowest exponent 0 (nonzero constant term).
    pub fn normalized(&self) -> Self {
        match self.min_exp() {
            Some(m) => self.shift(-m),
            None => Self::zero(),
        }
    }

    /// Value at `T = 1`.
    pub fn eval_at_one(&self) -> bool {
        self.support.len() % 2 == 1
    }

    /// Euclidean division: `self = q * rhs + r` with `span(r) < span(rhs)`
    /// (or `r = 0`).
    pub fn div_rem(&self, rhs: &Self) -> (Self, Self) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let (ea, eb) = (self.min_exp().unwrap(), rhs.min_exp().unwrap());
        let a = self.normalized();
        let b = rhs.normalized();
        let db = b.max_exp().unwrap();
        let mut q = Self::zero();
        let mut r = a;
        while let Some(dr) = r.max_exp() {
            if dr < db {
                break;
            }
            let k = dr - db;
            q.toggle(k);
            r = &r + &b.shift(k);
        }
        (q.shift(ea - eb), r.shift(ea))
    }

    pub fn is_divisible_by(&self, rhs: &Self) -> bool {
        self.div_rem(rhs).1.is_zero()
    }

    /// Normalized greatest common divisor.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.normalized();
        let mut b = rhs.normalized();
        while !b.is_zero() {
            let r = a.div_rem(&b).1.normalized();
            a = b;
            b = r;
        }
        a
    }

    /// Ordering used for reporting: by span, then by normalized support.
    pub fn report_cmp(&self, other: &Self) -> Ordering {
        let key = |p: &Self| {
            let n = p.normalized();
            (p.span(), n.support.iter().copied().collect::<Vec<_>>())
        };
        key(self).cmp(&key(other))
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly {
            support: self
                .support
                .symmetric_difference(&rhs.support)
                .copied()
                .collect(),
        }
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for a in &self.support {
            for b in &rhs.support {
                out.toggle(a + b);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .support
            .iter()
            .rev()
            .map(|&k| match k {
                0 => "1".to_string(),
                1 => "T".to_string(),
                k => format!("T^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A matrix over `F₂[T, T⁻¹]`; only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one());
        }
        m
    }

    /// Dense construction from rows of entries.
    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, e) in row.into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    /// `f0 + T·f1` for two F₂ matrices of equal shape.
    pub fn from_linear(f0: &F2Matrix, f1: &F2Matrix) -> Self {
        assert_eq!((f0.rows(), f0.cols()), (f1.rows(), f1.cols()));
        let mut m = Self::zeros(f0.rows(), f0.cols());
        for (r, c) in f0.entries() {
            m.add_to(r, c, &LaurentPoly::one());
        }
        for (r, c) in f1.entries() {
            m.add_to(r, c, &LaurentPoly::t());
        }
        m
    }

    pub fn from_f2(m: &F2Matrix) -> Self {
        Self::from_linear(m, &F2Matrix::zeros(m.rows(), m.cols()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> LaurentPoly {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, p: LaurentPoly) {
        assert!(r < self.rows && c < self.cols, "position out of bounds");
        if p.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), p);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, p: &LaurentPoly) {
        let sum = &self.get(r, c) + p;
        self.set(r, c, sum);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &LaurentPoly)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, rhs: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (&(i, k), a) in &self.entries {
            for j in 0..rhs.cols {
                if let Some(b) = rhs.entries.get(&(k, j)) {
                    out.add_to(i, j, &(a * b));
                }
            }
        }
        out
    }

    /// Substitutes `T = 1`.
    pub fn eval_at_one(&self) -> F2Matrix {
        F2Matrix::from_entries(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .filter(|(_, p)| p.eval_at_one())
                .map(|(&pos, _)| pos),
        )
        .expect("entries are in bounds and unique")
    }

    /// True when every entry is a constant.
    pub fn is_constant(&self) -> bool {
        self.entries.values().all(|p| p.is_one())
    }

    fn to_dense(&self) -> Vec<Vec<LaurentPoly>> {
        let mut d = vec![vec![LaurentPoly::zero(); self.cols]; self.rows];
        for (&(r, c), p) in &self.entries {
            d[r][c] = p.clone();
        }
        d
    }
}

/// Rank over the fraction field `F₂(T)`.
///
/// Fraction-free elimination: a row is cleared below the pivot by
/// `row ← pivot·row + entry·pivot_row`, then divided by the gcd of its
/// entries to keep degrees small.
pub fn rank_fraction_field(m: &LaurentMatrix) -> usize {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows)
            .filter(|&r| !a[r][col].is_zero())
            .min_by(|&x, &y| a[x][col].report_cmp(&a[y][col]))
        else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let e = a[r][col].clone();
            for c in col..cols {
                let v = &(&pivot * &a[r][c]) + &(&e * &a[rank][c]);
                a[r][c] = v;
            }
            remove_content(&mut a[r]);
        }
        rank += 1;
    }
    rank
}

fn remove_content(row: &mut [LaurentPoly]) {
    let mut g = LaurentPoly::zero();
    for e in row.iter().filter(|e| !e.is_zero()) {
        g = if g.is_zero() { e.normalized() } else { g.gcd(e) };
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    for e in row.iter_mut().filter(|e| !e.is_zero()) {
        let (q, r) = e.div_rem(&g);
        debug_assert!(r.is_zero());
        *e = q.normalized();
    }
}

/// Nonzero invariant factors of `m` over `F₂[T, T⁻¹]`, each normalized to
/// have nonzero constant term, in divisibility order.
pub fn smith_invariants_laurent(m: &LaurentMatrix) -> Vec<LaurentPoly> {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows(), m.cols());
    let mut factors = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        // Smallest-span nonzero entry in the trailing block.
        let Some((pr, pc)) = (k..rows)
            .flat_map(|r| (k..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| !a[r][c].is_zero())
            .min_by(|&(r1, c1), &(r2, c2)| a[r1][c1].span().cmp(&a[r2][c2].span()))
        else {
            break;
        };
        a.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        loop {
            let pivot = a[k][k].clone();
            let mut improved = false;
            // Clear column k.
            for r in k + 1..rows {
                if a[r][k].is_zero() {
                    continue;
                }
                let (q, _) = a[r][k].div_rem(&pivot);
                for c in k..cols {
                    let v = &a[r][c] + &(&q * &a[k][c]);
                    a[r][c] = v;
                }
                if !a[r][k].is_zero() {
                    improved = true;
                }
            }
            // Clear row k.
            for c in k + 1..cols {
                if a[k][c].is_zero() {
                    continue;
                }
                let (q, _) = a[k][c].div_rem(&pivot);
                for row in a.iter_mut().skip(k) {
                    let v = &row[c] + &(&q * &row[k]);
                    row[c] = v;
                }
                if !a[k][c].is_zero() {
                    improved = true;
                }
            }
            if improved {
                // A remainder with smaller span appeared; move it to the pivot.
                let best = (k..rows)
                    .map(|r| (r, k))
                    .chain((k..cols).map(|c| (k, c)))
                    .filter(|&(r, c)| !a[r][c].is_zero())
                    .min_by(|&(r1, c1), &(r2, c2)| a[r1][c1].span().cmp(&a[r2][c2].span()))
                    .expect("pivot row is nonzero");
                a.swap(k, best.0);
                for row in a.iter_mut() {
                    row.swap(k, best.1);
                }
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let bad = (k + 1..rows)
                .flat_map(|r| (k + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !a[r][c].is_divisible_by(&pivot));
            match bad {
                Some((r, _)) => {
                    for c in k..cols {
                        let v = &a[k][c] + &a[r][c];
                        a[k][c] = v;
                    }
                }
                None => break,
            }
        }
        factors.push(a[k][k].normalized());
        k += 1;
    }
    factors
}
