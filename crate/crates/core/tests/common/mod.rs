//! Independent reference computations and random complexes for the
//! integration tests. Nothing here calls the library's linear algebra or
//! subquotient code.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use hfzero::{Grading, KnotComplex};
use rand::seq::SliceRandom;
use rand::Rng;

/// Dense Gaussian elimination over a field.
pub trait Field: Copy + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn inv(self) -> Self;
    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

impl Field for bool {
    fn zero() -> Self {
        false
    }
    fn one() -> Self {
        true
    }
    fn add(self, o: Self) -> Self {
        self ^ o
    }
    fn mul(self, o: Self) -> Self {
        self & o
    }
    fn inv(self) -> Self {
        assert!(self);
        true
    }
}

/// GF(2^64) modulo x^64 + x^4 + x^3 + x + 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Gf64(pub u64);

impl Field for Gf64 {
    fn zero() -> Self {
        Gf64(0)
    }
    fn one() -> Self {
        Gf64(1)
    }
    fn add(self, o: Self) -> Self {
        Gf64(self.0 ^ o.0)
    }
    fn mul(self, o: Self) -> Self {
        let (mut a, mut b, mut r) = (self.0, o.0, 0u64);
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            let carry = a >> 63;
            a <<= 1;
            if carry == 1 {
                a ^= 0b1_1011;
            }
        }
        Gf64(r)
    }
    fn inv(self) -> Self {
        assert!(self.0 != 0);
        // a^(2^64 - 2)
        let mut result = Gf64::one();
        let mut base = self;
        let mut e: u64 = u64::MAX - 1;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        result
    }
}

pub fn rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].mul(inv);
                for k in c..cols {
                    let v = m[r][k].mul(f);
                    m[i][k] = m[i][k].add(v);
                }
            }
        }
        r += 1;
    }
    r
}

pub fn matmul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(F::zero(), |acc, k| acc.add(row[k].mul(b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn is_zero<F: Field>(m: &[Vec<F>]) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// Null space basis of an F₂ matrix, as column vectors.
pub fn nullspace(m: &[Vec<bool>], cols: usize) -> Vec<Vec<bool>> {
    let mut a: Vec<Vec<bool>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c]) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && a[i][c] {
                for k in 0..cols {
                    a[i][k] ^= a[r][k];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![false; cols];
            v[free] = true;
            for (row, &pc) in pivots.iter().enumerate() {
                if a[row][free] {
                    v[pc] = true;
                }
            }
            v
        })
        .collect()
}

fn gen_index(c: &KnotComplex) -> HashMap<&str, usize> {
    c.generators
        .iter()
        .enumerate()
        .map(|(k, g)| (g.name.as_str(), k))
        .collect()
}

/// `(generator, i)` elements of a region, with a lookup table.
struct Elements {
    list: Vec<(usize, i64)>,
    index: HashMap<(usize, i64), usize>,
}

impl Elements {
    fn new(c: &KnotComplex, keep: impl Fn(i64, i64) -> bool, reach: i64) -> Self {
        let mut list = Vec::new();
        for (g, gen) in c.generators.iter().enumerate() {
            for i in -reach..=reach {
                if keep(i, i + gen.alexander) {
                    list.push((g, i));
                }
            }
        }
        let index = list.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        Elements { list, index }
    }
}

/// The mapping cone of `v + T·h` built straight from the term lists.
/// Entries are `(row, col, coefficient)`; the coefficient is `false` for 1
/// and `true` for `T`.
pub struct OracleCone {
    pub size: usize,
    /// Elements `0..na` span `A_s`, the rest `B`.
    pub na: usize,
    pub entries: Vec<(usize, usize, bool)>,
    pub degrees: Vec<Grading>,
}

impl OracleCone {
    pub fn build(c: &KnotComplex, s: i64) -> Self {
        let idx = gen_index(c);
        let reach = c.generators.iter().map(|g| g.alexander.abs()).max().unwrap_or(0) + s.abs() + 2;
        let a = Elements::new(c, |i, j| i.max(j - s) == 0, reach);
        let b = Elements::new(c, |i, _| i == 0, reach);
        let na = a.list.len();
        let mut entries = Vec::new();
        for t in &c.differential {
            let (src, tgt) = (idx[t.source.as_str()], idx[t.target.as_str()]);
            for (els, off) in [(&a, 0), (&b, na)] {
                for (col, &(g, i)) in els.list.iter().enumerate() {
                    if g != src {
                        continue;
                    }
                    if let Some(&row) = els.index.get(&(tgt, i - t.u_power)) {
                        entries.push((row + off, col + off, false));
                    }
                }
            }
        }
        let flip = c.flip.as_ref().expect("oracle cone needs a flip");
        for (col, &(g, i)) in a.list.iter().enumerate() {
            if i == 0 {
                entries.push((na + b.index[&(g, 0)], col, false));
            }
            if i + c.generators[g].alexander == s {
                for f in flip.iter().filter(|f| idx[f.source.as_str()] == g) {
                    let target = (idx[f.target.as_str()], i - s - f.u_power);
                    if let Some(&row) = b.index.get(&target) {
                        entries.push((na + row, col, true));
                    }
                }
            }
        }
        let maslov = |&(g, i): &(usize, i64)| c.generators[g].maslov + 2 * i;
        let degrees = a
            .list
            .iter()
            .map(maslov)
            .chain(b.list.iter().map(|x| maslov(x) - 1))
            .collect();
        OracleCone {
            size: na + b.list.len(),
            na,
            entries,
            degrees,
        }
    }

    pub fn matrix<F: Field>(&self, t: F) -> Vec<Vec<F>> {
        let mut m = vec![vec![F::zero(); self.size]; self.size];
        for &(r, c, twisted) in &self.entries {
            let v = if twisted { t } else { F::one() };
            m[r][c] = m[r][c].add(v);
        }
        m
    }

    /// Total homology dimension of the untwisted cone.
    pub fn untwisted_dim(&self) -> usize {
        let d = self.matrix(true);
        assert!(is_zero(&matmul(&d, &d)), "oracle cone differential squares to zero");
        self.size - 2 * rank(&d)
    }

    /// Homology dimensions by degree of the untwisted cone.
    pub fn untwisted_graded(&self) -> BTreeMap<Grading, usize> {
        let d = self.matrix(true);
        let mut out = BTreeMap::new();
        let mut degrees = self.degrees.clone();
        degrees.sort();
        degrees.dedup();
        for &g in &degrees {
            let here: Vec<usize> = (0..self.size).filter(|&k| self.degrees[k] == g).collect();
            let sub = |rows: &[usize], cols: &[usize]| -> Vec<Vec<bool>> {
                rows.iter()
                    .map(|&r| cols.iter().map(|&c| d[r][c]).collect())
                    .collect()
            };
            let below: Vec<usize> = (0..self.size).filter(|&k| self.degrees[k] == g - 1).collect();
            let above: Vec<usize> = (0..self.size).filter(|&k| self.degrees[k] == g + 1).collect();
            let dim = here.len() - rank(&sub(&below, &here)) - rank(&sub(&here, &above));
            if dim > 0 {
                out.insert(g, dim);
            }
        }
        out
    }

    /// `(dim H(A_s), dim H(B))` from the diagonal blocks.
    pub fn block_dims(&self) -> (usize, usize) {
        let d = self.matrix(true);
        let block = |lo: usize, hi: usize| -> usize {
            let m: Vec<Vec<bool>> = (lo..hi).map(|r| d[r][lo..hi].to_vec()).collect();
            (hi - lo) - 2 * rank(&m)
        };
        (block(0, self.na), block(self.na, self.size))
    }

    /// Dimension over `F₂(T)`, evaluated at two pseudo-random points of
    /// GF(2^64).
    pub fn twisted_dim(&self) -> usize {
        let r = [0x9e37_79b9_7f4a_7c15u64, 0xd1b5_4a32_d192_ed03]
            .iter()
            .map(|&t| rank(&self.matrix(Gf64(t))))
            .max()
            .unwrap();
        self.size - 2 * r
    }
}

/// Graded `HF_red` of `C{i >= 0}` truncated at height `n`, in degrees at
/// most `min + n` where truncation cannot interfere.
pub fn reduced_dims(c: &KnotComplex, n: i64) -> BTreeMap<Grading, usize> {
    let idx = gen_index(c);
    let els: Vec<(usize, i64)> = (0..c.generators.len())
        .flat_map(|g| (0..=n).map(move |i| (g, i)))
        .collect();
    let pos: HashMap<(usize, i64), usize> = els.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let size = els.len();
    let mut d = vec![vec![false; size]; size];
    for t in &c.differential {
        let (src, tgt) = (idx[t.source.as_str()], idx[t.target.as_str()]);
        for (col, &(g, i)) in els.iter().enumerate() {
            if g == src {
                if let Some(&row) = pos.get(&(tgt, i - t.u_power)) {
                    d[row][col] ^= true;
                }
            }
        }
    }
    let deg: Vec<Grading> = els
        .iter()
        .map(|&(g, i)| c.generators[g].maslov + 2 * i)
        .collect();
    let min = *deg.iter().min().unwrap();
    let in_deg = |g: Grading| -> Vec<usize> { (0..size).filter(|&k| deg[k] == g).collect() };
    let k = n / 2;
    let mut out = BTreeMap::new();
    let mut gs = deg.clone();
    gs.sort();
    gs.dedup();
    for &g in gs.iter().filter(|&&g| g <= min + n) {
        let here = in_deg(g);
        let below = in_deg(g - 1);
        let above = in_deg(g + 1);
        let sub = |rows: &[usize], cols: &[usize]| -> Vec<Vec<bool>> {
            rows.iter()
                .map(|&r| cols.iter().map(|&c| d[r][c]).collect())
                .collect()
        };
        let boundaries = sub(&here, &above);
        let b_rank = rank(&boundaries);
        let h_dim = here.len() - rank(&sub(&below, &here)) - b_rank;
        // Image of U^k on cycles two k degrees up.
        let up = in_deg(g + 2 * k);
        let cycles = nullspace(&sub(&in_deg(g + 2 * k - 1), &up), up.len());
        let mut span: Vec<Vec<bool>> = (0..here.len())
            .map(|r| (0..above.len()).map(|c| boundaries[r][c]).collect())
            .collect();
        for z in &cycles {
            for (r, &h) in here.iter().enumerate() {
                let (hg, hi) = els[h];
                let bit = up
                    .iter()
                    .enumerate()
                    .any(|(q, &u)| z[q] && els[u] == (hg, hi + k));
                span[r].push(bit);
            }
        }
        let image = rank(&span) - b_rank;
        if h_dim > image {
            out.insert(g, h_dim - image);
        }
    }
    out
}

/// `HFK-hat` dimensions by Alexander grading: homology of the part of
/// `C{i = 0}` that preserves `j`.
pub fn hfk_dims(c: &KnotComplex) -> BTreeMap<i64, usize> {
    let idx = gen_index(c);
    let mut out = BTreeMap::new();
    let mut alex: Vec<i64> = c.generators.iter().map(|g| g.alexander).collect();
    alex.sort();
    alex.dedup();
    for a in alex {
        let gens: Vec<usize> = (0..c.generators.len())
            .filter(|&g| c.generators[g].alexander == a)
            .collect();
        let mut d = vec![vec![false; gens.len()]; gens.len()];
        for t in c.differential.iter().filter(|t| t.u_power == 0) {
            let (src, tgt) = (idx[t.source.as_str()], idx[t.target.as_str()]);
            if let (Some(col), Some(row)) = (
                gens.iter().position(|&g| g == src),
                gens.iter().position(|&g| g == tgt),
            ) {
                d[row][col] ^= true;
            }
        }
        let dim = gens.len() - 2 * rank(&d);
        if dim > 0 {
            out.insert(a, dim);
        }
    }
    out
}

/// A complex as generators plus a dense F₂ differential; the U powers are
/// implied by the Maslov gradings.
#[derive(Clone, Debug)]
struct Dense {
    gens: Vec<(String, i64, Grading)>,
    d: Vec<Vec<bool>>,
}

impl Dense {
    fn push_block(&mut self, gens: &[(i64, i64)], terms: &[(usize, usize)], shift: i64) {
        let base = self.gens.len();
        let tag = base;
        for (k, &(a, m)) in gens.iter().enumerate() {
            self.gens
                .push((format!("g{tag}_{k}"), a, Grading::int(m + shift)));
        }
        let n = self.gens.len();
        for row in &mut self.d {
            row.resize(n, false);
        }
        self.d.resize(n, vec![false; n]);
        for &(src, tgt) in terms {
            self.d[base + tgt][base + src] = true;
        }
    }

    fn power(&self, src: usize, tgt: usize) -> Option<i64> {
        let diff = self.gens[src].2 - 1 - self.gens[tgt].2;
        if !diff.is_integer() || diff.floor_i64() % 2 != 0 {
            return None;
        }
        Some(-diff.floor_i64() / 2)
    }

    /// Replaces generator `x` by `x + U^n y` when that is a filtered,
    /// homogeneous change of basis.
    fn change_basis(&mut self, x: usize, y: usize) -> bool {
        if x == y {
            return false;
        }
        let diff = self.gens[y].2 - self.gens[x].2;
        if !diff.is_integer() || diff.floor_i64() % 2 != 0 {
            return false;
        }
        let n = diff.floor_i64() / 2;
        if n < 0 || self.gens[y].1 - n > self.gens[x].1 {
            return false;
        }
        // D' = P D P with P = I + E[y][x].
        let size = self.gens.len();
        let mut d = self.d.clone();
        for r in 0..size {
            if d[r][y] {
                d[r][x] ^= true;
            }
        }
        for c in 0..size {
            if d[x][c] {
                d[y][c] ^= true;
            }
        }
        self.d = d;
        true
    }

    fn to_complex(&self, order: &[usize]) -> KnotComplex {
        let mut c = KnotComplex::new("0");
        for &g in order {
            let (name, a, m) = &self.gens[g];
            c = c.gen(name, *a, *m);
        }
        for &src in order {
            for &tgt in order {
                if self.d[tgt][src] {
                    let n = self.power(src, tgt).expect("homogeneous");
                    c = c.d(&self.gens[src].0, n, &self.gens[tgt].0);
                }
            }
        }
        c
    }
}

/// Step-`k` staircase `∂b = U^k a + c`.
fn staircase(k: i64) -> (Vec<(i64, i64)>, Vec<(usize, usize)>) {
    (vec![(k, 2 * k - 2), (0, -1), (-k, -2)], vec![(1, 0), (1, 2)])
}

/// Mirror of [`staircase`]: `∂x = y`, `∂z = U^k y`.
fn mirror_staircase(k: i64) -> (Vec<(i64, i64)>, Vec<(usize, usize)>) {
    (vec![(k, 2), (0, 1), (-k, 2 - 2 * k)], vec![(0, 1), (2, 1)])
}

/// Acyclic square of side `k`.
fn square(k: i64) -> (Vec<(i64, i64)>, Vec<(usize, usize)>) {
    (
        vec![(0, 0), (k, 2 * k - 1), (-k, -1), (0, 2 * k - 2)],
        vec![(0, 1), (0, 2), (1, 3), (2, 3)],
    )
}

/// The five-generator staircase of the (2,5) torus knot.
fn long_staircase() -> (Vec<(i64, i64)>, Vec<(usize, usize)>) {
    (
        vec![(2, 0), (1, -1), (0, -2), (-1, -3), (-2, -4)],
        vec![(1, 0), (1, 2), (3, 2), (3, 4)],
    )
}

/// A random valid complex with at most six generators, built from
/// symmetric blocks and then possibly scrambled by filtered basis changes.
pub fn random_complex(rng: &mut impl Rng) -> KnotComplex {
    let mut dense = Dense {
        gens: Vec::new(),
        d: Vec::new(),
    };
    loop {
        let room = 6 - dense.gens.len();
        let mut options: Vec<(Vec<(i64, i64)>, Vec<(usize, usize)>)> = vec![(vec![(0, 0)], vec![])];
        if room >= 3 {
            let k = rng.gen_range(1..=2);
            options.push(staircase(k));
            options.push(mirror_staircase(k));
        }
        if room >= 4 {
            options.push(square(rng.gen_range(1..=2)));
        }
        if room >= 5 {
            options.push(long_staircase());
        }
        let (gens, terms) = options.choose(rng).unwrap().clone();
        dense.push_block(&gens, &terms, 2 * rng.gen_range(-1..=1) + rng.gen_range(0..=1));
        if dense.gens.len() >= 6 || rng.gen_bool(0.4) {
            break;
        }
    }
    if rng.gen_bool(0.1) {
        for g in &mut dense.gens {
            g.2 = g.2 + Grading::new(1, 2);
        }
    }
    if rng.gen_bool(0.4) {
        let n = dense.gens.len();
        let want = rng.gen_range(1..=3);
        let mut done = 0;
        for _ in 0..40 {
            if done == want {
                break;
            }
            if dense.change_basis(rng.gen_range(0..n), rng.gen_range(0..n)) {
                done += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..dense.gens.len()).collect();
    order.shuffle(rng);
    dense.to_complex(&order)
}
