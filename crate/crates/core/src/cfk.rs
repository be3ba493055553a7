//! Finite free models of the full knot Floer complex.
//!
//! A [`KnotComplex`] lists generators over `F₂[U, U⁻¹]` with their
//! Alexander and Maslov gradings, and the differential as terms
//! `U^n · target` of `∂ source`. The plane element `U^{-i} · g` sits at
//! lattice position `(i, i + A(g))` with Maslov grading `M(g) + 2i`.
//!
//! A flip map `Φ` exchanges the two lattice coordinates. Its terms are
//! written the same way, `U^p · target` in `Φ(source)`; exchanging the
//! coordinates exactly forces `p = -A(source)` and `A(target) = -A(source)`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::grading::Grading;
use crate::linalg::{rank_f2, F2Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub alexander: i64,
    pub maslov: Grading,
}

/// The term `U^u_power · target` in `∂ source`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DiffTerm {
    pub source: String,
    pub target: String,
    pub u_power: i64,
}

/// The term `U^u_power · target` in `Φ(source)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FlipTerm {
    pub source: String,
    pub target: String,
    pub u_power: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnotComplex {
    pub spinc: String,
    pub generators: Vec<Generator>,
    pub differential: Vec<DiffTerm>,
    pub flip: Option<Vec<FlipTerm>>,
}

/// `U^{-i} · generator`, indexing into the owning complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlaneElement {
    pub generator: usize,
    pub i: i64,
}

impl PlaneElement {
    pub fn new(generator: usize, i: i64) -> Self {
        Self { generator, i }
    }

    /// Lattice position `(i, j)`.
    pub fn position(&self, c: &KnotComplex) -> (i64, i64) {
        (self.i, self.i + c.generators[self.generator].alexander)
    }

    pub fn maslov(&self, c: &KnotComplex) -> Grading {
        c.generators[self.generator].maslov + 2 * self.i
    }

    pub fn label(&self, c: &KnotComplex) -> String {
        format!("({},{})", c.generators[self.generator].name, self.i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfkError {
    #[error("invalid complex: {0}")]
    Invalid(ValidationReport),
    #[error("no generator involution satisfies the flip constraints; supply a flip explicitly")]
    NoFlipFound,
    #[error("complex {spinc:?} has no flip map")]
    FlipMissing { spinc: String },
}

/// Differential and flip with generator names resolved to indices.
#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    /// `(u_power, target)` terms of `∂ g`, per source.
    pub(crate) diff: Vec<Vec<(i64, usize)>>,
    /// `(u_power, target)` terms of `Φ(g)`, per source.
    pub(crate) flip: Option<Vec<Vec<(i64, usize)>>>,
}

impl KnotComplex {
    pub fn new(spinc: impl Into<String>) -> Self {
        Self {
            spinc: spinc.into(),
            generators: Vec::new(),
            differential: Vec::new(),
            flip: None,
        }
    }

    pub fn gen(mut self, name: &str, alexander: i64, maslov: impl Into<Grading>) -> Self {
        self.generators.push(Generator {
            name: name.to_string(),
            alexander,
            maslov: maslov.into(),
        });
        self
    }

    pub fn d(mut self, source: &str, u_power: i64, target: &str) -> Self {
        self.differential.push(DiffTerm {
            source: source.to_string(),
            target: target.to_string(),
            u_power,
        });
        self
    }

    pub fn flip_term(mut self, source: &str, u_power: i64, target: &str) -> Self {
        self.flip.get_or_insert_with(Vec::new).push(FlipTerm {
            source: source.to_string(),
            target: target.to_string(),
            u_power,
        });
        self
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Largest `|A|` over the generators.
    pub fn a_max(&self) -> i64 {
        self.generators
            .iter()
            .map(|g| g.alexander.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn maslov_range(&self) -> Option<(Grading, Grading)> {
        let lo = self.generators.iter().map(|g| g.maslov).min()?;
        let hi = self.generators.iter().map(|g| g.maslov).max()?;
        Some((lo, hi))
    }

    /// Resolves names. Only meaningful on a validated complex; unknown names
    /// are skipped.
    pub(crate) fn resolve(&self) -> Resolved {
        let idx: HashMap<&str, usize> = self
            .generators
            .iter()
            .enumerate()
            .map(|(k, g)| (g.name.as_str(), k))
            .collect();
        let n = self.generators.len();
        let mut diff = vec![Vec::new(); n];
        for t in &self.differential {
            if let (Some(&s), Some(&d)) = (idx.get(t.source.as_str()), idx.get(t.target.as_str())) {
                diff[s].push((t.u_power, d));
            }
        }
        let flip = self.flip.as_ref().map(|terms| {
            let mut f = vec![Vec::new(); n];
            for t in terms {
                if let (Some(&s), Some(&d)) =
                    (idx.get(t.source.as_str()), idx.get(t.target.as_str()))
                {
                    f[s].push((t.u_power, d));
                }
            }
            f
        });
        Resolved { diff, flip }
    }

    /// Plane-element images of `x` under the differential, before any
    /// region cut.
    pub(crate) fn boundary_terms<'a>(
        &self,
        r: &'a Resolved,
        x: PlaneElement,
    ) -> impl Iterator<Item = PlaneElement> + 'a {
        r.diff[x.generator]
            .iter()
            .map(move |&(n, t)| PlaneElement::new(t, x.i - n))
    }

    /// Plane-element images of `x` under the flip.
    pub(crate) fn flip_terms<'a>(
        &self,
        r: &'a Resolved,
        x: PlaneElement,
    ) -> Result<impl Iterator<Item = PlaneElement> + 'a, CfkError> {
        let f = r.flip.as_ref().ok_or_else(|| CfkError::FlipMissing {
            spinc: self.spinc.clone(),
        })?;
        Ok(f[x.generator]
            .iter()
            .map(move |&(p, t)| PlaneElement::new(t, x.i - p)))
    }

    pub fn require_flip(&self) -> Result<(), CfkError> {
        match self.flip {
            Some(_) => Ok(()),
            None => Err(CfkError::FlipMissing {
                spinc: self.spinc.clone(),
            }),
        }
    }

    /// Returns `self` if it already carries a flip, otherwise the result of
    /// [`derive_flip`].
    pub fn with_flip(&self) -> Result<KnotComplex, CfkError> {
        if self.flip.is_some() {
            Ok(self.clone())
        } else {
            derive_flip(self)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyComplex,
    DuplicateGenerator {
        name: String,
    },
    UnknownGenerator {
        term: String,
        name: String,
    },
    DuplicateTerm {
        term: String,
    },
    NegativeUPower {
        term: String,
    },
    FiltrationIncrease {
        term: String,
        min_u_power: i64,
    },
    MaslovDrop {
        term: String,
        expected: Grading,
        found: Grading,
    },
    DSquaredNonzero {
        source: String,
        target: String,
        u_power: i64,
    },
    FlipPosition {
        term: String,
    },
    FlipMaslov {
        term: String,
        expected: Grading,
        found: Grading,
    },
    FlipNotChainMap {
        source: String,
        target: String,
        u_power: i64,
    },
    FlipNotInvertible {
        alexander: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyComplex => write!(f, "complex has no generators"),
            Violation::DuplicateGenerator { name } => write!(f, "generator {name} defined twice"),
            Violation::UnknownGenerator { term, name } => {
                write!(f, "{term}: unknown generator {name}")
            }
            Violation::DuplicateTerm { term } => write!(f, "{term}: term listed twice"),
            Violation::NegativeUPower { term } => write!(f, "{term}: negative U power"),
            Violation::FiltrationIncrease { term, min_u_power } => write!(
                f,
                "{term}: raises the j filtration (needs U power at least {min_u_power})"
            ),
            Violation::MaslovDrop {
                term,
                expected,
                found,
            } => write!(
                f,
                "{term}: Maslov grading of term is {found}, expected {expected} (drop by 1)"
            ),
            Violation::DSquaredNonzero {
                source,
                target,
                u_power,
            } => write!(f, "d^2 {source} contains U^{u_power} {target}"),
            Violation::FlipPosition { term } => {
                write!(f, "{term}: flip does not exchange the filtrations")
            }
            Violation::FlipMaslov {
                term,
                expected,
                found,
            } => write!(
                f,
                "{term}: flip changes the Maslov grading ({found}, expected {expected})"
            ),
            Violation::FlipNotChainMap {
                source,
                target,
                u_power,
            } => write!(
                f,
                "flip does not commute with d: (flip d + d flip) {source} contains U^{u_power} {target}"
            ),
            Violation::FlipNotInvertible { alexander } => write!(
                f,
                "flip restricted to Alexander grading {alexander} is not invertible"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub spinc: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "complex {:?} is valid", self.spinc);
        }
        write!(f, "complex {:?}: ", self.spinc)?;
        let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

fn term_label(kind: &str, source: &str, u_power: i64, target: &str) -> String {
    format!("{kind} {source} : U^{u_power} {target}")
}

/// Checks every structural invariant of `c`, including the flip if present.
pub fn validate(c: &KnotComplex) -> ValidationReport {
    let mut v = Vec::new();
    if c.generators.is_empty() {
        v.push(Violation::EmptyComplex);
    }
    let mut seen = HashSet::new();
    for g in &c.generators {
        if !seen.insert(g.name.as_str()) {
            v.push(Violation::DuplicateGenerator {
                name: g.name.clone(),
            });
        }
    }
    let lookup = |name: &str| c.generators.iter().find(|g| g.name == name);

    let mut diff_ok = true;
    let mut seen_terms = HashSet::new();
    for t in &c.differential {
        let label = term_label("d", &t.source, t.u_power, &t.target);
        let (src, tgt) = (lookup(&t.source), lookup(&t.target));
        for (g, name) in [(src, &t.source), (tgt, &t.target)] {
            if g.is_none() {
                v.push(Violation::UnknownGenerator {
                    term: label.clone(),
                    name: name.clone(),
                });
                diff_ok = false;
            }
        }
        if !seen_terms.insert(t) {
            v.push(Violation::DuplicateTerm { term: label.clone() });
            diff_ok = false;
        }
        if t.u_power < 0 {
            v.push(Violation::NegativeUPower { term: label.clone() });
        }
        let (Some(src), Some(tgt)) = (src, tgt) else {
            continue;
        };
        let min = tgt.alexander - src.alexander;
        if t.u_power < min {
            v.push(Violation::FiltrationIncrease {
                term: label.clone(),
                min_u_power: min.max(0),
            });
        }
        let expected = src.maslov - 1;
        let found = tgt.maslov - 2 * t.u_power;
        if expected != found {
            v.push(Violation::MaslovDrop {
                term: label,
                expected,
                found,
            });
        }
    }

    if diff_ok && v.iter().all(|x| !matches!(x, Violation::DuplicateGenerator { .. })) {
        let r = c.resolve();
        for (g, gen) in c.generators.iter().enumerate() {
            let mut sq: BTreeMap<(i64, usize), bool> = BTreeMap::new();
            for &(n, t) in &r.diff[g] {
                for &(m, w) in &r.diff[t] {
                    *sq.entry((n + m, w)).or_default() ^= true;
                }
            }
            for ((p, w), odd) in sq {
                if odd {
                    v.push(Violation::DSquaredNonzero {
                        source: gen.name.clone(),
                        target: c.generators[w].name.clone(),
                        u_power: p,
                    });
                }
            }
        }
        if c.flip.is_some() {
            validate_flip(c, &r, &mut v);
        }
    }

    ValidationReport {
        spinc: c.spinc.clone(),
        violations: v,
    }
}

fn validate_flip(c: &KnotComplex, r: &Resolved, v: &mut Vec<Violation>) {
    let terms = c.flip.as_ref().expect("flip present");
    let lookup = |name: &str| c.generators.iter().find(|g| g.name == name);
    let mut ok = true;
    let mut seen = HashSet::new();
    for t in terms {
        let label = term_label("flip", &t.source, t.u_power, &t.target);
        let (src, tgt) = (lookup(&t.source), lookup(&t.target));
        for (g, name) in [(src, &t.source), (tgt, &t.target)] {
            if g.is_none() {
                v.push(Violation::UnknownGenerator {
                    term: label.clone(),
                    name: name.clone(),
                });
                ok = false;
            }
        }
        if !seen.insert(t) {
            v.push(Violation::DuplicateTerm { term: label.clone() });
            ok = false;
        }
        let (Some(src), Some(tgt)) = (src, tgt) else {
            continue;
        };
        if t.u_power != -src.alexander || tgt.alexander != -src.alexander {
            v.push(Violation::FlipPosition { term: label.clone() });
            ok = false;
        }
        let found = tgt.maslov - 2 * t.u_power;
        if found != src.maslov {
            v.push(Violation::FlipMaslov {
                term: label,
                expected: src.maslov,
                found,
            });
        }
    }
    if !ok {
        return;
    }
    let flip = r.flip.as_ref().expect("flip resolved");
    for (g, gen) in c.generators.iter().enumerate() {
        let mut diff: BTreeMap<(i64, usize), bool> = BTreeMap::new();
        // d Φ(g)
        for &(p, t) in &flip[g] {
            for &(m, w) in &r.diff[t] {
                *diff.entry((p + m, w)).or_default() ^= true;
            }
        }
        // Φ d(g)
        for &(n, t) in &r.diff[g] {
            for &(p, w) in &flip[t] {
                *diff.entry((n + p, w)).or_default() ^= true;
            }
        }
        for ((p, w), odd) in diff {
            if odd {
                v.push(Violation::FlipNotChainMap {
                    source: gen.name.clone(),
                    target: c.generators[w].name.clone(),
                    u_power: p,
                });
            }
        }
    }
    // Invertibility: Φ maps the generators at Alexander a onto those at -a.
    let mut by_a: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, g) in c.generators.iter().enumerate() {
        by_a.entry(g.alexander).or_default().push(k);
    }
    for (&a, srcs) in &by_a {
        let tgts = by_a.get(&-a).cloned().unwrap_or_default();
        let entries = srcs.iter().enumerate().flat_map(|(col, &s)| {
            let tgts = &tgts;
            flip[s]
                .iter()
                .filter_map(move |&(_, t)| tgts.iter().position(|&x| x == t).map(|row| (row, col)))
        });
        let mut m = F2Matrix::zeros(tgts.len(), srcs.len());
        for (row, col) in entries {
            m.toggle(row, col);
        }
        if tgts.len() != srcs.len() || rank_f2(&m) != srcs.len() {
            v.push(Violation::FlipNotInvertible { alexander: a });
        }
    }
}

/// Flip terms of the generator permutation `sigma`: `Φ(g) = U^{-A(g)} σ(g)`.
pub fn flip_from_permutation(c: &KnotComplex, sigma: &[usize]) -> Vec<FlipTerm> {
    c.generators
        .iter()
        .zip(sigma)
        .map(|(g, &t)| FlipTerm {
            source: g.name.clone(),
            target: c.generators[t].name.clone(),
            u_power: -g.alexander,
        })
        .collect()
}

/// Searches generator permutations compatible with the flip constraints.
///
/// With `involutions_only`, only `σ` with `σ² = id` are considered. The
/// search stops after `limit` hits.
pub fn enumerate_flips(c: &KnotComplex, involutions_only: bool, limit: usize) -> Vec<Vec<usize>> {
    let r = c.resolve();
    let n = c.generators.len();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|g| {
            let gen = &c.generators[g];
            (0..n)
                .filter(|&h| {
                    let t = &c.generators[h];
                    t.alexander == -gen.alexander && t.maslov == gen.maslov - 2 * gen.alexander
                })
                .collect()
        })
        .collect();
    // A generator's chain-map equation can be checked once it and all its
    // differential targets are assigned, plus the targets of ∂σ(g).
    let mut search = FlipSearch {
        c,
        r: &r,
        candidates,
        sigma: vec![None; n],
        used: vec![false; n],
        involutions_only,
        limit,
        found: Vec::new(),
    };
    search.run(0);
    search.found
}

struct FlipSearch<'a> {
    c: &'a KnotComplex,
    r: &'a Resolved,
    candidates: Vec<Vec<usize>>,
    sigma: Vec<Option<usize>>,
    used: Vec<bool>,
    involutions_only: bool,
    limit: usize,
    found: Vec<Vec<usize>>,
}

impl FlipSearch<'_> {
    fn run(&mut self, g: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        let n = self.sigma.len();
        if g == n {
            let s: Vec<usize> = self.sigma.iter().map(|x| x.unwrap()).collect();
            if (0..n).all(|k| self.commutes_at(k, &s)) {
                self.found.push(s);
            }
            return;
        }
        if self.sigma[g].is_some() {
            self.run(g + 1);
            return;
        }
        for h in self.candidates[g].clone() {
            if self.used[h] {
                continue;
            }
            if self.involutions_only && h != g && (h < g || self.sigma[h].is_some()) {
                continue;
            }
            self.sigma[g] = Some(h);
            self.used[h] = true;
            let paired = self.involutions_only && h != g;
            if paired {
                self.sigma[h] = Some(g);
                self.used[g] = true;
            }
            if self.partial_ok() {
                self.run(g + 1);
            }
            if paired {
                self.sigma[h] = None;
                self.used[g] = false;
            }
            self.sigma[g] = None;
            self.used[h] = false;
        }
    }

    fn partial_ok(&self) -> bool {
        let n = self.sigma.len();
        (0..n).all(|k| {
            let ready = self.sigma[k].is_some()
                && self.r.diff[k].iter().all(|&(_, t)| self.sigma[t].is_some());
            if !ready {
                return true;
            }
            let s: Vec<usize> = self.sigma.iter().map(|x| x.unwrap_or(usize::MAX)).collect();
            self.commutes_at(k, &s)
        })
    }

    /// `∂Φ(g) = Φ∂(g)` for `Φ(g) = U^{-A(g)} σ(g)`.
    fn commutes_at(&self, g: usize, sigma: &[usize]) -> bool {
        let a = |k: usize| self.c.generators[k].alexander;
        let mut diff: BTreeMap<(i64, usize), bool> = BTreeMap::new();
        for &(m, w) in &self.r.diff[sigma[g]] {
            *diff.entry((m - a(g), w)).or_default() ^= true;
        }
        for &(n, t) in &self.r.diff[g] {
            *diff.entry((n - a(t), sigma[t])).or_default() ^= true;
        }
        diff.values().all(|odd| !odd)
    }
}

/// Finds a generator involution realizing the flip and returns `c` with
/// it attached.
pub fn derive_flip(c: &KnotComplex) -> Result<KnotComplex, CfkError> {
    let mut base = c.clone();
    base.flip = None;
    let report = validate(&base);
    if !report.is_valid() {
        return Err(CfkError::Invalid(report));
    }
    let sigma = enumerate_flips(&base, true, 1)
        .pop()
        .ok_or(CfkError::NoFlipFound)?;
    base.flip = Some(flip_from_permutation(&base, &sigma));
    debug_assert!(validate(&base).is_valid());
    Ok(base)
}

/// Plane elements with `i_min <= i <= i_max` and the differential induced on
/// them (terms leaving the window are dropped).
#[derive(Debug, Clone)]
pub struct Window {
    pub elements: Vec<PlaneElement>,
    pub differential: F2Matrix,
}

pub fn lattice_window(c: &KnotComplex, i_min: i64, i_max: i64) -> Window {
    assert!(i_min <= i_max, "empty window");
    let mut order: Vec<usize> = (0..c.generators.len()).collect();
    order.sort_by(|&x, &y| c.generators[x].name.cmp(&c.generators[y].name));
    let elements: Vec<PlaneElement> = order
        .iter()
        .flat_map(|&g| (i_min..=i_max).map(move |i| PlaneElement::new(g, i)))
        .collect();
    let differential = induced_differential(c, &elements);
    Window {
        elements,
        differential,
    }
}

/// The differential on the span of `basis`, dropping terms outside it.
pub(crate) fn induced_differential(c: &KnotComplex, basis: &[PlaneElement]) -> F2Matrix {
    let r = c.resolve();
    let index: HashMap<PlaneElement, usize> =
        basis.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let mut d = F2Matrix::zeros(basis.len(), basis.len());
    for (col, &x) in basis.iter().enumerate() {
        for y in c.boundary_terms(&r, x) {
            if let Some(&row) = index.get(&y) {
                d.toggle(row, col);
            }
        }
    }
    d
}

/// Canonical example complexes.
pub mod fixtures {
    use super::KnotComplex;

    /// The unknot in S³.
    pub fn unknot() -> KnotComplex {
        KnotComplex::new("0").gen("a", 0, 0)
    }

    /// The right-handed trefoil: a staircase `∂b = U·a + c`.
    pub fn trefoil() -> KnotComplex {
        KnotComplex::new("0")
            .gen("a", 1, 0)
            .gen("b", 0, -1)
            .gen("c", -1, -2)
            .d("b", 1, "a")
            .d("b", 0, "c")
    }

    /// The left-handed trefoil.
    pub fn trefoil_mirror() -> KnotComplex {
        KnotComplex::new("0")
            .gen("x", 1, 2)
            .gen("y", 0, 1)
            .gen("z", -1, 0)
            .d("x", 0, "y")
            .d("z", 1, "y")
    }

    /// An unknot in a homology sphere with `HF_red = F` in grading -1.
    pub fn y1sigma() -> KnotComplex {
        KnotComplex::new("0")
            .gen("x", 0, 0)
            .gen("y", 0, -1)
            .gen("z", 0, 0)
            .d("y", 1, "z")
    }

    /// The figure-eight knot: an acyclic box plus one generator.
    pub fn figure8() -> KnotComplex {
        KnotComplex::new("0")
            .gen("a", 0, 0)
            .gen("b", 1, 1)
            .gen("c", -1, -1)
            .gen("d", 0, 0)
            .gen("x", 0, 0)
            .d("a", 1, "b")
            .d("a", 0, "c")
            .d("b", 0, "d")
            .d("c", 1, "d")
    }

    /// Every fixture with its name.
    pub fn all() -> Vec<(&'static str, KnotComplex)> {
        vec![
            ("unknot", unknot()),
            ("trefoil", trefoil()),
            ("trefoil_l", trefoil_mirror()),
            ("y1sigma", y1sigma()),
            ("figure8", figure8()),
        ]
    }
}
