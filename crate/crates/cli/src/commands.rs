use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::process::ExitCode;
use std::str::FromStr;

use serde_json::json;

use hfzero::cfk::{validate, CfkError};
use hfzero::cone::{cone_homology_hat, cone_homology_plus_truncated, flip_choices, ConeError};
use hfzero::detect::{
    self, alexander_polynomial, check_prop_0surgery, prop_red1_obstruction, sphere_obstruction,
    theorem1_verdict, DetectError, SurgeryOutcome, Verdict, Witness,
};
use hfzero::format::{parse, parse_unvalidated, FormatError, InputDocument, NamedComplex};
use hfzero::subquotient::{hf_red_graded, SubquotientError, Truncation};
use hfzero::twisted::twisted_homology_laurent;
use hfzero::{Grading, KnotComplex};

use crate::output::{graded, record, table, Mode};

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Io(String, std::io::Error),
    Format(String, FormatError),
    Compute(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) | Failure::Compute(msg) => f.write_str(msg),
            Failure::Io(path, e) => write!(f, "{path}: {e}"),
            Failure::Format(path, e) => write!(f, "{path}: {e}"),
        }
    }
}

macro_rules! compute_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Compute(e.to_string())
            }
        }
    )*};
}

compute_error!(CfkError, ConeError, DetectError, SubquotientError);

pub type Outcome = Result<ExitCode, Failure>;

/// An inclusive range `a..b`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SRange {
    pub lo: i64,
    pub hi: i64,
}

impl FromStr for SRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected `a..b` or an integer, got {s:?}");
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (a.trim().parse(), b.trim().parse()),
            None => (s.trim().parse(), s.trim().parse()),
        };
        let (lo, hi) = (lo.map_err(|_| bad())?, hi.map_err(|_| bad())?);
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(SRange { lo, hi })
    }
}

/// `grading:count,...`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedMap(pub BTreeMap<Grading, usize>);

impl FromStr for RedMap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut m = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (g, n) = part
                .rsplit_once(':')
                .ok_or_else(|| format!("expected `grading:count`, got {part:?}"))?;
            let g: Grading = g.trim().parse().map_err(|e| format!("{part:?}: {e}"))?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| format!("{part:?}: bad count"))?;
            if m.insert(g, n).is_some() {
                return Err(format!("grading {g} listed twice"));
            }
        }
        Ok(RedMap(m))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.display().to_string(), e))
}

fn load(path: &Path) -> Result<InputDocument, Failure> {
    parse(&read(path)?).map_err(|e| Failure::Format(path.display().to_string(), e))
}

fn context(n: &NamedComplex) -> serde_json::Value {
    json!({ "id": n.id, "spinc": n.complex.spinc })
}

fn heading(n: &NamedComplex) -> String {
    format!("{} (spinc {})", n.id, n.complex.spinc)
}

fn s_values(c: &KnotComplex, s: Option<SRange>) -> std::ops::RangeInclusive<i64> {
    match s {
        Some(r) => r.lo..=r.hi,
        None => -c.a_max()..=c.a_max(),
    }
}

fn flipped(n: &NamedComplex) -> Result<KnotComplex, Failure> {
    n.complex
        .with_flip()
        .map_err(|e| Failure::Compute(format!("{}: {e}", n.id)))
}

pub fn check(mode: Mode, files: &[std::path::PathBuf]) -> Outcome {
    let mut all_valid = true;
    for path in files {
        let doc = parse_unvalidated(&read(path)?)
            .map_err(|e| Failure::Format(path.display().to_string(), e))?;
        for n in &doc.complexes {
            let report = validate(&n.complex);
            let flip = if !report.is_valid() {
                "-"
            } else if n.complex.flip.is_some() {
                "given"
            } else if n.complex.with_flip().is_ok() {
                "derived"
            } else {
                "none found"
            };
            let moving = match flip {
                "derived" => flip_choices(&n.complex, 50).map_or(0, |f| f.nontrivial),
                _ => 0,
            };
            all_valid &= report.is_valid();
            let violations: Vec<String> =
                report.violations.iter().map(ToString::to_string).collect();
            match mode {
                Mode::Machine => record(
                    "check",
                    json!({ "file": path.display().to_string(), "id": n.id, "spinc": n.complex.spinc }),
                    &json!({
                        "valid": report.is_valid(),
                        "generators": n.complex.generators.len(),
                        "flip": flip,
                        "flips_moving_homology": moving,
                        "violations": violations,
                    }),
                ),
                Mode::Human => {
                    if report.is_valid() {
                        let k = n.complex.generators.len();
                        let plural = if k == 1 { "" } else { "s" };
                        println!("{}: valid, {k} generator{plural}, flip {flip}", heading(n));
                        if moving > 0 {
                            println!(
                                "  warning: {moving} other valid flip(s) act nontrivially on H(B-hat); results may depend on the choice"
                            );
                        }
                    } else {
                        println!("{}: invalid", heading(n));
                        for v in &violations {
                            println!("  {v}");
                        }
                    }
                }
            }
        }
    }
    Ok(if all_valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

pub fn cone_hat(mode: Mode, path: &Path, s: Option<SRange>) -> Outcome {
    let doc = load(path)?;
    for n in &doc.complexes {
        let c = flipped(n)?;
        let results = s_values(&c, s)
            .map(|s| cone_homology_hat(&c, s))
            .collect::<Result<Vec<_>, _>>()?;
        match mode {
            Mode::Machine => {
                for r in &results {
                    record("cone", context(n), r);
                }
            }
            Mode::Human => {
                println!("{}", heading(n));
                let rows: Vec<Vec<String>> = results
                    .iter()
                    .map(|r| {
                        [r.s, r.total_dim as i64, r.dim_a as i64, r.dim_b as i64]
                            .iter()
                            .chain(&[r.rank_v as i64, r.rank_h as i64, r.rank_v_plus_h as i64])
                            .map(ToString::to_string)
                            .collect()
                    })
                    .collect();
                println!(
                    "{}",
                    table(
                        &["s", "dim", "dim H(A)", "dim H(B)", "rank v", "rank h", "rank v+h"],
                        &rows
                    )
                );
                for r in &results {
                    if let Some(g) = &r.graded_dims {
                        println!("graded at s = {}: {}", r.s, graded(g));
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn cone_twisted(mode: Mode, path: &Path, s: Option<SRange>) -> Outcome {
    let doc = load(path)?;
    for n in &doc.complexes {
        let c = flipped(n)?;
        let results = s_values(&c, s)
            .map(|s| twisted_homology_laurent(&c, s))
            .collect::<Result<Vec<_>, _>>()?;
        match mode {
            Mode::Machine => {
                for r in &results {
                    record("cone-twisted", context(n), r);
                }
            }
            Mode::Human => {
                println!("{}", heading(n));
                let rows: Vec<Vec<String>> = results
                    .iter()
                    .map(|r| {
                        let torsion: Vec<String> =
                            r.torsion_factors.iter().map(|p| format!("({p})")).collect();
                        vec![
                            r.s.to_string(),
                            r.novikov_dim.to_string(),
                            r.laurent_free_rank.to_string(),
                            if torsion.is_empty() {
                                "-".into()
                            } else {
                                torsion.join(" ")
                            },
                        ]
                    })
                    .collect();
                println!(
                    "{}",
                    table(&["s", "Novikov dim", "free rank", "torsion"], &rows)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn cone_plus(mode: Mode, path: &Path, s: Option<SRange>, truncation: Truncation) -> Outcome {
    let doc = load(path)?;
    for n in &doc.complexes {
        let c = flipped(n)?;
        let results = s_values(&c, s)
            .map(|s| cone_homology_plus_truncated(&c, s, truncation))
            .collect::<Result<Vec<_>, _>>()?;
        match mode {
            Mode::Machine => {
                for r in &results {
                    record("cone-plus", context(n), r);
                }
            }
            Mode::Human => {
                println!("{}", heading(n));
                let rows: Vec<Vec<String>> = results
                    .iter()
                    .map(|r| {
                        vec![
                            r.s.to_string(),
                            r.truncation.to_string(),
                            r.tower_count.to_string(),
                            r.reduced_dim.to_string(),
                        ]
                    })
                    .collect();
                println!("{}", table(&["s", "N", "towers", "reduced"], &rows));
                for r in &results {
                    if let Some(g) = &r.graded {
                        println!(
                            "graded at s = {}: reduced {}; tower bottoms {}",
                            r.s,
                            graded(&g.reduced),
                            graded(&g.tower_bottoms)
                        );
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn genus(mode: Mode, path: &Path) -> Outcome {
    let cs = load(path)?.knot_complexes();
    let g = detect::genus(&cs)?;
    let a_max = cs.iter().map(KnotComplex::a_max).max().unwrap_or(0);
    match mode {
        Mode::Machine => record("genus", json!({}), &json!({ "genus": g, "a_max": a_max })),
        Mode::Human => println!("genus {g} (scanned s = 0..={a_max})"),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn alex(mode: Mode, path: &Path) -> Outcome {
    let doc = load(path)?;
    for n in &doc.complexes {
        let a = alexander_polynomial(&n.complex);
        match mode {
            Mode::Machine => record("alex", context(n), &a),
            Mode::Human => println!(
                "{}: {} ({})",
                heading(n),
                a.polynomial,
                if a.trivial_mod_2 {
                    "trivial mod 2"
                } else {
                    "nontrivial"
                }
            ),
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn red(mode: Mode, path: &Path, truncation: Truncation) -> Outcome {
    let doc = load(path)?;
    for n in &doc.complexes {
        let r = hf_red_graded(&n.complex, truncation)?;
        match mode {
            Mode::Machine => record("red", context(n), &r),
            Mode::Human => println!(
                "{}: HF_red {} (N = {})",
                heading(n),
                graded(&r.dims),
                r.truncation
            ),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn describe(w: &Witness) -> String {
    match w {
        Witness::TwistedScan {
            a_max,
            covered,
            nonzero,
        } => {
            let scope = format!("|s| <= {a_max}, spinc {}", covered.join(", "));
            match nonzero {
                Some(h) => format!(
                    "spinc {} s = {}: Novikov dim {} ({scope})",
                    h.spinc, h.s, h.novikov_dim
                ),
                None => format!("all Novikov dims vanish ({scope})"),
            }
        }
        Witness::Dimensions { dim_y, dim_n, .. } => {
            format!("dim HF-hat(Y) = {dim_y}, dim HF-hat(N) = {dim_n}")
        }
        Witness::ReducedGrading { grading } => match grading {
            Some(g) => format!("HF_red is F in grading {g}"),
            None => "no grading with HF_red = F".into(),
        },
        Witness::SurgeryConditions {
            a_max,
            covered,
            failure,
        } => {
            let scope = format!("|s| <= {a_max}, spinc {}", covered.join(", "));
            match failure {
                Some(f) => format!(
                    "{} at spinc {} s = {}: observed {}, needs {} ({scope})",
                    f.clause, f.spinc, f.s, f.observed, f.expected
                ),
                None => format!("all clauses hold ({scope})"),
            }
        }
    }
}

fn print_verdict(mode: Mode, command: &str, v: &Verdict) {
    match mode {
        Mode::Machine => record(command, json!({}), v),
        Mode::Human => {
            println!("{}: {}", v.kind, v.statement);
            if let Some(w) = &v.witness {
                println!("  witness: {}", describe(w));
            }
        }
    }
}

pub fn detect_sphere(mode: Mode, path: &Path) -> Outcome {
    let v = sphere_obstruction(&load(path)?.knot_complexes())?;
    print_verdict(mode, "detect-sphere", &v);
    Ok(ExitCode::SUCCESS)
}

pub fn prop0check(mode: Mode, path: &Path) -> Outcome {
    let v = check_prop_0surgery(&load(path)?.knot_complexes())?;
    print_verdict(mode, "prop0check", &v);
    Ok(ExitCode::SUCCESS)
}

pub fn verdict(mode: Mode, dim_y: usize, dim_n: usize) -> Outcome {
    let v = theorem1_verdict(dim_y, dim_n).map_err(|e| Failure::Input(e.to_string()))?;
    print_verdict(mode, "verdict", &v);
    let impossible = matches!(
        v.witness,
        Some(Witness::Dimensions {
            outcome: SurgeryOutcome::Impossible,
            ..
        })
    );
    Ok(if impossible {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

pub fn red1(
    mode: Mode,
    from_file: Option<&Path>,
    red: Option<RedMap>,
    homology_sphere: bool,
    truncation: Truncation,
) -> Outcome {
    if !homology_sphere {
        return Err(Failure::Input(DetectError::NotHomologySphere.to_string()));
    }
    let dims = match (from_file, red) {
        (_, Some(RedMap(m))) => m,
        (Some(path), None) => {
            let doc = load(path)?;
            hf_red_graded(&doc.complexes[0].complex, truncation)?.dims
        }
        (None, None) => return Err(Failure::Input("give --from-file or --red".into())),
    };
    let v = prop_red1_obstruction(&dims, homology_sphere)?;
    print_verdict(mode, "red1", &v);
    Ok(ExitCode::SUCCESS)
}
