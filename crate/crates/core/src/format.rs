//! The line-oriented `.cfk` input format.
//!
//! ```text
//! # trefoil
//! complex T spinc=0
//! gen a A=1 M=0
//! gen b A=0 M=-1
//! gen c A=-1 M=-2
//! d b : U^1 a, U^0 c
//! end
//! ```
//!
//! `flip` lines use the same shape as `d` lines. Comments start with `#`.
//! Comment lines before the first block are kept as metadata; the rest are
//! dropped.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::cfk::{validate, DiffTerm, FlipTerm, Generator, KnotComplex, ValidationReport};
use crate::grading::Grading;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("complex {complex}: {report}")]
    Validation {
        complex: String,
        report: ValidationReport,
    },
    #[error("line {line}: {what} {name} used twice")]
    DuplicateName {
        line: usize,
        what: &'static str,
        name: String,
    },
    #[error("document contains no complexes")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedComplex {
    pub id: String,
    pub complex: KnotComplex,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InputDocument {
    /// Leading comment lines, without the `#`.
    pub comments: Vec<String>,
    pub complexes: Vec<NamedComplex>,
}

impl InputDocument {
    pub fn knot_complexes(&self) -> Vec<KnotComplex> {
        self.complexes.iter().map(|n| n.complex.clone()).collect()
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// `U^<n> <name>, ...`
fn parse_terms(line: usize, text: &str) -> Result<Vec<(i64, String)>, FormatError> {
    text.split(',')
        .map(|t| {
            let parts: Vec<&str> = t.split_whitespace().collect();
            let [power, target] = parts[..] else {
                return Err(syntax(line, format!("expected `U^<n> <name>`, got {:?}", t.trim())));
            };
            let n = power
                .strip_prefix("U^")
                .and_then(|n| n.parse::<i64>().ok())
                .ok_or_else(|| syntax(line, format!("bad U power {power:?}")))?;
            Ok((n, target.to_string()))
        })
        .collect()
}

fn parse_gen(line: usize, rest: &[&str]) -> Result<Generator, FormatError> {
    let [name, a, m] = rest else {
        return Err(syntax(line, "expected `gen <name> A=<int> M=<grading>`"));
    };
    let alexander = a
        .strip_prefix("A=")
        .and_then(|v| v.parse::<i64>().ok())
        .ok_or_else(|| syntax(line, format!("bad Alexander grading {a:?}")))?;
    let maslov = m
        .strip_prefix("M=")
        .and_then(|v| v.parse::<Grading>().ok())
        .ok_or_else(|| syntax(line, format!("bad Maslov grading {m:?}")))?;
    Ok(Generator {
        name: name.to_string(),
        alexander,
        maslov,
    })
}

struct Open {
    id: String,
    line: usize,
    complex: KnotComplex,
}

/// Parses without validating the complexes.
pub fn parse_unvalidated(text: &str) -> Result<InputDocument, FormatError> {
    let mut doc = InputDocument::default();
    let mut open: Option<Open> = None;
    let mut ids = HashSet::new();
    let mut labels = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if open.is_none() && doc.complexes.is_empty() {
                doc.comments.push(comment.to_string());
            }
            continue;
        }
        let content = trimmed.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        match (words[0], open.as_mut()) {
            ("complex", None) => {
                let [_, id, spinc] = words[..] else {
                    return Err(syntax(line, "expected `complex <id> spinc=<label>`"));
                };
                let label = spinc
                    .strip_prefix("spinc=")
                    .filter(|l| !l.is_empty())
                    .ok_or_else(|| syntax(line, "expected `spinc=<label>`"))?;
                if !ids.insert(id.to_string()) {
                    return Err(FormatError::DuplicateName {
                        line,
                        what: "complex id",
                        name: id.into(),
                    });
                }
                if !labels.insert(label.to_string()) {
                    return Err(FormatError::DuplicateName {
                        line,
                        what: "spinc label",
                        name: label.into(),
                    });
                }
                open = Some(Open {
                    id: id.into(),
                    line,
                    complex: KnotComplex::new(label),
                });
            }
            ("complex", Some(o)) => {
                return Err(syntax(line, format!("complex {} is not closed", o.id)));
            }
            ("end", Some(_)) if words.len() == 1 => {
                let o = open.take().expect("checked");
                doc.complexes.push(NamedComplex {
                    id: o.id,
                    complex: o.complex,
                });
            }
            ("gen", Some(o)) => o.complex.generators.push(parse_gen(line, &words[1..])?),
            (kind @ ("d" | "flip"), Some(o)) => {
                let rest = content[kind.len()..].trim_start();
                let (source, terms) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(line, format!("expected `{kind} <src> : ...`")))?;
                let source = source.trim();
                if source.is_empty() || source.contains(char::is_whitespace) {
                    return Err(syntax(line, format!("bad source {source:?}")));
                }
                for (u_power, target) in parse_terms(line, terms)? {
                    if kind == "d" {
                        o.complex.differential.push(DiffTerm {
                            source: source.into(),
                            target,
                            u_power,
                        });
                    } else {
                        o.complex.flip.get_or_insert_with(Vec::new).push(FlipTerm {
                            source: source.into(),
                            target,
                            u_power,
                        });
                    }
                }
            }
            (word, None) => {
                return Err(syntax(line, format!("{word:?} outside a complex block")));
            }
            (word, Some(_)) => return Err(syntax(line, format!("unknown directive {word:?}"))),
        }
    }
    if let Some(o) = open {
        return Err(syntax(o.line, format!("complex {} has no `end`", o.id)));
    }
    if doc.complexes.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(doc)
}

/// Parses and validates every complex.
pub fn parse(text: &str) -> Result<InputDocument, FormatError> {
    let doc = parse_unvalidated(text)?;
    for n in &doc.complexes {
        let report = validate(&n.complex);
        if !report.is_valid() {
            return Err(FormatError::Validation {
                complex: n.id.clone(),
                report,
            });
        }
    }
    Ok(doc)
}

fn write_terms<'a>(
    out: &mut String,
    kind: &str,
    terms: impl Iterator<Item = (&'a str, i64, &'a str)>,
) {
    let mut grouped: Vec<(&str, Vec<String>)> = Vec::new();
    for (source, u_power, target) in terms {
        let t = format!("U^{u_power} {target}");
        match grouped.iter_mut().find(|(s, _)| *s == source) {
            Some((_, ts)) => ts.push(t),
            None => grouped.push((source, vec![t])),
        }
    }
    for (source, ts) in grouped {
        let _ = writeln!(out, "{kind} {source} : {}", ts.join(", "));
    }
}

/// Canonical text: one `d` (and `flip`) line per source, sources in order
/// of first appearance.
pub fn serialize(doc: &InputDocument) -> String {
    let mut out = String::new();
    for c in &doc.comments {
        let _ = writeln!(out, "#{c}");
    }
    for (k, n) in doc.complexes.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let c = &n.complex;
        let _ = writeln!(out, "complex {} spinc={}", n.id, c.spinc);
        for g in &c.generators {
            let _ = writeln!(out, "gen {} A={} M={}", g.name, g.alexander, g.maslov);
        }
        write_terms(
            &mut out,
            "d",
            c.differential
                .iter()
                .map(|t| (t.source.as_str(), t.u_power, t.target.as_str())),
        );
        if let Some(flip) = &c.flip {
            write_terms(
                &mut out,
                "flip",
                flip.iter()
                    .map(|t| (t.source.as_str(), t.u_power, t.target.as_str())),
            );
        }
        out.push_str("end\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfk::fixtures;

    const TREFOIL: &str = "\
# right-handed trefoil
complex T spinc=0
gen a A=1 M=0
gen b A=0 M=-1
gen c A=-1 M=-2
d b : U^1 a, U^0 c
end
";

    #[test]
    fn trefoil_round_trip() {
        let doc = parse(TREFOIL).unwrap();
        assert_eq!(doc.comments, vec![" right-handed trefoil".to_string()]);
        assert_eq!(doc.complexes[0].complex, fixtures::trefoil());
        assert_eq!(serialize(&doc), TREFOIL);
    }

    #[test]
    fn unknot_block() {
        let doc = parse("complex U spinc=0\ngen a A=0 M=0\nend\n").unwrap();
        assert_eq!(doc.complexes.len(), 1);
        assert_eq!(doc.complexes[0].complex.generators.len(), 1);
    }

    #[test]
    fn rational_maslov_and_flip() {
        let text = "complex K spinc=1/2\ngen a A=0 M=-3/4\nflip a : U^0 a\nend\n";
        let doc = parse(text).unwrap();
        assert_eq!(doc.complexes[0].complex.generators[0].maslov, Grading::new(-3, 4));
        assert_eq!(serialize(&doc), text);
    }

    #[test]
    fn negative_power_is_rejected() {
        let text = "complex K spinc=0\ngen a A=0 M=0\ngen b A=0 M=1\nd b : U^-1 a\nend\n";
        assert!(matches!(parse(text), Err(FormatError::Validation { .. })));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let cases = [
            ("gen a A=0 M=0\n", 1),
            ("complex K spinc=0\ngen a A=x M=0\nend\n", 2),
            ("complex K spinc=0\ngen a A=0 M=0\nd a U^0 a\nend\n", 3),
            ("complex K spinc=0\ngen a A=0 M=0\nd a : V^0 a\nend\n", 3),
            ("complex K spinc=0\ngen a A=0 M=0\n", 1),
            ("complex K spinc=0\nfoo\nend\n", 2),
            ("complex K\nend\n", 1),
        ];
        for (text, line) in cases {
            match parse(text) {
                Err(FormatError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert_eq!(parse("# only a comment\n"), Err(FormatError::Empty));
    }

    #[test]
    fn duplicate_names() {
        let text = "complex K spinc=0\ngen a A=0 M=0\nend\ncomplex K spinc=1\ngen a A=0 M=0\nend\n";
        assert!(matches!(
            parse(text),
            Err(FormatError::DuplicateName { line: 4, .. })
        ));
        let text = "complex K spinc=0\ngen a A=0 M=0\nend\ncomplex L spinc=0\ngen a A=0 M=0\nend\n";
        assert!(matches!(parse(text), Err(FormatError::DuplicateName { .. })));
    }

    #[test]
    fn inline_comments_and_split_lines() {
        let text = "complex T spinc=0 # note\ngen a A=1 M=0\ngen b A=0 M=-1\ngen c A=-1 M=-2\n\
                    d b : U^1 a\n# inside\nd b : U^0 c\nend\n";
        let doc = parse(text).unwrap();
        assert_eq!(doc.complexes[0].complex, fixtures::trefoil());
        assert!(doc.comments.is_empty());
    }
}
