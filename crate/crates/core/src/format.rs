//! Line-oriented text formats for orders and representations.
//!
//! ```text
//! # comment
//! poset p
//! elements: a b c
//! relations: a<b b<c
//! ```
//!
//! ```text
//! rep r
//! elem a lower 0 1 upper 1/2 3/2
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Representation, Trapezoid};
use crate::poset::Poset;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosetFile {
    pub name: String,
    pub poset: Poset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepFile {
    pub name: String,
    pub rep: Representation,
}

/// Non-blank lines with comments stripped, numbered from 1.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &str,
) -> Result<(usize, String), FormatError> {
    let (n, l) = lines
        .next()
        .ok_or_else(|| err(1, format!("expected `{keyword} <name>`, found end of input")))?;
    let toks: Vec<&str> = l.split_whitespace().collect();
    match toks.as_slice() {
        [k, name] if *k == keyword => Ok((n, name.to_string())),
        _ => Err(err(n, format!("expected `{keyword} <name>`"))),
    }
}

pub fn parse_poset(text: &str) -> Result<PosetFile, FormatError> {
    let mut lines = records(text);
    let (hline, name) = header(&mut lines, "poset")?;
    let mut elements: Option<Vec<String>> = None;
    let mut relations: Vec<(String, String)> = Vec::new();
    let mut last = hline;
    for (n, l) in lines {
        last = n;
        if let Some(rest) = l.strip_prefix("elements:") {
            if elements.is_some() {
                return Err(err(n, "repeated `elements:` line"));
            }
            elements = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = l.strip_prefix("relations:") {
            if elements.is_none() {
                return Err(err(n, "`relations:` before `elements:`"));
            }
            for tok in rest.split_whitespace() {
                let (a, b) = tok
                    .split_once('<')
                    .filter(|(a, b)| !a.is_empty() && !b.is_empty() && !b.contains('<'))
                    .ok_or_else(|| err(n, format!("malformed relation `{tok}`, expected `a<b`")))?;
                relations.push((a.to_string(), b.to_string()));
            }
        } else {
            return Err(err(n, format!("unexpected record `{l}`")));
        }
    }
    let elements = elements.ok_or_else(|| err(last, "missing `elements:` line"))?;
    let poset = Poset::build(&elements, &relations).map_err(|e| err(last, e.to_string()))?;
    Ok(PosetFile { name, poset })
}

/// Canonical form: elements in stored order, cover relations only.
pub fn serialize_poset(name: &str, p: &Poset) -> String {
    let mut out = format!("poset {name}\nelements:");
    for id in p.ids() {
        write!(out, " {id}").unwrap();
    }
    out.push_str("\nrelations:");
    for (a, b) in p.covers() {
        write!(out, " {}<{}", p.id(a), p.id(b)).unwrap();
    }
    out.push('\n');
    out
}

pub fn parse_rep(text: &str) -> Result<RepFile, FormatError> {
    let mut lines = records(text);
    let (_, name) = header(&mut lines, "rep")?;
    let mut rep = Representation::new();
    for (n, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [kw, id, lo, l0, r0, up, l1, r1] = toks.as_slice() else {
            return Err(err(n, "expected `elem <id> lower <q> <q> upper <q> <q>`"));
        };
        if *kw != "elem" || *lo != "lower" || *up != "upper" {
            return Err(err(n, "expected `elem <id> lower <q> <q> upper <q> <q>`"));
        }
        let q = |s: &str| {
            s.parse::<Rational>()
                .map_err(|_| err(n, format!("malformed rational `{s}`")))
        };
        let t = Trapezoid::from_endpoints(q(l0)?, q(r0)?, q(l1)?, q(r1)?).map_err(|e| err(n, e.to_string()))?;
        if rep.get(id).is_some() {
            return Err(err(n, format!("duplicate element `{id}`")));
        }
        rep.insert(*id, t).map_err(|e| err(n, e.to_string()))?;
    }
    Ok(RepFile { name, rep })
}

/// Canonical form: elements sorted by id.
pub fn serialize_rep(name: &str, rep: &Representation) -> String {
    let mut out = format!("rep {name}\n");
    for (id, t) in rep.iter() {
        writeln!(
            out,
            "elem {id} lower {} {} upper {} {}",
            t.lower.left, t.lower.right, t.upper.left, t.upper.right
        )
        .unwrap();
    }
    out
}
