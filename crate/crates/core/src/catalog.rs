//! The named example orders, their load-time checks, and the scripted
//! verification of the claims made about each.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::classify::{is_interval_order, Class, ClassSet};
use crate::format::{parse_poset, FormatError};
use crate::geometry::Representation;
use crate::lp::Relation::{Le, Lt};
use crate::oracle::{
    exists_representation, holds_in_all, EndpointFormula, Existence, Layout, PropertyQuery, SearchOptions,
    Validity,
};
use crate::poset::Poset;
use crate::Property;

pub const NAMES: [&str; 5] = ["twotwo", "jaw", "nonparallel", "pput", "uglymess"];

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "twotwo" => include_str!("../data/twotwo.poset"),
        "jaw" => include_str!("../data/jaw.poset"),
        "nonparallel" => include_str!("../data/nonparallel.poset"),
        "pput" => include_str!("../data/pput.poset"),
        "uglymess" => include_str!("../data/uglymess.poset"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("no catalog entry `{0}`")]
    Unknown(String),
    #[error("catalog entry `{entry}`: {source}")]
    Format { entry: String, source: FormatError },
    #[error("catalog entry `{entry}`: assertion failed: {assertion}")]
    Assertion { entry: String, assertion: String },
}

/// Roles of the jaw order, in the order `B C D E F G 1 2 3`.
pub const JAW_ROLES: [&str; 9] = ["B", "C", "D", "E", "F", "G", "1", "2", "3"];

/// Element ids playing the jaw roles `B C D E F G 1 2 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JawCopy<'a>(pub [&'a str; 9]);

impl<'a> JawCopy<'a> {
    pub const IDENTITY: JawCopy<'static> = JawCopy(JAW_ROLES);

    fn role(&self, r: &str) -> &'a str {
        let k = JAW_ROLES.iter().position(|&x| x == r).expect("jaw role");
        self.0[k]
    }

    pub fn ids(&self) -> Vec<&'a str> {
        self.0.to_vec()
    }

    /// The forced endpoint relations: the long chain on one baseline and
    /// the short chain around the middle element on the other, for either
    /// choice of baseline.
    pub fn formula(&self, lay: &Layout) -> EndpointFormula {
        let side = |upper: bool| {
            let (lo, hi, olo, ohi) = if upper {
                (Layout::big_l as fn(&Layout, &str) -> usize, Layout::big_r as fn(&Layout, &str) -> usize, Layout::l as fn(&Layout, &str) -> usize, Layout::r as fn(&Layout, &str) -> usize)
            } else {
                (Layout::l as fn(&Layout, &str) -> usize, Layout::r as fn(&Layout, &str) -> usize, Layout::big_l as fn(&Layout, &str) -> usize, Layout::big_r as fn(&Layout, &str) -> usize)
            };
            let lo = |r: &str| lo(lay, self.role(r));
            let hi = |r: &str| hi(lay, self.role(r));
            let olo = |r: &str| olo(lay, self.role(r));
            let ohi = |r: &str| ohi(lay, self.role(r));
            EndpointFormula::And(vec![
                EndpointFormula::chain(
                    hi("B"),
                    &[
                        (Lt, lo("C")),
                        (Le, hi("1")),
                        (Lt, lo("2")),
                        (Le, hi("E")),
                        (Lt, lo("D")),
                        (Le, hi("2")),
                        (Lt, lo("3")),
                        (Le, hi("F")),
                        (Lt, lo("G")),
                    ],
                ),
                EndpointFormula::chain(ohi("E"), &[(Lt, olo("2")), (Le, ohi("2")), (Lt, olo("D"))]),
            ])
        };
        EndpointFormula::Or(vec![side(false), side(true)])
    }
}

/// `inner` strictly inside `outer` on at least one baseline.
pub fn strictly_inside_on_some_baseline(lay: &Layout, inner: &str, outer: &str) -> EndpointFormula {
    EndpointFormula::Or(vec![
        EndpointFormula::And(vec![
            EndpointFormula::lt(lay.l(outer), lay.l(inner)),
            EndpointFormula::lt(lay.r(inner), lay.r(outer)),
        ]),
        EndpointFormula::And(vec![
            EndpointFormula::lt(lay.big_l(outer), lay.big_l(inner)),
            EndpointFormula::lt(lay.big_r(inner), lay.big_r(outer)),
        ]),
    ])
}

/// `inner` strictly inside `outer` on one baseline while `outer` is
/// strictly inside `inner` on the other.
pub fn crossed_containment(lay: &Layout, inner: &str, outer: &str) -> EndpointFormula {
    let lower_in = EndpointFormula::And(vec![
        EndpointFormula::lt(lay.l(outer), lay.l(inner)),
        EndpointFormula::lt(lay.r(inner), lay.r(outer)),
    ]);
    let upper_out = EndpointFormula::And(vec![
        EndpointFormula::lt(lay.big_l(inner), lay.big_l(outer)),
        EndpointFormula::lt(lay.big_r(outer), lay.big_r(inner)),
    ]);
    let upper_in = EndpointFormula::And(vec![
        EndpointFormula::lt(lay.big_l(outer), lay.big_l(inner)),
        EndpointFormula::lt(lay.big_r(inner), lay.big_r(outer)),
    ]);
    let lower_out = EndpointFormula::And(vec![
        EndpointFormula::lt(lay.l(inner), lay.l(outer)),
        EndpointFormula::lt(lay.r(outer), lay.r(inner)),
    ]);
    EndpointFormula::Or(vec![
        EndpointFormula::And(vec![lower_in, upper_out]),
        EndpointFormula::And(vec![upper_in, lower_out]),
    ])
}

/// A named example order with its checked facts.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    /// Provenance comment lines of the data file.
    pub provenance: Vec<String>,
    pub poset: Poset,
    /// Load-time assertions, all of which passed.
    pub assertions: Vec<String>,
    /// Expected class facts: `(class, member?)`.
    pub expected: Vec<(Class, bool)>,
}

impl CatalogEntry {
    /// Whether `cs` agrees with every expected fact it resolves.
    pub fn consistent_with(&self, cs: &ClassSet) -> bool {
        self.expected.iter().all(|&(c, m)| {
            if m {
                !cs.excludes(c)
            } else {
                !cs.contains(c)
            }
        })
    }
}

struct Checker<'a> {
    entry: &'a str,
    p: &'a Poset,
    passed: Vec<String>,
}

impl Checker<'_> {
    fn check(&mut self, label: impl Into<String>, ok: bool) -> Result<(), CatalogError> {
        let label = label.into();
        if ok {
            self.passed.push(label);
            Ok(())
        } else {
            Err(CatalogError::Assertion {
                entry: self.entry.to_string(),
                assertion: label,
            })
        }
    }

    fn ground(&mut self, ids: &[&str]) -> Result<(), CatalogError> {
        let mut want: Vec<&str> = ids.to_vec();
        want.sort();
        let mut got: Vec<&str> = self.p.ids().iter().map(String::as_str).collect();
        got.sort();
        self.check(format!("ground set is {{{}}}", ids.join(",")), got == want)
    }

    fn less(&mut self, a: &str, b: &str) -> Result<(), CatalogError> {
        self.check(format!("{a} < {b}"), self.p.less(a, b))
    }

    fn parallel(&mut self, a: &str, b: &str) -> Result<(), CatalogError> {
        self.check(format!("{a} || {b}"), self.p.parallel(a, b))
    }

    fn jaw_copy(&mut self, jaw: &Poset, copy: JawCopy) -> Result<(), CatalogError> {
        let label = format!("restriction to {{{}}} is a copy of the jaw order", copy.ids().join(","));
        let ok = self
            .p
            .restriction(&copy.ids())
            .map(|r| {
                let renamed = r.renamed(|id| JAW_ROLES[copy.0.iter().position(|&x| x == id).expect("member")].to_string());
                renamed.map(|q| q == *jaw).unwrap_or(false)
            })
            .unwrap_or(false);
        self.check(label, ok)
    }
}

fn parse_entry(name: &str) -> Result<(Vec<String>, Poset), CatalogError> {
    let text = source(name).ok_or_else(|| CatalogError::Unknown(name.to_string()))?;
    let file = parse_poset(text).map_err(|e| CatalogError::Format {
        entry: name.to_string(),
        source: e,
    })?;
    let provenance = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim().to_string())
        .collect();
    Ok((provenance, file.poset))
}

/// The role map of the jaw copy inside the proper-parallelogram example.
pub const PPUT_JAW: JawCopy<'static> = JawCopy(["b", "c", "h", "a", "f", "g", "2", "3", "4"]);
/// The three jaw copies inside the non-proper-parallelogram example.
pub const UGLY_JAWS: [JawCopy<'static>; 3] = [
    JawCopy(["f", "c", "i", "a", "d", "g", "1", "2", "3"]),
    JawCopy(["f", "c", "i", "b", "d", "g", "1", "2", "3"]),
    JawCopy(["f", "c", "h", "a", "d", "g", "1", "2", "3"]),
];

pub fn catalog_load(name: &str) -> Result<CatalogEntry, CatalogError> {
    let (provenance, poset) = parse_entry(name)?;
    let mut ck = Checker {
        entry: name,
        p: &poset,
        passed: Vec::new(),
    };
    let expected: Vec<(Class, bool)>;
    match name {
        "twotwo" => {
            let two = Poset::chain(&["a", "b"]);
            ck.check("isomorphic to two disjoint 2-chains", poset.is_isomorphic(&two.disjoint_union(&two)))?;
            expected = vec![(Class::UPgram, true), (Class::Interval, false)];
        }
        "jaw" => {
            ck.ground(&JAW_ROLES)?;
            ck.less("1", "2")?;
            ck.less("2", "3")?;
            expected = vec![(Class::Trap, true)];
        }
        "nonparallel" => {
            let jaw = parse_entry("jaw")?.1;
            let mut ids = JAW_ROLES.to_vec();
            ids.push("N");
            ck.ground(&ids)?;
            ck.jaw_copy(&jaw, JawCopy::IDENTITY)?;
            ck.parallel("N", "1")?;
            ck.parallel("N", "3")?;
            ck.less("1", "2")?;
            ck.less("2", "3")?;
            // N between the teeth
            ck.less("E", "N")?;
            ck.less("N", "D")?;
            expected = vec![(Class::UTrap, true), (Class::Pgram, false)];
        }
        "pput" => {
            let jaw = parse_entry("jaw")?.1;
            ck.ground(&["a", "b", "c", "d", "e", "f", "g", "h", "1", "2", "3", "4", "x"])?;
            ck.jaw_copy(&jaw, PPUT_JAW)?;
            ck.less("a", "x")?;
            ck.less("x", "h")?;
            ck.parallel("x", "3")?;
            expected = vec![(Class::PPgram, true), (Class::UTrap, true), (Class::UPgram, false)];
        }
        "uglymess" => {
            let jaw = parse_entry("jaw")?.1;
            ck.ground(&["1", "2", "3", "a", "b", "c", "d", "e", "f", "g", "h", "i", "x", "y"])?;
            for copy in UGLY_JAWS {
                ck.jaw_copy(&jaw, copy)?;
            }
            ck.less("a", "x")?;
            ck.less("x", "h")?;
            ck.less("b", "y")?;
            ck.less("y", "i")?;
            ck.less("e", "f")?;
            ck.less("e", "y")?;
            ck.parallel("x", "y")?;
            ck.parallel("b", "h")?;
            ck.parallel("x", "1")?;
            expected = vec![(Class::UTrap, true), (Class::Pgram, true), (Class::PPgram, false)];
        }
        _ => return Err(CatalogError::Unknown(name.to_string())),
    }
    let assertions = ck.passed;
    Ok(CatalogEntry {
        name: name.to_string(),
        provenance,
        poset,
        assertions,
        expected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Timeout,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Timeout => "TIMEOUT",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub label: String,
    pub expected: String,
    pub got: String,
    pub verdict: Verdict,
    pub elapsed: Duration,
    pub witness: Option<Representation>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub entry: String,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }

    pub fn any_timeout(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Timeout)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.checks.iter().map(|c| c.label.len()).max().unwrap_or(0);
        for c in &self.checks {
            writeln!(
                f,
                "{:<12} {:<w$}  expected {:<9} got {:<9} {:<7} {:>10.3} ms",
                self.entry,
                c.label,
                c.expected,
                c.got,
                c.verdict,
                c.elapsed.as_secs_f64() * 1e3,
            )?;
        }
        Ok(())
    }
}

/// Which scripted checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Every check.
    All,
    /// Skip the slow negative queries on the 13- and 14-element orders.
    SkipExtended,
}

fn exists_check(p: &Poset, props: &[Property], want_found: bool, budget: Option<Duration>) -> CheckResult {
    let q = PropertyQuery::of(props);
    let start = Instant::now();
    let out = exists_representation(
        p,
        q,
        &SearchOptions {
            budget,
            ..Default::default()
        },
    );
    let elapsed = start.elapsed();
    let verdict = match (&out, want_found) {
        (Existence::Timeout(_), _) => Verdict::Timeout,
        (Existence::Found(_), true) | (Existence::NotExist, false) => Verdict::Pass,
        _ => Verdict::Fail,
    };
    CheckResult {
        label: format!("exists {{{q}}}"),
        expected: if want_found { "Found" } else { "NotExist" }.to_string(),
        got: out.label().to_string(),
        verdict,
        elapsed,
        witness: match out {
            Existence::Found(w) => Some(w),
            _ => None,
        },
    }
}

fn valid_check(label: &str, p: &Poset, phi: &EndpointFormula, budget: Option<Duration>) -> CheckResult {
    let start = Instant::now();
    let out = holds_in_all(
        p,
        PropertyQuery::trapezoid(),
        phi,
        &SearchOptions {
            budget,
            ..Default::default()
        },
    );
    let elapsed = start.elapsed();
    let (got, verdict, witness) = match out {
        Validity::Valid => ("Valid", Verdict::Pass, None),
        Validity::CounterRep(w) => ("CounterRep", Verdict::Fail, Some(w)),
        Validity::Timeout(_) => ("Timeout", Verdict::Timeout, None),
    };
    CheckResult {
        label: format!("in every representation: {label}"),
        expected: "Valid".into(),
        got: got.into(),
        verdict,
        elapsed,
        witness,
    }
}

/// Runs the entry's scripted claims. Each check gets the full budget.
pub fn verify_paper(entry: &CatalogEntry, budget: Option<Duration>, scope: Scope) -> Report {
    use Property::*;
    let p = &entry.poset;
    let lay = Layout::new(p);
    let extended = scope == Scope::All;
    let mut checks = Vec::new();
    match entry.name.as_str() {
        "twotwo" => {
            checks.push(exists_check(p, &[Unit, Parallelogram], true, budget));
            let interval = is_interval_order(p);
            checks.push(CheckResult {
                label: "is an interval order".into(),
                expected: "false".into(),
                got: interval.to_string(),
                verdict: if interval { Verdict::Fail } else { Verdict::Pass },
                elapsed: Duration::ZERO,
                witness: None,
            });
        }
        "jaw" => {
            checks.push(exists_check(p, &[], true, budget));
            checks.push(valid_check("jaw endpoint chains", p, &JawCopy::IDENTITY.formula(&lay), budget));
        }
        "nonparallel" => {
            checks.push(exists_check(p, &[Unit], true, budget));
            checks.push(exists_check(p, &[Parallelogram], false, budget));
            checks.push(valid_check(
                "N inside 2 on one baseline, containing 2 on the other",
                p,
                &crossed_containment(&lay, "N", "2"),
                budget,
            ));
        }
        "pput" => {
            checks.push(exists_check(p, &[Proper, Parallelogram], true, budget));
            checks.push(exists_check(p, &[Unit], true, budget));
            checks.push(valid_check(
                "x strictly inside 3 on some baseline",
                p,
                &strictly_inside_on_some_baseline(&lay, "x", "3"),
                budget,
            ));
            if extended {
                checks.push(exists_check(p, &[Unit, Parallelogram], false, budget));
            }
        }
        "uglymess" => {
            checks.push(exists_check(p, &[Unit], true, budget));
            checks.push(exists_check(p, &[Parallelogram], true, budget));
            if extended {
                checks.push(exists_check(p, &[Proper, Parallelogram], false, budget));
            }
        }
        _ => {}
    }
    Report {
        entry: entry.name.clone(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_loads() {
        for name in NAMES {
            let e = catalog_load(name).unwrap_or_else(|e| panic!("{e}"));
            assert!(!e.assertions.is_empty());
            assert!(!e.provenance.is_empty(), "{name} lacks a provenance header");
        }
        assert!(matches!(catalog_load("nope"), Err(CatalogError::Unknown(_))));
    }

    #[test]
    fn encoding_clause_count_matches_incomparable_pairs() {
        let jaw = catalog_load("jaw").unwrap().poset;
        let enc = crate::oracle::encode(&jaw, PropertyQuery::trapezoid());
        assert_eq!(enc.clauses.len(), 2 * jaw.incomparable_pairs().len());
    }

    #[test]
    fn jaw_report() {
        let r = verify_paper(&catalog_load("jaw").unwrap(), None, Scope::All);
        assert!(r.all_pass(), "{r}");
    }
}
