//! Placement of an order in the hierarchy of trapezoid order classes.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::constructions::{interval_order_proper_parallelogram, interval_order_unit_trapezoid};
use crate::geometry::{Property, Representation};
use crate::oracle::{exists_representation, Existence, PropertyQuery, SearchOptions};
use crate::poset::named::{three_plus_one, two_plus_two};
use crate::poset::Poset;

/// A 2+2 inside `p`, as a map from the pattern `a<b, c<d` to `p`.
pub fn find_two_plus_two(p: &Poset) -> Option<HashMap<String, String>> {
    p.find_pattern(&two_plus_two())
}

/// The first forbidden pattern of semiorders found in `p`.
pub fn semiorder_obstruction(p: &Poset) -> Option<(&'static str, HashMap<String, String>)> {
    if let Some(m) = find_two_plus_two(p) {
        return Some(("2+2", m));
    }
    p.find_pattern(&three_plus_one()).map(|m| ("3+1", m))
}

pub fn is_interval_order(p: &Poset) -> bool {
    find_two_plus_two(p).is_none()
}

pub fn is_semiorder(p: &Poset) -> bool {
    semiorder_obstruction(p).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Trap,
    PTrap,
    UTrap,
    Pgram,
    PPgram,
    UPgram,
    Interval,
}

impl Class {
    pub const ALL: [Class; 7] = [
        Class::Trap,
        Class::PTrap,
        Class::UTrap,
        Class::Pgram,
        Class::PPgram,
        Class::UPgram,
        Class::Interval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Class::Trap => "TRAP",
            Class::PTrap => "P_TRAP",
            Class::UTrap => "U_TRAP",
            Class::Pgram => "PGRAM",
            Class::PPgram => "P_PGRAM",
            Class::UPgram => "U_PGRAM",
            Class::Interval => "INTERVAL",
        }
    }

    pub fn parse(s: &str) -> Option<Class> {
        Class::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }

    /// Immediate superclasses.
    pub fn parents(self) -> &'static [Class] {
        match self {
            Class::UPgram => &[Class::PPgram, Class::UTrap],
            Class::PPgram => &[Class::Pgram, Class::PTrap],
            Class::UTrap => &[Class::PTrap],
            Class::Pgram => &[Class::Trap],
            Class::PTrap => &[Class::Trap],
            Class::Trap => &[],
            Class::Interval => &[Class::UTrap, Class::PPgram],
        }
    }

    /// The representation properties defining the class; `None` for
    /// INTERVAL, which is recognized combinatorially.
    pub fn query(self) -> Option<PropertyQuery> {
        use Property::*;
        let props: &[Property] = match self {
            Class::Trap => &[],
            Class::PTrap => &[Proper],
            Class::UTrap => &[Unit],
            Class::Pgram => &[Parallelogram],
            Class::PPgram => &[Proper, Parallelogram],
            Class::UPgram => &[Unit, Parallelogram],
            Class::Interval => return None,
        };
        Some(PropertyQuery::of(props))
    }

    /// Every class containing this one, itself included.
    pub fn up_closure(self) -> Vec<Class> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            for &p in out[i].parents() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            i += 1;
        }
        out
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Member,
    NonMember,
    Unresolved,
}

/// Membership status for each of the seven classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassSet {
    status: [Membership; 7],
}

impl Default for ClassSet {
    fn default() -> Self {
        ClassSet {
            status: [Membership::Unresolved; 7],
        }
    }
}

impl ClassSet {
    pub fn unresolved() -> Self {
        Self::default()
    }

    /// Exactly the given classes are members; all others are non-members.
    pub fn of(members: &[Class]) -> Self {
        let mut cs = ClassSet {
            status: [Membership::NonMember; 7],
        };
        for &c in members {
            cs.status[c.index()] = Membership::Member;
        }
        cs
    }

    pub fn full() -> Self {
        Self::of(&Class::ALL)
    }

    pub fn status(&self, c: Class) -> Membership {
        self.status[c.index()]
    }

    pub fn set(&mut self, c: Class, m: Membership) {
        self.status[c.index()] = m;
    }

    pub fn contains(&self, c: Class) -> bool {
        self.status(c) == Membership::Member
    }

    pub fn excludes(&self, c: Class) -> bool {
        self.status(c) == Membership::NonMember
    }

    pub fn members(&self) -> Vec<Class> {
        Class::ALL.into_iter().filter(|&c| self.contains(c)).collect()
    }

    pub fn unresolved_classes(&self) -> Vec<Class> {
        Class::ALL
            .into_iter()
            .filter(|&c| self.status(c) == Membership::Unresolved)
            .collect()
    }

    pub fn is_resolved(&self) -> bool {
        self.unresolved_classes().is_empty()
    }

    /// Records a verdict and everything it implies along the inclusions:
    /// membership goes up, non-membership goes down. Panics if the new fact
    /// contradicts a recorded one.
    pub fn record(&mut self, c: Class, member: bool) {
        let affected: Vec<Class> = if member {
            c.up_closure()
        } else {
            Class::ALL.into_iter().filter(|d| d.up_closure().contains(&c)).collect()
        };
        let m = if member { Membership::Member } else { Membership::NonMember };
        for d in affected {
            match self.status(d) {
                Membership::Unresolved => self.set(d, m),
                s if s == m => {}
                _ => panic!("hierarchy contradiction: {d} already decided opposite to {c} = {m:?}"),
            }
        }
    }
}

impl fmt::Display for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in Class::ALL {
            let mark = match self.status(c) {
                Membership::Member => "+",
                Membership::NonMember => "-",
                Membership::Unresolved => "?",
            };
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{mark}{c}")?;
        }
        Ok(())
    }
}

/// True iff the members are closed upward along the inclusions.
pub fn hierarchy_check(cs: &ClassSet) -> bool {
    Class::ALL
        .into_iter()
        .filter(|&c| cs.contains(c))
        .all(|c| c.parents().iter().all(|&p| cs.contains(p)))
}

/// A classification with the representations that certify membership.
#[derive(Debug, Clone)]
pub struct Classification {
    pub classes: ClassSet,
    pub witnesses: Vec<(Class, Representation)>,
    /// Classes settled by an oracle query, in query order.
    pub queried: Vec<Class>,
}

/// Oracle queries are issued in this order; anything already implied by an
/// earlier answer is skipped.
const QUERY_ORDER: [Class; 6] = [
    Class::Trap,
    Class::UPgram,
    Class::PPgram,
    Class::UTrap,
    Class::Pgram,
    Class::PTrap,
];

pub fn classify(p: &Poset, budget: Option<Duration>) -> ClassSet {
    classify_detailed(p, budget).classes
}

pub fn classify_detailed(p: &Poset, budget: Option<Duration>) -> Classification {
    let deadline = budget.map(|b| Instant::now() + b);
    let mut cs = ClassSet::unresolved();
    let mut witnesses = Vec::new();
    let mut queried = Vec::new();
    if is_interval_order(p) {
        let unit = interval_order_unit_trapezoid(p).expect("interval orders are unit trapezoid orders");
        let ppg = interval_order_proper_parallelogram(p).expect("interval orders are proper parallelogram orders");
        cs.record(Class::Interval, true);
        witnesses.push((Class::UTrap, unit));
        witnesses.push((Class::PPgram, ppg));
    } else {
        cs.record(Class::Interval, false);
    }
    for c in QUERY_ORDER {
        if cs.status(c) != Membership::Unresolved {
            continue;
        }
        let remaining = deadline.map(|d| d.saturating_duration_since(Instant::now()));
        let opts = SearchOptions {
            budget: remaining,
            ..Default::default()
        };
        queried.push(c);
        match exists_representation(p, c.query().expect("representation class"), &opts) {
            Existence::Found(w) => {
                cs.record(c, true);
                witnesses.push((c, w));
            }
            Existence::NotExist => cs.record(c, false),
            Existence::Timeout(_) => {}
        }
    }
    debug_assert!(hierarchy_check(&cs));
    Classification {
        classes: cs,
        witnesses,
        queried,
    }
}
