//! Complete decision procedure for "does this order have a trapezoid
//! representation with these properties?", and the dual "does this endpoint
//! formula hold in every such representation?".
//!
//! An order and a property query are encoded as a conjunction of linear
//! constraints over the endpoint variables `l, r, L, R` of every element,
//! plus clauses: disjunctions whose disjuncts are themselves conjunctions of
//! constraints. The search branches on clauses. Almost every atom compares
//! two endpoints, so the branch state keeps the transitive closure of those
//! comparisons; it decides most literals without the simplex and detects
//! most conflicts. The exact solver is consulted whenever constraints
//! outside that fragment (equal base sums, equal base lengths) are present,
//! and at every leaf to produce the witness.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::geometry::{Property, PropertySet, Representation, Trapezoid};
use crate::lp::{ConstraintSystem, LinearConstraint, Node, Relation, Solution, VarId};
use crate::poset::Poset;
use crate::rational::Rational;

/// Requested properties. Every representation is a trapezoid
/// representation; `rectangle` implies `parallelogram`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PropertyQuery(PropertySet);

impl PropertyQuery {
    pub fn new(props: PropertySet) -> Self {
        let props = if props.contains(Property::Rectangle) {
            props.with(Property::Parallelogram)
        } else {
            props
        };
        PropertyQuery(props)
    }

    pub fn trapezoid() -> Self {
        Self::new(PropertySet::empty())
    }

    pub fn of(props: &[Property]) -> Self {
        Self::new(PropertySet::of(props))
    }

    pub fn props(self) -> PropertySet {
        self.0
    }

    pub fn requires(self, p: Property) -> bool {
        self.0.contains(p)
    }
}

impl std::fmt::Display for PropertyQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The four endpoints of a trapezoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    /// `l`: left end of the lower interval.
    LowerLeft,
    /// `r`
    LowerRight,
    /// `L`
    UpperLeft,
    /// `R`
    UpperRight,
}

impl Endpoint {
    const ALL: [Endpoint; 4] = [
        Endpoint::LowerLeft,
        Endpoint::LowerRight,
        Endpoint::UpperLeft,
        Endpoint::UpperRight,
    ];

    fn offset(self) -> usize {
        self as usize
    }

    fn symbol(self) -> &'static str {
        match self {
            Endpoint::LowerLeft => "l",
            Endpoint::LowerRight => "r",
            Endpoint::UpperLeft => "L",
            Endpoint::UpperRight => "R",
        }
    }
}

/// Variable numbering for an order: element `i` owns variables `4i..4i+4`
/// in the order `l, r, L, R`; the common base sum `c`, when present, is `4n`.
#[derive(Debug, Clone)]
pub struct Layout {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl Layout {
    pub fn new(p: &Poset) -> Self {
        let ids = p.ids().to_vec();
        let index = ids.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Layout { ids, index }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn var_of(&self, i: usize, e: Endpoint) -> VarId {
        4 * i + e.offset()
    }

    /// Panics on an unknown id.
    pub fn var(&self, id: &str, e: Endpoint) -> VarId {
        let i = *self
            .index
            .get(id)
            .unwrap_or_else(|| panic!("unknown element `{id}`"));
        self.var_of(i, e)
    }

    pub fn l(&self, id: &str) -> VarId {
        self.var(id, Endpoint::LowerLeft)
    }

    pub fn r(&self, id: &str) -> VarId {
        self.var(id, Endpoint::LowerRight)
    }

    pub fn big_l(&self, id: &str) -> VarId {
        self.var(id, Endpoint::UpperLeft)
    }

    pub fn big_r(&self, id: &str) -> VarId {
        self.var(id, Endpoint::UpperRight)
    }

    pub fn unit_var(&self) -> VarId {
        4 * self.ids.len()
    }

    fn names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(4 * self.len());
        for id in &self.ids {
            for e in Endpoint::ALL {
                names.push(format!("{}({id})", e.symbol()));
            }
        }
        names
    }

    /// Reads a representation back from an assignment.
    pub fn representation(&self, values: &[Rational]) -> Representation {
        let mut rep = Representation::new();
        for (i, id) in self.ids.iter().enumerate() {
            let v = |e| values[self.var_of(i, e)].clone();
            let t = Trapezoid::from_endpoints(
                v(Endpoint::LowerLeft),
                v(Endpoint::LowerRight),
                v(Endpoint::UpperLeft),
                v(Endpoint::UpperRight),
            )
            .expect("solver respects l <= r and L <= R");
            rep.insert(id.clone(), t).expect("ids already validated");
        }
        rep
    }

    /// Endpoint values of a representation, in variable order. Missing
    /// elements read as zero.
    pub fn values_of(&self, rep: &Representation) -> Vec<Rational> {
        let mut out = Vec::with_capacity(4 * self.len());
        for id in &self.ids {
            match rep.get(id) {
                Some(t) => out.extend([
                    t.lower.left.clone(),
                    t.lower.right.clone(),
                    t.upper.left.clone(),
                    t.upper.right.clone(),
                ]),
                None => out.extend(std::iter::repeat(Rational::zero()).take(4)),
            }
        }
        out
    }
}

/// A disjunction of conjunctions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause(pub Vec<Vec<LinearConstraint>>);

impl Clause {
    pub fn of_atoms(atoms: impl IntoIterator<Item = LinearConstraint>) -> Self {
        Clause(atoms.into_iter().map(|a| vec![a]).collect())
    }
}

/// Conjunctive base plus clauses over the endpoint variables of one order.
#[derive(Debug, Clone)]
pub struct DisjunctiveEncoding {
    pub base: ConstraintSystem,
    pub clauses: Vec<Clause>,
    pub layout: Layout,
    pub query: PropertyQuery,
}

/// A positive AND/OR combination of linear constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndpointFormula {
    Atom(LinearConstraint),
    And(Vec<EndpointFormula>),
    Or(Vec<EndpointFormula>),
}

impl EndpointFormula {
    pub fn lt(a: VarId, b: VarId) -> Self {
        EndpointFormula::Atom(LinearConstraint::lt(a, b))
    }

    pub fn le(a: VarId, b: VarId) -> Self {
        EndpointFormula::Atom(LinearConstraint::le(a, b))
    }

    /// `v0 REL1 v1 REL2 v2 ...` for a chain of `(relation, next)` steps.
    pub fn chain(first: VarId, steps: &[(Relation, VarId)]) -> Self {
        let mut prev = first;
        let mut atoms = Vec::with_capacity(steps.len());
        for &(rel, next) in steps {
            atoms.push(EndpointFormula::Atom(LinearConstraint::compare(prev, rel, next)));
            prev = next;
        }
        EndpointFormula::And(atoms)
    }

    pub fn holds(&self, values: &[Rational]) -> bool {
        match self {
            EndpointFormula::Atom(c) => c.holds(|v| values[v].clone()),
            EndpointFormula::And(fs) => fs.iter().all(|f| f.holds(values)),
            EndpointFormula::Or(fs) => fs.iter().any(|f| f.holds(values)),
        }
    }

    /// De Morgan, with each atom replaced by its flipped relation.
    pub fn negate(&self) -> EndpointFormula {
        match self {
            EndpointFormula::Atom(c) => {
                let mut parts: Vec<_> = c.negate().into_iter().map(EndpointFormula::Atom).collect();
                if parts.len() == 1 {
                    parts.pop().unwrap()
                } else {
                    EndpointFormula::Or(parts)
                }
            }
            EndpointFormula::And(fs) => EndpointFormula::Or(fs.iter().map(Self::negate).collect()),
            EndpointFormula::Or(fs) => EndpointFormula::And(fs.iter().map(Self::negate).collect()),
        }
    }

    fn as_conjunction(&self) -> Option<Vec<LinearConstraint>> {
        match self {
            EndpointFormula::Atom(c) => Some(vec![c.clone()]),
            EndpointFormula::And(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    out.extend(f.as_conjunction()?);
                }
                Some(out)
            }
            EndpointFormula::Or(_) => None,
        }
    }

    /// Clauses whose conjunction is equivalent to the formula.
    pub fn to_clauses(&self) -> Vec<Clause> {
        match self {
            EndpointFormula::Atom(c) => vec![Clause(vec![vec![c.clone()]])],
            EndpointFormula::And(fs) => fs.iter().flat_map(Self::to_clauses).collect(),
            EndpointFormula::Or(fs) => {
                if let Some(conjs) = fs.iter().map(Self::as_conjunction).collect::<Option<Vec<_>>>() {
                    return vec![Clause(conjs)];
                }
                // Distribute: every combination of one clause per child.
                let mut acc: Vec<Clause> = vec![Clause(Vec::new())];
                for f in fs {
                    let child = f.to_clauses();
                    let mut next = Vec::with_capacity(acc.len() * child.len());
                    for a in &acc {
                        for c in &child {
                            let mut d = a.0.clone();
                            d.extend(c.0.iter().cloned());
                            next.push(Clause(d));
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }
}

/// Encodes "a representation of `p` with the properties of `q`".
pub fn encode(p: &Poset, q: PropertyQuery) -> DisjunctiveEncoding {
    let layout = Layout::new(p);
    let n = p.len();
    let mut base = ConstraintSystem::new();
    for name in layout.names() {
        base.add_var(name);
    }
    let v = |i: usize, e: Endpoint| layout.var_of(i, e);
    use Endpoint::*;
    for i in 0..n {
        base.add(LinearConstraint::le(v(i, LowerLeft), v(i, LowerRight)));
        base.add(LinearConstraint::le(v(i, UpperLeft), v(i, UpperRight)));
    }
    let mut clauses = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if p.lt(i, j) {
                base.add(LinearConstraint::lt(v(i, LowerRight), v(j, LowerLeft)));
                base.add(LinearConstraint::lt(v(i, UpperRight), v(j, UpperLeft)));
            } else if i != j && !p.lt(j, i) {
                // Not i < j: the trapezoids meet on some baseline.
                clauses.push(Clause::of_atoms([
                    LinearConstraint::le(v(j, LowerLeft), v(i, LowerRight)),
                    LinearConstraint::le(v(j, UpperLeft), v(i, UpperRight)),
                ]));
            }
        }
    }
    if q.requires(Property::Proper) {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // Not (T_i contains T_j with at least one strict side).
                let mut disj: Vec<Vec<LinearConstraint>> = vec![
                    vec![LinearConstraint::lt(v(j, LowerLeft), v(i, LowerLeft))],
                    vec![LinearConstraint::lt(v(j, UpperLeft), v(i, UpperLeft))],
                    vec![LinearConstraint::lt(v(i, LowerRight), v(j, LowerRight))],
                    vec![LinearConstraint::lt(v(i, UpperRight), v(j, UpperRight))],
                ];
                disj.push(
                    Endpoint::ALL
                        .iter()
                        .map(|&e| LinearConstraint::eq(v(i, e), v(j, e)))
                        .collect(),
                );
                clauses.push(Clause(disj));
            }
        }
    }
    let one = Rational::one();
    if q.requires(Property::Unit) {
        let c = base.add_var("c");
        debug_assert_eq!(c, layout.unit_var());
        base.add(LinearConstraint::new([(c, -one.clone())], Relation::Lt, Rational::zero()));
        for i in 0..n {
            base.add(LinearConstraint::new(
                [
                    (v(i, LowerRight), one.clone()),
                    (v(i, LowerLeft), -one.clone()),
                    (v(i, UpperRight), one.clone()),
                    (v(i, UpperLeft), -one.clone()),
                    (c, -one.clone()),
                ],
                Relation::Eq,
                Rational::zero(),
            ));
        }
    }
    if q.requires(Property::Parallelogram) {
        for i in 0..n {
            base.add(LinearConstraint::new(
                [
                    (v(i, LowerRight), one.clone()),
                    (v(i, LowerLeft), -one.clone()),
                    (v(i, UpperRight), -one.clone()),
                    (v(i, UpperLeft), one.clone()),
                ],
                Relation::Eq,
                Rational::zero(),
            ));
        }
    }
    if q.requires(Property::Rectangle) {
        for i in 0..n {
            base.add(LinearConstraint::eq(v(i, LowerLeft), v(i, UpperLeft)));
            base.add(LinearConstraint::eq(v(i, LowerRight), v(i, UpperRight)));
        }
    }
    DisjunctiveEncoding {
        base,
        clauses,
        layout,
        query: q,
    }
}

/// Counters reported with every verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub lp_calls: u64,
    pub conflicts: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub enum Existence {
    Found(Representation),
    NotExist,
    Timeout(SearchStats),
}

impl Existence {
    pub fn is_found(&self) -> bool {
        matches!(self, Existence::Found(_))
    }

    pub fn is_not_exist(&self) -> bool {
        matches!(self, Existence::NotExist)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Existence::Found(_) => "Found",
            Existence::NotExist => "NotExist",
            Existence::Timeout(_) => "Timeout",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Validity {
    Valid,
    CounterRep(Representation),
    Timeout(SearchStats),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Wall-clock limit; `None` runs to completion.
    pub budget: Option<Duration>,
    /// Visit clauses in reverse order when breaking ties.
    pub reverse_clause_order: bool,
    /// Print one line per branching decision to stderr.
    pub trace: bool,
}

impl SearchOptions {
    pub fn with_budget(budget: Duration) -> Self {
        SearchOptions {
            budget: Some(budget),
            ..Default::default()
        }
    }
}

/// Searches for a representation of `p` with the properties of `q`.
pub fn exists_representation(p: &Poset, q: PropertyQuery, opts: &SearchOptions) -> Existence {
    exists_with_stats(p, q, opts).0
}

pub fn exists_with_stats(p: &Poset, q: PropertyQuery, opts: &SearchOptions) -> (Existence, SearchStats) {
    let enc = encode(p, q);
    let (out, stats) = run(&enc, &[], opts);
    match out {
        Outcome::Sat(values) => {
            let w = enc.layout.representation(&values);
            assert_witness(p, q, &w);
            (Existence::Found(w), stats)
        }
        Outcome::Unsat => (Existence::NotExist, stats),
        Outcome::Timeout => (Existence::Timeout(stats.clone()), stats),
    }
}

/// Checks `phi` in every representation of `p` with the properties of `q`.
pub fn holds_in_all(p: &Poset, q: PropertyQuery, phi: &EndpointFormula, opts: &SearchOptions) -> Validity {
    let enc = encode(p, q);
    let extra = phi.negate().to_clauses();
    let (out, stats) = run(&enc, &extra, opts);
    match out {
        Outcome::Sat(values) => {
            let w = enc.layout.representation(&values);
            assert_witness(p, q, &w);
            assert!(!phi.holds(&values), "counter-representation satisfies the formula");
            Validity::CounterRep(w)
        }
        Outcome::Unsat => Validity::Valid,
        Outcome::Timeout => Validity::Timeout(stats),
    }
}

fn assert_witness(p: &Poset, q: PropertyQuery, w: &Representation) {
    assert_eq!(&w.induced_order(), p, "witness induces a different order");
    if !w.is_empty() {
        let got = w.property_set().expect("nonempty");
        assert!(got.is_superset(q.props()), "witness lacks requested properties: {got} vs {q}");
    }
}

enum Outcome {
    Sat(Vec<Rational>),
    Unsat,
    Timeout,
}

const NONE: u8 = 0;
const LE: u8 = 1;
const LT: u8 = 2;

/// Transitive closure of endpoint comparisons. Node `size - 1` is the
/// constant zero.
#[derive(Clone)]
struct Closure {
    size: usize,
    rel: Vec<u8>,
}

impl Closure {
    fn new(nvars: usize) -> Self {
        let size = nvars + 1;
        Closure {
            size,
            rel: vec![NONE; size * size],
        }
    }

    fn node(&self, n: Node) -> usize {
        match n {
            Node::Zero => self.size - 1,
            Node::Var(v) => v,
        }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> u8 {
        self.rel[a * self.size + b]
    }

    /// Adds `u <= v` (`u < v` if strict); false on a strict cycle.
    fn add(&mut self, u: usize, v: usize, strict: bool) -> bool {
        let s = if strict { LT } else { LE };
        if u == v {
            return !strict;
        }
        if self.get(u, v) >= s {
            return true;
        }
        let n = self.size;
        let mut srcs = vec![(u, NONE)];
        srcs.extend((0..n).filter(|&a| a != u && self.get(a, u) != NONE).map(|a| (a, self.get(a, u))));
        let mut dsts = vec![(v, NONE)];
        dsts.extend((0..n).filter(|&b| b != v && self.get(v, b) != NONE).map(|b| (b, self.get(v, b))));
        for &(a, sa) in &srcs {
            for &(b, sb) in &dsts {
                let k = s.max(sa).max(sb);
                if a == b {
                    if k == LT {
                        return false;
                    }
                    continue;
                }
                let cell = &mut self.rel[a * n + b];
                if *cell < k {
                    *cell = k;
                }
            }
        }
        true
    }

    fn edge_status(&self, u: usize, v: usize, strict: bool) -> Status {
        if u == v {
            return if strict { Status::Refuted } else { Status::Entailed };
        }
        let need = if strict { LT } else { LE };
        if self.get(u, v) >= need {
            Status::Entailed
        } else if self.get(v, u) >= if strict { LE } else { LT } {
            Status::Refuted
        } else {
            Status::Open
        }
    }

    /// Constraints equivalent to the closure: equalities inside each
    /// equivalence class, then the transitive reduction between classes.
    fn reduced_constraints(&self) -> Vec<LinearConstraint> {
        let n = self.size;
        let zero = n - 1;
        let mut rep: Vec<usize> = (0..n).collect();
        for a in 0..n {
            for b in 0..a {
                if self.get(a, b) == LE && self.get(b, a) == LE && rep[b] == b {
                    rep[a] = b;
                    break;
                }
            }
        }
        let le_node = |a: usize, b: usize, strict: bool| -> LinearConstraint {
            let rel = if strict { Relation::Lt } else { Relation::Le };
            let one = Rational::one();
            match (a == zero, b == zero) {
                (false, false) => LinearConstraint::compare(a, rel, b),
                (false, true) => LinearConstraint::new([(a, one)], rel, Rational::zero()),
                (true, false) => LinearConstraint::new([(b, -one)], rel, Rational::zero()),
                (true, true) => unreachable!(),
            }
        };
        let mut out = Vec::new();
        for a in 0..n {
            if rep[a] != a {
                out.push(le_node(a, rep[a], false));
                out.push(le_node(rep[a], a, false));
            }
        }
        let reps: Vec<usize> = (0..n).filter(|&a| rep[a] == a).collect();
        for &a in &reps {
            for &b in &reps {
                let s = self.get(a, b);
                if a == b || s == NONE {
                    continue;
                }
                let implied = reps.iter().any(|&w| {
                    w != a && w != b && {
                        let (x, y) = (self.get(a, w), self.get(w, b));
                        x != NONE && y != NONE && x.max(y) >= s
                    }
                });
                if !implied {
                    out.push(le_node(a, b, s == LT));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Entailed,
    Refuted,
    Open,
}

#[derive(Clone)]
struct State {
    closure: Closure,
    /// Asserted constraints outside the difference fragment.
    general: Vec<LinearConstraint>,
    /// Clauses added during search (negated earlier branches).
    extra: Vec<Clause>,
    /// Satisfied flags over `static clauses ++ extra`.
    done: Vec<bool>,
}

struct Engine<'a> {
    clauses: Vec<Clause>,
    names: &'a [String],
    nvars: usize,
    opts: &'a SearchOptions,
    deadline: Option<Instant>,
    stats: SearchStats,
    timed_out: bool,
}

fn run(enc: &DisjunctiveEncoding, extra: &[Clause], opts: &SearchOptions) -> (Outcome, SearchStats) {
    let start = Instant::now();
    let mut clauses = enc.clauses.clone();
    clauses.extend(extra.iter().cloned());
    let nvars = enc.base.num_vars();
    let mut engine = Engine {
        clauses,
        names: enc.base.names(),
        nvars,
        opts,
        deadline: opts.budget.map(|b| start + b),
        stats: SearchStats::default(),
        timed_out: false,
    };
    let mut state = State {
        closure: Closure::new(nvars),
        general: Vec::new(),
        extra: Vec::new(),
        done: vec![false; engine.clauses.len()],
    };
    let mut ok = true;
    for c in enc.base.constraints() {
        ok &= engine.assert(&mut state, c);
    }
    // Pin the lower-left end of some minimal element at 0. Translation
    // invariance makes this free.
    if !enc.layout.is_empty() {
        let first = (0..enc.layout.len())
            .find(|&i| {
                !(0..enc.layout.len()).any(|j| {
                    state
                        .closure
                        .edge_status(
                            enc.layout.var_of(j, Endpoint::LowerRight),
                            enc.layout.var_of(i, Endpoint::LowerLeft),
                            true,
                        )
                        == Status::Entailed
                })
            })
            .unwrap_or(0);
        let l = enc.layout.var_of(first, Endpoint::LowerLeft);
        ok &= engine.assert(&mut state, &LinearConstraint::new([(l, Rational::one())], Relation::Eq, Rational::zero()));
    }
    let out = if ok { engine.search(state, 0) } else { Outcome::Unsat };
    engine.stats.elapsed = start.elapsed();
    let out = if engine.timed_out { Outcome::Timeout } else { out };
    (out, engine.stats)
}

impl Engine<'_> {
    fn out_of_time(&mut self) -> bool {
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    fn assert(&self, st: &mut State, c: &LinearConstraint) -> bool {
        match c.as_difference() {
            Some(edges) => edges.into_iter().all(|(u, v, strict)| {
                let (u, v) = (st.closure.node(u), st.closure.node(v));
                st.closure.add(u, v, strict)
            }),
            None => {
                if c.is_ground() {
                    return c.holds(|_| Rational::zero());
                }
                if !st.general.contains(c) {
                    st.general.push(c.clone());
                }
                true
            }
        }
    }

    fn status(&self, st: &State, c: &LinearConstraint) -> Status {
        match c.as_difference() {
            Some(edges) => {
                let mut all = true;
                for (u, v, strict) in edges {
                    match st.closure.edge_status(st.closure.node(u), st.closure.node(v), strict) {
                        Status::Refuted => return Status::Refuted,
                        Status::Open => all = false,
                        Status::Entailed => {}
                    }
                }
                if all {
                    Status::Entailed
                } else {
                    Status::Open
                }
            }
            None if c.is_ground() => {
                if c.holds(|_| Rational::zero()) {
                    Status::Entailed
                } else {
                    Status::Refuted
                }
            }
            None if st.general.contains(c) => Status::Entailed,
            None => Status::Open,
        }
    }

    fn disjunct_status(&self, st: &State, d: &[LinearConstraint]) -> Status {
        let mut all = true;
        for c in d {
            match self.status(st, c) {
                Status::Refuted => return Status::Refuted,
                Status::Open => all = false,
                Status::Entailed => {}
            }
        }
        if all {
            Status::Entailed
        } else {
            Status::Open
        }
    }

    fn clause<'s>(&'s self, st: &'s State, k: usize) -> &'s Clause {
        if k < self.clauses.len() {
            &self.clauses[k]
        } else {
            &st.extra[k - self.clauses.len()]
        }
    }

    /// Unit propagation to a fixpoint; false on conflict.
    fn propagate(&self, st: &mut State) -> bool {
        loop {
            let mut changed = false;
            for k in 0..st.done.len() {
                if st.done[k] {
                    continue;
                }
                let clause = self.clause(st, k).clone();
                let mut open = Vec::new();
                let mut sat = false;
                for (i, d) in clause.0.iter().enumerate() {
                    match self.disjunct_status(st, d) {
                        Status::Entailed => {
                            sat = true;
                            break;
                        }
                        Status::Open => open.push(i),
                        Status::Refuted => {}
                    }
                }
                if sat {
                    st.done[k] = true;
                    continue;
                }
                match open.len() {
                    0 => return false,
                    1 => {
                        st.done[k] = true;
                        for c in &clause.0[open[0]] {
                            if !self.assert(st, c) {
                                return false;
                            }
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn lp(&mut self, st: &State) -> Option<Vec<Rational>> {
        self.stats.lp_calls += 1;
        let mut sys = ConstraintSystem::new();
        for name in self.names {
            sys.add_var(name.clone());
        }
        debug_assert_eq!(sys.num_vars(), self.nvars);
        sys.extend(st.closure.reduced_constraints());
        sys.extend(st.general.iter().cloned());
        match sys.solve() {
            Solution::Feasible(v) => Some(v),
            Solution::Infeasible => None,
        }
    }

    /// Picks the open clause with the fewest open disjuncts; ties go to the
    /// clause whose variables are most constrained.
    fn choose(&self, st: &State) -> Option<(usize, Vec<usize>)> {
        let mut best: Option<(usize, usize, usize, Vec<usize>)> = None;
        let total = st.done.len();
        for idx in 0..total {
            let k = if self.opts.reverse_clause_order { total - 1 - idx } else { idx };
            if st.done[k] {
                continue;
            }
            let clause = self.clause(st, k);
            let open: Vec<usize> = (0..clause.0.len())
                .filter(|&i| self.disjunct_status(st, &clause.0[i]) == Status::Open)
                .collect();
            let weight: usize = clause
                .0
                .iter()
                .flatten()
                .flat_map(|c| c.vars())
                .map(|v| {
                    let row = &st.closure.rel[v * st.closure.size..(v + 1) * st.closure.size];
                    row.iter().filter(|&&x| x != NONE).count()
                })
                .sum();
            let better = match &best {
                None => true,
                Some((len, w, _, _)) => open.len() < *len || (open.len() == *len && weight > *w),
            };
            if better {
                best = Some((open.len(), weight, k, open));
            }
        }
        best.map(|(_, _, k, open)| (k, open))
    }

    fn search(&mut self, mut st: State, depth: usize) -> Outcome {
        self.stats.nodes += 1;
        if self.out_of_time() {
            return Outcome::Timeout;
        }
        if !self.propagate(&mut st) {
            self.stats.conflicts += 1;
            return Outcome::Unsat;
        }
        let choice = self.choose(&st);
        if choice.is_none() || !st.general.is_empty() {
            if self.out_of_time() {
                return Outcome::Timeout;
            }
            match self.lp(&st) {
                None => {
                    self.stats.conflicts += 1;
                    return Outcome::Unsat;
                }
                Some(values) if choice.is_none() => return Outcome::Sat(values),
                Some(_) => {}
            }
        }
        let (k, open) = choice.expect("checked above");
        let clause = self.clause(&st, k).clone();
        for (pos, &i) in open.iter().enumerate() {
            let mut child = st.clone();
            child.done[k] = true;
            // Earlier branches are refuted here.
            for &j in &open[..pos] {
                let neg = negate_conjunction(&clause.0[j]);
                child.extra.push(neg);
                child.done.push(false);
            }
            if self.opts.trace {
                let text: Vec<String> = clause.0[i]
                    .iter()
                    .map(|c| c.display_with(self.names).to_string())
                    .collect();
                eprintln!(
                    "{:indent$}[{}] clause {k} branch {}/{}: {}",
                    "",
                    depth,
                    pos + 1,
                    open.len(),
                    text.join(" & "),
                    indent = depth.min(60)
                );
            }
            let mut ok = true;
            for c in &clause.0[i] {
                ok &= self.assert(&mut child, c);
            }
            if !ok {
                self.stats.conflicts += 1;
                continue;
            }
            match self.search(child, depth + 1) {
                Outcome::Unsat => {}
                other => return other,
            }
        }
        Outcome::Unsat
    }
}

fn negate_conjunction(d: &[LinearConstraint]) -> Clause {
    Clause(d.iter().flat_map(|c| c.negate()).map(|c| vec![c]).collect())
}

/// Reference procedure for orders of at most three elements: tries every
/// pair of endpoint order types (one per baseline) with a single
/// conjunctive solve each.
pub fn naive_oracle(p: &Poset, q: PropertyQuery) -> Result<Existence, String> {
    let n = p.len();
    if n > 3 {
        return Err(format!("naive oracle handles at most 3 elements, got {n}"));
    }
    if n == 0 {
        return Ok(Existence::Found(Representation::new()));
    }
    // Endpoint k of element i on one baseline: 2i (left), 2i+1 (right).
    let orders: Vec<Vec<usize>> = weak_orders(2 * n)
        .into_iter()
        .filter(|rk| (0..n).all(|i| rk[2 * i] <= rk[2 * i + 1]))
        .filter(|rk| {
            (0..n).all(|i| (0..n).all(|j| !p.lt(i, j) || rk[2 * i + 1] < rk[2 * j]))
        })
        .collect();
    let layout = Layout::new(p);
    // Equal order types on both baselines first: they are the common case
    // and the only candidates for rectangles.
    let diagonal = orders.iter().map(|o| (o, o));
    let off_diagonal = orders
        .iter()
        .flat_map(|a| orders.iter().map(move |b| (a, b)))
        .filter(|(a, b)| a != b && !q.requires(Property::Rectangle));
    for (lower, upper) in diagonal.chain(off_diagonal) {
        let matches = (0..n).all(|i| {
            (0..n).all(|j| {
                i == j
                    || p.lt(i, j)
                    || !(lower[2 * i + 1] < lower[2 * j] && upper[2 * i + 1] < upper[2 * j])
            })
        });
        if !matches {
            continue;
        }
        if q.requires(Property::Proper) && !ranks_proper(n, lower, upper) {
            continue;
        }
        let mut sys = ConstraintSystem::new();
        for name in layout.names() {
            sys.add_var(name);
        }
        let var = |i: usize, k: usize, up: bool| -> VarId {
            let e = match (up, k) {
                (false, 0) => Endpoint::LowerLeft,
                (false, _) => Endpoint::LowerRight,
                (true, 0) => Endpoint::UpperLeft,
                (true, _) => Endpoint::UpperRight,
            };
            layout.var_of(i, e)
        };
        for (up, rk) in [(false, lower), (true, upper)] {
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let (va, vb) = (var(a / 2, a % 2, up), var(b / 2, b % 2, up));
                    if rk[a] < rk[b] {
                        sys.add(LinearConstraint::lt(va, vb));
                    } else if rk[a] == rk[b] && a < b {
                        sys.add(LinearConstraint::eq(va, vb));
                    }
                }
            }
        }
        let one = Rational::one();
        if q.requires(Property::Unit) {
            let c = sys.add_var("c");
            sys.add(LinearConstraint::new([(c, -one.clone())], Relation::Lt, Rational::zero()));
            for i in 0..n {
                sys.add(LinearConstraint::new(
                    [
                        (var(i, 1, false), one.clone()),
                        (var(i, 0, false), -one.clone()),
                        (var(i, 1, true), one.clone()),
                        (var(i, 0, true), -one.clone()),
                        (c, -one.clone()),
                    ],
                    Relation::Eq,
                    Rational::zero(),
                ));
            }
        }
        if q.requires(Property::Parallelogram) {
            for i in 0..n {
                sys.add(LinearConstraint::new(
                    [
                        (var(i, 1, false), one.clone()),
                        (var(i, 0, false), -one.clone()),
                        (var(i, 1, true), -one.clone()),
                        (var(i, 0, true), one.clone()),
                    ],
                    Relation::Eq,
                    Rational::zero(),
                ));
            }
        }
        if q.requires(Property::Rectangle) {
            for i in 0..n {
                sys.add(LinearConstraint::eq(var(i, 0, false), var(i, 0, true)));
                sys.add(LinearConstraint::eq(var(i, 1, false), var(i, 1, true)));
            }
        }
        if let Solution::Feasible(values) = sys.solve() {
            let w = layout.representation(&values);
            assert_witness(p, q, &w);
            return Ok(Existence::Found(w));
        }
    }
    Ok(Existence::NotExist)
}

/// No trapezoid properly contains another, judged from endpoint ranks.
fn ranks_proper(n: usize, lower: &[usize], upper: &[usize]) -> bool {
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let contains = lower[2 * i] <= lower[2 * j]
                && upper[2 * i] <= upper[2 * j]
                && lower[2 * j + 1] <= lower[2 * i + 1]
                && upper[2 * j + 1] <= upper[2 * i + 1];
            let same = lower[2 * i] == lower[2 * j]
                && upper[2 * i] == upper[2 * j]
                && lower[2 * i + 1] == lower[2 * j + 1]
                && upper[2 * i + 1] == upper[2 * j + 1];
            if contains && !same {
                return false;
            }
        }
    }
    true
}

/// All weak orders (ordered set partitions) of `m` items, as rank vectors
/// using ranks `0..k` for some `k`.
fn weak_orders(m: usize) -> Vec<Vec<usize>> {
    // Peel off one nonempty block of the remaining items per rank.
    fn go(rest: u32, rank: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        let mut block = rest;
        while block != 0 {
            for k in 0..cur.len() {
                if block >> k & 1 == 1 {
                    cur[k] = rank;
                }
            }
            go(rest & !block, rank + 1, cur, out);
            block = (block - 1) & rest;
        }
    }
    let mut out = Vec::new();
    go((1u32 << m) - 1, 0, &mut vec![0; m], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::named::two_plus_two;

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn encode_counts() {
        let c2 = Poset::chain(&["a", "b"]);
        let e = encode(&c2, PropertyQuery::trapezoid());
        assert_eq!(e.base.num_vars(), 8);
        let strict = e.base.constraints().iter().filter(|c| c.rel == Relation::Lt).count();
        assert_eq!(strict, 2);
        assert!(e.clauses.is_empty());
        let a2 = Poset::antichain(&["a", "b"]);
        assert_eq!(encode(&a2, PropertyQuery::trapezoid()).clauses.len(), 2);
        let u = encode(&a2, PropertyQuery::of(&[Property::Unit]));
        assert_eq!(u.base.num_vars(), 9);
    }

    #[test]
    fn weak_order_counts() {
        // Fubini numbers
        assert_eq!(weak_orders(1).len(), 1);
        assert_eq!(weak_orders(2).len(), 3);
        assert_eq!(weak_orders(3).len(), 13);
        assert_eq!(weak_orders(4).len(), 75);
    }

    #[test]
    fn chains_have_every_property() {
        let c3 = Poset::chain(&["a", "b", "c"]);
        for q in PropertySet::every_subset() {
            let r = exists_representation(&c3, PropertyQuery::new(q), &opts());
            assert!(r.is_found(), "{q}");
        }
    }

    #[test]
    fn two_plus_two_unit_parallelogram() {
        let q = PropertyQuery::of(&[Property::Unit, Property::Parallelogram]);
        assert!(exists_representation(&two_plus_two(), q, &opts()).is_found());
        let rect = PropertyQuery::of(&[Property::Rectangle]);
        assert!(exists_representation(&two_plus_two(), rect, &opts()).is_not_exist());
    }

    #[test]
    fn formula_clauses() {
        let f = EndpointFormula::Or(vec![
            EndpointFormula::And(vec![EndpointFormula::lt(0, 1), EndpointFormula::le(1, 2)]),
            EndpointFormula::lt(2, 3),
        ]);
        assert_eq!(f.to_clauses().len(), 1);
        let neg = f.negate();
        // not((a & b) | c) = (!a | !b) & !c
        assert_eq!(neg.to_clauses().len(), 2);
        let nested = EndpointFormula::Or(vec![
            EndpointFormula::And(vec![
                EndpointFormula::lt(0, 1),
                EndpointFormula::Or(vec![EndpointFormula::lt(1, 2), EndpointFormula::lt(2, 1)]),
            ]),
            EndpointFormula::lt(3, 0),
        ]);
        let vals: Vec<Rational> = [0, 1, 2, 3].iter().map(|&x| Rational::from(x)).collect();
        assert!(nested.holds(&vals));
        assert_eq!(nested.to_clauses().len(), 2);
    }

    #[test]
    fn trivially_valid_formula() {
        let p = two_plus_two();
        let lay = Layout::new(&p);
        let phi = EndpointFormula::le(lay.l("a"), lay.r("a"));
        assert!(holds_in_all(&p, PropertyQuery::trapezoid(), &phi, &opts()).is_valid());
        let phi = EndpointFormula::lt(lay.r("a"), lay.l("d"));
        assert!(matches!(
            holds_in_all(&p, PropertyQuery::trapezoid(), &phi, &opts()),
            Validity::CounterRep(_)
        ));
    }

    #[test]
    fn naive_small() {
        let c2 = Poset::chain(&["a", "b"]);
        let rect = PropertyQuery::of(&[Property::Rectangle]);
        assert!(naive_oracle(&c2, rect).unwrap().is_found());
        let a2 = Poset::antichain(&["a", "b"]);
        assert!(naive_oracle(&a2, rect).unwrap().is_found());
        assert!(naive_oracle(&two_plus_two(), rect).is_err());
    }

    #[test]
    fn zero_budget_times_out() {
        let p = two_plus_two();
        let o = SearchOptions::with_budget(Duration::ZERO);
        assert!(matches!(
            exists_representation(&p, PropertyQuery::trapezoid(), &o),
            Existence::Timeout(_)
        ));
    }
}
