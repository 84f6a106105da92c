//! Exact feasibility of conjunctions of linear constraints over the
//! rationals, with relations `<`, `<=` and `=`.
//!
//! The engine is a bounded-variable simplex in the style of Dutertre and
//! de Moura: every constraint row gets a slack variable, original variables
//! are free, and pivoting follows Bland's rule. Strict rows share one extra
//! variable `δ ∈ [0, 1]` (`e < c` becomes `e + δ <= c`); once the non-strict
//! system is feasible, `δ` is pushed up by primal simplex steps. The strict
//! system is satisfiable iff a positive `δ` is reachable.

use std::collections::BTreeMap;
use std::fmt;

use crate::rational::Rational;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

/// `Σ coef·var REL rhs`. Terms are sorted by variable, merged, and free of
/// zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    terms: Vec<(VarId, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

/// One side of a zero-weight difference edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Zero,
    Var(VarId),
}

impl LinearConstraint {
    pub fn new(terms: impl IntoIterator<Item = (VarId, Rational)>, rel: Relation, rhs: Rational) -> Self {
        let mut merged: BTreeMap<VarId, Rational> = BTreeMap::new();
        for (v, c) in terms {
            let e = merged.entry(v).or_insert_with(Rational::zero);
            *e += &c;
        }
        LinearConstraint {
            terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            rel,
            rhs,
        }
    }

    /// `x_a REL x_b`.
    pub fn compare(a: VarId, rel: Relation, b: VarId) -> Self {
        Self::new([(a, Rational::one()), (b, -Rational::one())], rel, Rational::zero())
    }

    pub fn lt(a: VarId, b: VarId) -> Self {
        Self::compare(a, Relation::Lt, b)
    }

    pub fn le(a: VarId, b: VarId) -> Self {
        Self::compare(a, Relation::Le, b)
    }

    pub fn eq(a: VarId, b: VarId) -> Self {
        Self::compare(a, Relation::Eq, b)
    }

    pub fn terms(&self) -> &[(VarId, Rational)] {
        &self.terms
    }

    pub fn is_ground(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.terms.iter().map(|(v, _)| *v)
    }

    pub fn lhs_value(&self, value: impl Fn(VarId) -> Rational) -> Rational {
        self.terms.iter().map(|(v, c)| c * &value(*v)).sum()
    }

    pub fn holds(&self, value: impl Fn(VarId) -> Rational) -> bool {
        let lhs = self.lhs_value(value);
        match self.rel {
            Relation::Lt => lhs < self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    /// The negation as a disjunction of constraints (one disjunct except
    /// for `=`).
    pub fn negate(&self) -> Vec<LinearConstraint> {
        let flipped = |rel| LinearConstraint {
            terms: self.terms.iter().map(|(v, c)| (*v, -c)).collect(),
            rel,
            rhs: -&self.rhs,
        };
        match self.rel {
            Relation::Lt => vec![flipped(Relation::Le)],
            Relation::Le => vec![flipped(Relation::Lt)],
            Relation::Eq => vec![
                LinearConstraint {
                    rel: Relation::Lt,
                    ..self.clone()
                },
                flipped(Relation::Lt),
            ],
        }
    }

    /// Zero-weight difference edges `(u, v, strict)` meaning `u <= v` (or
    /// `u < v`) whose conjunction is equivalent to this constraint, when it
    /// has that shape.
    pub fn as_difference(&self) -> Option<Vec<(Node, Node, bool)>> {
        if !self.rhs.is_zero() {
            return None;
        }
        let (u, v) = match self.terms.as_slice() {
            [(a, ca), (b, cb)] if ca == &-cb => {
                if ca.is_positive() {
                    (Node::Var(*a), Node::Var(*b))
                } else {
                    (Node::Var(*b), Node::Var(*a))
                }
            }
            [(a, ca)] => {
                if ca.is_positive() {
                    (Node::Var(*a), Node::Zero)
                } else {
                    (Node::Zero, Node::Var(*a))
                }
            }
            _ => return None,
        };
        Some(match self.rel {
            Relation::Lt => vec![(u, v, true)],
            Relation::Le => vec![(u, v, false)],
            Relation::Eq => vec![(u, v, false), (v, u, false)],
        })
    }

    /// `lhs REL rhs` using the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayConstraint { c: self, names }
    }
}

struct DisplayConstraint<'a> {
    c: &'a LinearConstraint,
    names: &'a [String],
}

impl fmt::Display for DisplayConstraint<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (v, coef)) in self.c.terms.iter().enumerate() {
            let name = self
                .names
                .get(*v)
                .cloned()
                .unwrap_or_else(|| format!("v{v}"));
            let mag = coef.abs();
            let sign = if coef.is_negative() { "-" } else { "+" };
            match (k, coef.is_negative()) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                _ => write!(f, " {sign} ")?,
            }
            if mag == Rational::one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{mag}*{name}")?;
            }
        }
        write!(f, " {} {}", self.c.rel.symbol(), self.c.rhs)
    }
}

/// Registered variables and a conjunction of constraints over them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSystem {
    names: Vec<String>,
    constraints: Vec<LinearConstraint>,
}

impl ConstraintSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> VarId {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// Panics if the constraint mentions an unregistered variable.
    pub fn add(&mut self, c: LinearConstraint) {
        assert!(
            c.vars().all(|v| v < self.names.len()),
            "constraint over unregistered variable"
        );
        self.constraints.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = LinearConstraint>) {
        for c in cs {
            self.add(c);
        }
    }

    pub fn truncate(&mut self, len: usize) {
        self.constraints.truncate(len);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// One `lhs REL rhs` line per constraint.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.constraints {
            out.push_str(&c.display_with(&self.names).to_string());
            out.push('\n');
        }
        out
    }

    pub fn solve(&self) -> Solution {
        solve(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// Values for every registered variable, in registration order.
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Solution::Feasible(_))
    }
}

/// Decides feasibility of `sys` exactly. A feasible answer is re-checked by
/// substitution before it is returned.
pub fn solve(sys: &ConstraintSystem) -> Solution {
    let mut rows: Vec<&LinearConstraint> = Vec::with_capacity(sys.constraints.len());
    for c in &sys.constraints {
        if c.is_ground() {
            if !c.holds(|_| Rational::zero()) {
                return Solution::Infeasible;
            }
        } else {
            rows.push(c);
        }
    }
    let n = sys.num_vars();
    let any_strict = rows.iter().any(|c| c.rel == Relation::Lt);
    let mut tab = Tableau::new(n, any_strict, &rows);
    if !tab.check() {
        return Solution::Infeasible;
    }
    if any_strict && !tab.raise_delta() {
        return Solution::Infeasible;
    }
    let values: Vec<Rational> = (0..n).map(|v| tab.value[v].clone()).collect();
    assert!(
        sys.constraints.iter().all(|c| c.holds(|v| values[v].clone())),
        "simplex witness failed substitution check"
    );
    Solution::Feasible(values)
}

struct Tableau {
    /// `a[i][k]`: coefficient of the variable at column `k` in the row of
    /// the basic variable `row_var[i]`.
    a: Vec<Vec<Rational>>,
    row_var: Vec<usize>,
    col_var: Vec<usize>,
    /// Position of each variable: `Ok(row)` if basic, `Err(col)` otherwise.
    pos: Vec<Result<usize, usize>>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    value: Vec<Rational>,
    delta: Option<usize>,
}

impl Tableau {
    fn new(n: usize, with_delta: bool, rows: &[&LinearConstraint]) -> Self {
        let cols = n + usize::from(with_delta);
        let delta = with_delta.then_some(n);
        let total = cols + rows.len();
        let mut lower = vec![None; total];
        let mut upper = vec![None; total];
        if let Some(d) = delta {
            lower[d] = Some(Rational::zero());
            upper[d] = Some(Rational::one());
        }
        let mut a = Vec::with_capacity(rows.len());
        let mut row_var = Vec::with_capacity(rows.len());
        for (i, c) in rows.iter().enumerate() {
            let mut row = vec![Rational::zero(); cols];
            for (v, coef) in c.terms() {
                row[*v] = coef.clone();
            }
            let s = cols + i;
            match c.rel {
                Relation::Lt => {
                    row[delta.expect("strict row needs δ")] = Rational::one();
                    upper[s] = Some(c.rhs.clone());
                }
                Relation::Le => upper[s] = Some(c.rhs.clone()),
                Relation::Eq => {
                    lower[s] = Some(c.rhs.clone());
                    upper[s] = Some(c.rhs.clone());
                }
            }
            a.push(row);
            row_var.push(s);
        }
        let mut pos = Vec::with_capacity(total);
        pos.extend((0..cols).map(Err));
        pos.extend((0..rows.len()).map(Ok));
        Tableau {
            a,
            row_var,
            col_var: (0..cols).collect(),
            pos,
            lower,
            upper,
            value: vec![Rational::zero(); total],
            delta,
        }
    }

    fn below_lower(&self, v: usize) -> bool {
        matches!(&self.lower[v], Some(l) if &self.value[v] < l)
    }

    fn above_upper(&self, v: usize) -> bool {
        matches!(&self.upper[v], Some(u) if &self.value[v] > u)
    }

    fn can_increase(&self, v: usize) -> bool {
        !matches!(&self.upper[v], Some(u) if &self.value[v] >= u)
    }

    fn can_decrease(&self, v: usize) -> bool {
        !matches!(&self.lower[v], Some(l) if &self.value[v] <= l)
    }

    /// Restores all bounds; false iff the non-strict relaxation is
    /// infeasible.
    fn check(&mut self) -> bool {
        loop {
            let violated = self
                .row_var
                .iter()
                .enumerate()
                .filter(|(_, &v)| self.below_lower(v) || self.above_upper(v))
                .min_by_key(|(_, &v)| v)
                .map(|(i, _)| i);
            let Some(i) = violated else { return true };
            let v = self.row_var[i];
            let increase = self.below_lower(v);
            let entering = (0..self.col_var.len())
                .filter(|&k| {
                    let c = &self.a[i][k];
                    let x = self.col_var[k];
                    if c.is_zero() {
                        return false;
                    }
                    (c.is_positive() == increase && self.can_increase(x))
                        || (c.is_positive() != increase && self.can_decrease(x))
                })
                .min_by_key(|&k| self.col_var[k]);
            let Some(k) = entering else { return false };
            let target = if increase {
                self.lower[v].clone().unwrap()
            } else {
                self.upper[v].clone().unwrap()
            };
            self.pivot_and_update(i, k, target);
        }
    }

    /// Moves `δ` towards its upper bound until it is positive (success) or
    /// no improving direction remains (failure).
    fn raise_delta(&mut self) -> bool {
        let d = self.delta.expect("δ present");
        loop {
            if self.value[d].is_positive() {
                return true;
            }
            let (k, up) = match self.pos[d] {
                Err(col) => {
                    if !self.can_increase(d) {
                        return false;
                    }
                    (col, true)
                }
                Ok(row) => {
                    let cand = (0..self.col_var.len())
                        .filter(|&k| {
                            let c = &self.a[row][k];
                            let x = self.col_var[k];
                            (c.is_positive() && self.can_increase(x))
                                || (c.is_negative() && self.can_decrease(x))
                        })
                        .min_by_key(|&k| self.col_var[k]);
                    match cand {
                        Some(k) => (k, self.a[row][k].is_positive()),
                        None => return false,
                    }
                }
            };
            let x = self.col_var[k];
            // Largest step for x in direction `up`; None = unbounded.
            let mut best: Option<(Rational, Option<usize>)> = match (up, &self.upper[x], &self.lower[x]) {
                (true, Some(u), _) => Some((u - &self.value[x], None)),
                (false, _, Some(l)) => Some((&self.value[x] - l, None)),
                _ => None,
            };
            for i in 0..self.row_var.len() {
                let c = &self.a[i][k];
                if c.is_zero() {
                    continue;
                }
                let rate_pos = c.is_positive() == up;
                let b = self.row_var[i];
                let limit = if rate_pos {
                    self.upper[b].as_ref().map(|u| &(u - &self.value[b]) / &c.abs())
                } else {
                    self.lower[b].as_ref().map(|l| &(&self.value[b] - l) / &c.abs())
                };
                if let Some(t) = limit {
                    let better = match &best {
                        None => true,
                        Some((bt, brow)) => {
                            t < *bt
                                || (t == *bt
                                    && brow.map_or(true, |r| b < self.row_var[r]))
                        }
                    };
                    if better {
                        best = Some((t, Some(i)));
                    }
                }
            }
            match best {
                None => {
                    let step = if up { Rational::one() } else { -Rational::one() };
                    self.shift_nonbasic(k, step);
                }
                Some((t, None)) => {
                    let step = if up { t } else { -t };
                    self.shift_nonbasic(k, step);
                }
                Some((_, Some(i))) => {
                    let b = self.row_var[i];
                    let c = &self.a[i][k];
                    let rate_pos = c.is_positive() == up;
                    let target = if rate_pos {
                        self.upper[b].clone().unwrap()
                    } else {
                        self.lower[b].clone().unwrap()
                    };
                    self.pivot_and_update(i, k, target);
                }
            }
        }
    }

    fn shift_nonbasic(&mut self, k: usize, step: Rational) {
        let x = self.col_var[k];
        self.value[x] += &step;
        for i in 0..self.row_var.len() {
            if !self.a[i][k].is_zero() {
                let delta = &self.a[i][k] * &step;
                let b = self.row_var[i];
                self.value[b] += &delta;
            }
        }
    }

    /// Sets basic `row_var[i]` to `target` by moving the nonbasic variable
    /// at column `k`, then swaps the two.
    fn pivot_and_update(&mut self, i: usize, k: usize, target: Rational) {
        let b = self.row_var[i];
        let theta = &(&target - &self.value[b]) / &self.a[i][k];
        self.shift_nonbasic(k, theta);
        self.value[b] = target;
        self.pivot(i, k);
    }

    fn pivot(&mut self, i: usize, k: usize) {
        let b = self.row_var[i];
        let x = self.col_var[k];
        let piv = self.a[i][k].clone();
        let inv = piv.recip();
        let cols = self.col_var.len();
        // Row i now expresses x in terms of b and the other nonbasics.
        {
            let row = &mut self.a[i];
            for (j, c) in row.iter_mut().enumerate() {
                if j == k {
                    *c = inv.clone();
                } else if !c.is_zero() {
                    *c = -(&*c * &inv);
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.a[i]);
        for (r, row) in self.a.iter_mut().enumerate() {
            if r == i {
                continue;
            }
            let f = row[k].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..cols {
                if j == k {
                    row[j] = &f * &pivot_row[k];
                } else if !pivot_row[j].is_zero() {
                    let add = &f * &pivot_row[j];
                    row[j] += &add;
                }
            }
        }
        self.a[i] = pivot_row;
        self.row_var[i] = x;
        self.col_var[k] = b;
        self.pos[x] = Ok(i);
        self.pos[b] = Err(k);
    }
}
