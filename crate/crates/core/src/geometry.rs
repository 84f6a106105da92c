//! Trapezoids spanning two parallel baselines, at heights 0 (lower) and 1
//! (upper), with exact rational endpoints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::poset::{valid_id, Poset, PosetError};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("empty representation")]
    Empty,
    #[error("interval [{0}, {1}] has left endpoint above right endpoint")]
    ReversedInterval(Rational, Rational),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(Rational),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("invalid element id `{0}`")]
    InvalidId(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Closed interval `[left, right]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    pub fn new(left: Rational, right: Rational) -> Result<Self, GeometryError> {
        if left > right {
            return Err(GeometryError::ReversedInterval(left, right));
        }
        Ok(Interval { left, right })
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    /// Strictly left of `other`.
    pub fn precedes(&self, other: &Interval) -> bool {
        self.right < other.left
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Interval {
        Interval {
            left: f(&self.left),
            right: f(&self.right),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

/// Lower interval `[l, r]` on the baseline at height 0 and upper interval
/// `[L, R]` at height 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trapezoid {
    pub lower: Interval,
    pub upper: Interval,
}

impl Trapezoid {
    pub fn new(lower: Interval, upper: Interval) -> Self {
        Trapezoid { lower, upper }
    }

    /// From the four endpoints `l, r, L, R`.
    pub fn from_endpoints(
        l: Rational,
        r: Rational,
        big_l: Rational,
        big_r: Rational,
    ) -> Result<Self, GeometryError> {
        Ok(Trapezoid {
            lower: Interval::new(l, r)?,
            upper: Interval::new(big_l, big_r)?,
        })
    }

    /// Convenience for tests and literals: integer endpoints.
    pub fn ints(l: i64, r: i64, big_l: i64, big_r: i64) -> Self {
        Self::from_endpoints(l.into(), r.into(), big_l.into(), big_r.into())
            .expect("ordered endpoints")
    }

    pub fn bottom_length(&self) -> Rational {
        self.lower.length()
    }

    pub fn top_length(&self) -> Rational {
        self.upper.length()
    }

    /// Sum of the base lengths; twice the area at baseline distance 1.
    pub fn base_sum(&self) -> Rational {
        self.bottom_length() + self.top_length()
    }

    pub fn area(&self) -> Rational {
        self.base_sum() / Rational::from_integer(2)
    }

    pub fn is_parallelogram(&self) -> bool {
        self.bottom_length() == self.top_length()
    }

    pub fn is_rectangle(&self) -> bool {
        self.lower == self.upper
    }

    /// `self` lies entirely left of `other`: strict on both baselines.
    pub fn left_of(&self, other: &Trapezoid) -> bool {
        self.lower.precedes(&other.lower) && self.upper.precedes(&other.upper)
    }

    /// Cross-section at height `h ∈ [0, 1]`.
    pub fn section(&self, h: &Rational) -> Interval {
        let one_minus = &Rational::one() - h;
        Interval {
            left: &(&one_minus * &self.lower.left) + &(h * &self.upper.left),
            right: &(&one_minus * &self.lower.right) + &(h * &self.upper.right),
        }
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational + Copy) -> Trapezoid {
        Trapezoid {
            lower: self.lower.map(f),
            upper: self.upper.map(f),
        }
    }
}

/// True iff `outer` contains `inner` and the two differ. Each side of a
/// trapezoid is a segment, so containment at both baselines implies
/// containment at every height.
pub fn properly_contains(outer: &Trapezoid, inner: &Trapezoid) -> bool {
    outer.lower.contains(&inner.lower) && outer.upper.contains(&inner.upper) && outer != inner
}

/// Geometric properties a representation can have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Proper,
    Unit,
    Parallelogram,
    Rectangle,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::Proper,
        Property::Unit,
        Property::Parallelogram,
        Property::Rectangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Proper => "proper",
            Property::Unit => "unit",
            Property::Parallelogram => "parallelogram",
            Property::Rectangle => "rectangle",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// A subset of [`Property`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PropertySet(u8);

impl PropertySet {
    pub fn empty() -> Self {
        PropertySet(0)
    }

    pub fn all() -> Self {
        PropertySet(0b1111)
    }

    pub fn of(props: &[Property]) -> Self {
        props.iter().fold(Self::empty(), |s, &p| s.with(p))
    }

    /// All 16 subsets, in bitmask order.
    pub fn every_subset() -> impl Iterator<Item = PropertySet> {
        (0u8..16).map(PropertySet)
    }

    pub fn with(self, p: Property) -> Self {
        PropertySet(self.0 | p.bit())
    }

    pub fn contains(self, p: Property) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn is_superset(self, other: PropertySet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Property> {
        Property::ALL.into_iter().filter(move |&p| self.contains(p))
    }

    /// Parses a comma-separated list; `trapezoid` is accepted and adds
    /// nothing, since every representation is a trapezoid representation.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut out = Self::empty();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            out = match tok {
                "trapezoid" => out,
                "proper" => out.with(Property::Proper),
                "unit" => out.with(Property::Unit),
                "parallelogram" | "pgram" => out.with(Property::Parallelogram),
                "rectangle" => out.with(Property::Rectangle),
                other => return Err(format!("unknown property `{other}`")),
            };
        }
        Ok(out)
    }
}

impl fmt::Debug for PropertySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

impl fmt::Display for PropertySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "trapezoid");
        }
        let names: Vec<&str> = self.iter().map(Property::name).collect();
        write!(f, "{}", names.join(","))
    }
}

/// Elementary edits of a representation.
#[derive(Debug, Clone)]
pub enum Transform {
    Restrict(Vec<String>),
    Translate(Rational),
    Scale(Rational),
    Concat(Representation),
}

/// Trapezoids keyed by element id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Representation {
    traps: BTreeMap<String, Trapezoid>,
}

impl Representation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, t: Trapezoid) -> Result<(), GeometryError> {
        let id = id.into();
        if !valid_id(&id) {
            return Err(GeometryError::InvalidId(id));
        }
        self.traps.insert(id, t);
        Ok(())
    }

    pub fn from_pairs<S: Into<String>>(
        pairs: impl IntoIterator<Item = (S, Trapezoid)>,
    ) -> Result<Self, GeometryError> {
        let mut rep = Self::new();
        for (id, t) in pairs {
            rep.insert(id, t)?;
        }
        Ok(rep)
    }

    pub fn len(&self) -> usize {
        self.traps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traps.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Trapezoid> {
        self.traps.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Trapezoid)> {
        self.traps.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &String> {
        self.traps.keys()
    }

    /// `x < y` iff the trapezoid of `x` lies left of that of `y`.
    pub fn induced_order(&self) -> Poset {
        let ids: Vec<String> = self.traps.keys().cloned().collect();
        let ts: Vec<&Trapezoid> = self.traps.values().collect();
        let mut pairs = Vec::new();
        for (i, a) in ts.iter().enumerate() {
            for (j, b) in ts.iter().enumerate() {
                if a.left_of(b) {
                    pairs.push((i, j));
                }
            }
        }
        Poset::from_index_pairs(ids, pairs).expect("left-of is a strict order")
    }

    /// Interval order induced by one baseline alone.
    pub fn baseline_order(&self, upper: bool) -> Poset {
        let ids: Vec<String> = self.traps.keys().cloned().collect();
        let ivs: Vec<&Interval> = self
            .traps
            .values()
            .map(|t| if upper { &t.upper } else { &t.lower })
            .collect();
        let mut pairs = Vec::new();
        for (i, a) in ivs.iter().enumerate() {
            for (j, b) in ivs.iter().enumerate() {
                if a.precedes(b) {
                    pairs.push((i, j));
                }
            }
        }
        Poset::from_index_pairs(ids, pairs).expect("interval order")
    }

    pub fn is_proper(&self) -> bool {
        let ts: Vec<&Trapezoid> = self.traps.values().collect();
        ts.iter()
            .all(|a| ts.iter().all(|b| !properly_contains(a, b)))
    }

    /// Equal, positive base sums (equal areas at baseline distance 1).
    pub fn is_unit(&self) -> bool {
        let mut sums = self.traps.values().map(Trapezoid::base_sum);
        match sums.next() {
            Some(first) => first.is_positive() && sums.all(|s| s == first),
            None => false,
        }
    }

    pub fn property_set(&self) -> Result<PropertySet, GeometryError> {
        if self.is_empty() {
            return Err(GeometryError::Empty);
        }
        let mut set = PropertySet::empty();
        if self.is_proper() {
            set = set.with(Property::Proper);
        }
        if self.is_unit() {
            set = set.with(Property::Unit);
        }
        if self.traps.values().all(Trapezoid::is_parallelogram) {
            set = set.with(Property::Parallelogram);
        }
        if self.traps.values().all(Trapezoid::is_rectangle) {
            set = set.with(Property::Rectangle);
        }
        Ok(set)
    }

    /// Least and greatest endpoint over both baselines.
    pub fn extent(&self) -> Option<(Rational, Rational)> {
        let mut it = self
            .traps
            .values()
            .flat_map(|t| [&t.lower.left, &t.lower.right, &t.upper.left, &t.upper.right]);
        let first = it.next()?.clone();
        Some(it.fold((first.clone(), first), |(lo, hi), x| {
            (lo.min(x.clone()), hi.max(x.clone()))
        }))
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational + Copy) -> Representation {
        Representation {
            traps: self.traps.iter().map(|(k, t)| (k.clone(), t.map(f))).collect(),
        }
    }

    pub fn transform(&self, kind: &Transform) -> Result<Representation, GeometryError> {
        match kind {
            Transform::Restrict(ids) => {
                let mut out = Representation::new();
                for id in ids {
                    let t = self
                        .traps
                        .get(id)
                        .ok_or_else(|| GeometryError::UnknownElement(id.clone()))?;
                    out.traps.insert(id.clone(), t.clone());
                }
                Ok(out)
            }
            Transform::Translate(dx) => Ok(self.map(|x| x + dx)),
            Transform::Scale(c) => {
                if !c.is_positive() {
                    return Err(GeometryError::NonPositiveScale(c.clone()));
                }
                Ok(self.map(|x| x * c))
            }
            Transform::Concat(other) => Ok(self.concat(other)),
        }
    }

    /// Places `other` strictly right of `self` on both baselines. Clashing
    /// ids of `other` get a `_k` suffix, as in [`Poset::series_sum`].
    pub fn concat(&self, other: &Representation) -> Representation {
        let (Some((_, hi)), Some((lo, _))) = (self.extent(), other.extent()) else {
            let mut out = self.clone();
            out.traps.extend(other.traps.clone());
            return out;
        };
        let shift = &(&hi - &lo) + &Rational::one();
        let moved = other.map(|x| x + &shift);
        let mut out = self.clone();
        let mut taken: BTreeSet<String> = self.traps.keys().cloned().collect();
        taken.extend(other.traps.keys().cloned());
        for (id, t) in moved.traps {
            let mut name = id.clone();
            if self.traps.contains_key(&id) {
                let mut k = 2;
                loop {
                    name = format!("{id}_{k}");
                    if !taken.contains(&name) {
                        break;
                    }
                    k += 1;
                }
                taken.insert(name.clone());
            }
            out.traps.insert(name, t);
        }
        out
    }
}
