//! Explicit representations: interval representations of interval orders
//! and semiorders, and trapezoid representations built from them.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::classify::{find_two_plus_two, semiorder_obstruction};
use crate::geometry::{Interval, Property, PropertySet, Representation, Trapezoid};
use crate::lp::{ConstraintSystem, LinearConstraint, Relation, Solution};
use crate::poset::{Poset, PosetError};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("not an interval order: 2+2 on {0:?}")]
    NotIntervalOrder(BTreeMap<String, String>),
    #[error("not a semiorder: {pattern} on {occurrence:?}")]
    NotSemiorder {
        pattern: &'static str,
        occurrence: BTreeMap<String, String>,
    },
    #[error("not a linear order")]
    NotLinear,
    #[error("representation lacks {missing}")]
    MissingProperties { missing: PropertySet },
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

fn sorted(m: HashMap<String, String>) -> BTreeMap<String, String> {
    m.into_iter().collect()
}

/// One closed interval per element.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalMap {
    intervals: BTreeMap<String, Interval>,
}

impl IntervalMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, iv: Interval) {
        self.intervals.insert(id.into(), iv);
    }

    pub fn get(&self, id: &str) -> Option<&Interval> {
        self.intervals.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Interval)> {
        self.intervals.iter()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `x < y` iff the interval of `x` ends strictly before that of `y` starts.
    pub fn induced_order(&self) -> Poset {
        let ids: Vec<&String> = self.intervals.keys().collect();
        let ivs: Vec<&Interval> = self.intervals.values().collect();
        let n = ids.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if ivs[i].precedes(ivs[j]) {
                    pairs.push((i, j));
                }
            }
        }
        Poset::from_index_pairs(ids.iter().map(|s| s.to_string()).collect(), pairs)
            .expect("interval precedence is a strict order")
    }

    pub fn max_length(&self) -> Rational {
        self.intervals
            .values()
            .map(Interval::length)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, factor: &Rational) -> IntervalMap {
        assert!(factor.is_positive());
        let intervals = self
            .intervals
            .iter()
            .map(|(k, iv)| {
                (
                    k.clone(),
                    Interval::new(&iv.left * factor, &iv.right * factor).expect("positive scaling"),
                )
            })
            .collect();
        IntervalMap { intervals }
    }

    /// Distinct endpoint values in increasing order.
    pub fn endpoints(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self
            .intervals
            .values()
            .flat_map(|iv| [iv.left.clone(), iv.right.clone()])
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Smallest distance between two distinct endpoints.
    pub fn min_gap(&self) -> Option<Rational> {
        self.endpoints().windows(2).map(|w| &w[1] - &w[0]).min()
    }
}

fn check_induced(got: &Poset, want: &Poset, what: &str) -> Result<(), ConstructionError> {
    if got == want {
        Ok(())
    } else {
        Err(ConstructionError::SelfCheck(format!("{what}: induced order differs")))
    }
}

fn require_interval_order(p: &Poset) -> Result<(), ConstructionError> {
    match find_two_plus_two(p) {
        Some(occ) => Err(ConstructionError::NotIntervalOrder(sorted(occ))),
        None => Ok(()),
    }
}

fn require_semiorder(p: &Poset) -> Result<(), ConstructionError> {
    match semiorder_obstruction(p) {
        Some((pattern, occ)) => Err(ConstructionError::NotSemiorder {
            pattern,
            occurrence: sorted(occ),
        }),
        None => Ok(()),
    }
}

fn require_same_ground(p: &Poset, q: &Poset) -> Result<(), ConstructionError> {
    if p.same_ground_set(q) {
        Ok(())
    } else {
        Err(PosetError::GroundSetMismatch.into())
    }
}

fn check_flags(rep: &Representation, want: PropertySet, what: &str) -> Result<(), ConstructionError> {
    if rep.is_empty() {
        return Ok(());
    }
    let got = rep.property_set().expect("nonempty");
    if got.is_superset(want) {
        Ok(())
    } else {
        Err(ConstructionError::SelfCheck(format!("{what}: flags {got}, expected {want}")))
    }
}

/// Rank construction: the left end of `x` is the rank of its predecessor
/// set among all distinct predecessor sets, the right end is the reversed
/// rank of its successor set. Both families are chains under inclusion
/// exactly when the order has no 2+2.
pub fn canonical_interval_rep(x: &Poset) -> Result<IntervalMap, ConstructionError> {
    require_interval_order(x)?;
    let n = x.len();
    let preds: Vec<Vec<usize>> = (0..n).map(|j| x.predecessors(j).collect()).collect();
    let succs: Vec<Vec<usize>> = (0..n).map(|i| x.successors(i).collect()).collect();
    // Nested sets are ranked by size.
    let rank = |sets: &[Vec<usize>]| -> (Vec<usize>, usize) {
        let mut sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
        sizes.sort();
        sizes.dedup();
        let r = sets
            .iter()
            .map(|s| sizes.binary_search(&s.len()).expect("present"))
            .collect();
        (r, sizes.len())
    };
    let (left, _) = rank(&preds);
    let (right, distinct) = rank(&succs);
    let mut map = IntervalMap::new();
    for i in 0..n {
        let l = Rational::from(left[i]);
        let r = Rational::from(distinct - 1 - right[i]);
        let iv = Interval::new(l, r)
            .map_err(|e| ConstructionError::SelfCheck(format!("rank construction: {e}")))?;
        map.insert(x.id(i), iv);
    }
    check_induced(&map.induced_order(), x, "canonical interval representation")?;
    Ok(map)
}

/// Unit-length interval representation of a semiorder, found by solving
/// the difference system on left endpoints.
pub fn unit_interval_rep(s: &Poset) -> Result<IntervalMap, ConstructionError> {
    require_semiorder(s)?;
    let n = s.len();
    let mut sys = ConstraintSystem::new();
    for id in s.ids() {
        sys.add_var(format!("left({id})"));
    }
    let one = Rational::one();
    for i in 0..n {
        for j in 0..n {
            if s.lt(i, j) {
                // left(i) + 1 < left(j)
                sys.add(LinearConstraint::new(
                    [(i, one.clone()), (j, -one.clone())],
                    Relation::Lt,
                    -one.clone(),
                ));
            } else if i != j && !s.lt(j, i) {
                // left(i) <= left(j) + 1
                sys.add(LinearConstraint::new(
                    [(i, one.clone()), (j, -one.clone())],
                    Relation::Le,
                    one.clone(),
                ));
            }
        }
    }
    let Solution::Feasible(values) = sys.solve() else {
        return Err(ConstructionError::SelfCheck(
            "unit interval system infeasible for a semiorder".into(),
        ));
    };
    let mut map = IntervalMap::new();
    for (i, v) in values.into_iter().enumerate() {
        map.insert(s.id(i), Interval::new(v.clone(), v + Rational::one()).expect("length 1"));
    }
    check_induced(&map.induced_order(), s, "unit interval representation")?;
    Ok(map)
}

fn pair_up(lower: &IntervalMap, upper: &IntervalMap) -> Representation {
    let mut rep = Representation::new();
    for (id, lo) in lower.iter() {
        let up = upper.get(id).expect("same ground set");
        rep.insert(id.clone(), Trapezoid::new(lo.clone(), up.clone()))
            .expect("ids come from a poset");
    }
    rep
}

/// Unit trapezoid representation of the intersection of an interval order
/// `x` and a semiorder `s`: `x`'s intervals below, `s`'s unit intervals
/// above, each upper interval stretched so the two base lengths sum to a
/// common constant.
pub fn unit_trapezoid_from_interval_and_semiorder(
    x: &Poset,
    s: &Poset,
) -> Result<Representation, ConstructionError> {
    require_same_ground(x, s)?;
    require_interval_order(x)?;
    require_semiorder(s)?;
    let mut ix = canonical_interval_rep(x)?;
    let longest = ix.max_length();
    if longest.is_positive() {
        ix = ix.scaled(&longest.recip());
    }
    let is = unit_interval_rep(s)?;
    let gap = is.min_gap().unwrap_or_else(Rational::one);
    let factor = Rational::from(2) / gap;
    let factor = factor.max(Rational::one());
    let is = is.scaled(&factor);
    let k = factor;
    let before = is.endpoints();
    let mut stretched = IntervalMap::new();
    for (id, iv) in is.iter() {
        let bottom = ix.get(id).expect("same ground set").length();
        let right = &iv.left + &(&k + &Rational::one()) - bottom;
        stretched.insert(id.clone(), Interval::new(iv.left.clone(), right).expect("stretch is nonnegative"));
    }
    // Every endpoint moved by less than the minimum gap, so distinct
    // endpoints keep their relative order.
    let mut moved: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    for (id, iv) in is.iter() {
        let new = stretched.get(id).expect("present");
        moved.entry(iv.left.clone()).or_default().push(new.left.clone());
        moved.entry(iv.right.clone()).or_default().push(new.right.clone());
    }
    for w in before.windows(2) {
        let hi_of_lo = moved[&w[0]].iter().max().expect("nonempty");
        let lo_of_hi = moved[&w[1]].iter().min().expect("nonempty");
        if hi_of_lo >= lo_of_hi {
            return Err(ConstructionError::SelfCheck(format!(
                "stretching reordered endpoints {} and {}",
                w[0], w[1]
            )));
        }
    }
    let rep = pair_up(&ix, &stretched);
    check_induced(&rep.induced_order(), &x.intersection(s)?, "unit trapezoid construction")?;
    check_flags(&rep, PropertySet::of(&[Property::Unit]), "unit trapezoid construction")?;
    Ok(rep)
}

/// Proper parallelogram representation of the intersection of an interval
/// order `x` and a linear order `l`: `x`'s canonical intervals below, and
/// above, intervals of the same lengths laid out left to right in `l`-order
/// with gaps of 1.
pub fn proper_parallelogram_from_interval_and_linear(
    x: &Poset,
    l: &Poset,
) -> Result<Representation, ConstructionError> {
    require_same_ground(x, l)?;
    require_interval_order(x)?;
    if !l.is_linear() {
        return Err(ConstructionError::NotLinear);
    }
    let ix = canonical_interval_rep(x)?;
    let mut upper = IntervalMap::new();
    let mut cursor = Rational::zero();
    for id in l.linear_extension_order() {
        let len = ix.get(&id).expect("same ground set").length();
        let end = &cursor + &len;
        upper.insert(id, Interval::new(cursor, end.clone()).expect("nonnegative length"));
        cursor = end + Rational::one();
    }
    let rep = pair_up(&ix, &upper);
    check_induced(&rep.induced_order(), &x.intersection(l)?, "proper parallelogram construction")?;
    check_flags(
        &rep,
        PropertySet::of(&[Property::Proper, Property::Parallelogram]),
        "proper parallelogram construction",
    )?;
    Ok(rep)
}

/// An interval order is a unit trapezoid order: pair it with one of its
/// linear extensions, which is a semiorder.
pub fn interval_order_unit_trapezoid(i: &Poset) -> Result<Representation, ConstructionError> {
    require_interval_order(i)?;
    let l = i.some_linear_extension();
    let rep = unit_trapezoid_from_interval_and_semiorder(i, &l)?;
    check_induced(&rep.induced_order(), i, "interval order as unit trapezoid order")?;
    Ok(rep)
}

/// An interval order is a proper parallelogram order.
pub fn interval_order_proper_parallelogram(i: &Poset) -> Result<Representation, ConstructionError> {
    require_interval_order(i)?;
    let l = i.some_linear_extension();
    let rep = proper_parallelogram_from_interval_and_linear(i, &l)?;
    check_induced(&rep.induced_order(), i, "interval order as proper parallelogram order")?;
    Ok(rep)
}

/// Unit parallelogram representation of the intersection of two
/// semiorders: unit intervals of `s` below and of `t` above.
pub fn unit_parallelogram_from_semiorders(s: &Poset, t: &Poset) -> Result<Representation, ConstructionError> {
    require_same_ground(s, t)?;
    let lower = unit_interval_rep(s)?;
    let upper = unit_interval_rep(t)?;
    let rep = pair_up(&lower, &upper);
    check_induced(&rep.induced_order(), &s.intersection(t)?, "unit parallelogram construction")?;
    check_flags(
        &rep,
        PropertySet::of(&[Property::Unit, Property::Parallelogram]),
        "unit parallelogram construction",
    )?;
    Ok(rep)
}

/// The two baseline orders of a unit parallelogram representation; both
/// are semiorders and they intersect to the represented order.
pub fn semiorders_of_unit_parallelogram(rep: &Representation) -> Result<(Poset, Poset), ConstructionError> {
    let want = PropertySet::of(&[Property::Unit, Property::Parallelogram]);
    if !rep.is_empty() {
        let got = rep.property_set().expect("nonempty");
        if !got.is_superset(want) {
            return Err(ConstructionError::MissingProperties { missing: want });
        }
    }
    let lower = rep.baseline_order(false);
    let upper = rep.baseline_order(true);
    for b in [&lower, &upper] {
        if let Some((pattern, occ)) = semiorder_obstruction(b) {
            return Err(ConstructionError::SelfCheck(format!(
                "baseline order has {pattern} on {:?}",
                sorted(occ)
            )));
        }
    }
    check_induced(&lower.intersection(&upper)?, &rep.induced_order(), "baseline decomposition")?;
    Ok((lower, upper))
}
