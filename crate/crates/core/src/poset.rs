//! Finite strict partial orders over opaque string ids.
//!
//! The relation is always stored transitively closed. Covers are recomputed
//! on demand.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PosetError {
    #[error("not a partial order: cycle through `{0}`")]
    NotAPartialOrder(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("invalid element id `{0}`")]
    InvalidId(String),
    #[error("ground sets differ")]
    GroundSetMismatch,
    #[error("`{0:?}` is not autonomous")]
    NotAutonomous(Vec<String>),
    #[error("order too large for exhaustive enumeration ({0} elements)")]
    TooLarge(usize),
}

/// A finite strict partial order.
#[derive(Clone)]
pub struct Poset {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `n * n`; `below[i * n + j]` means `ids[i] < ids[j]`.
    below: Vec<bool>,
}

/// Ids must survive the line-oriented file formats.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.ends_with(':')
        && id
            .chars()
            .all(|c| !c.is_whitespace() && c != '<' && c != '#')
}

impl Poset {
    pub fn empty() -> Self {
        Poset {
            ids: Vec::new(),
            index: HashMap::new(),
            below: Vec::new(),
        }
    }

    /// Builds the order generated by `covers` (any generating pairs, not
    /// necessarily covers) by transitive closure.
    pub fn build<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Self, PosetError> {
        let mut p = Self::with_elements(elements.iter().map(|s| s.as_ref().to_string()))?;
        let n = p.len();
        for (a, b) in covers {
            let i = p.require(a.as_ref())?;
            let j = p.require(b.as_ref())?;
            p.below[i * n + j] = true;
        }
        p.close()?;
        Ok(p)
    }

    /// Builds from index pairs over `elements`; used by generators and
    /// constructions that already work with indices.
    pub fn from_index_pairs(
        elements: Vec<String>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PosetError> {
        let mut p = Self::with_elements(elements)?;
        let n = p.len();
        for (i, j) in pairs {
            p.below[i * n + j] = true;
        }
        p.close()?;
        Ok(p)
    }

    /// A chain `ids[0] < ids[1] < ...`.
    pub fn chain<S: AsRef<str>>(ids: &[S]) -> Self {
        let elements: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        let n = elements.len();
        Self::from_index_pairs(elements, (1..n).map(|i| (i - 1, i))).expect("chain is an order")
    }

    pub fn antichain<S: AsRef<str>>(ids: &[S]) -> Self {
        let elements: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        Self::from_index_pairs(elements, []).expect("antichain is an order")
    }

    fn with_elements(elements: impl IntoIterator<Item = String>) -> Result<Self, PosetError> {
        let ids: Vec<String> = elements.into_iter().collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if !valid_id(id) {
                return Err(PosetError::InvalidId(id.clone()));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(PosetError::DuplicateElement(id.clone()));
            }
        }
        let n = ids.len();
        Ok(Poset {
            ids,
            index,
            below: vec![false; n * n],
        })
    }

    fn close(&mut self) -> Result<(), PosetError> {
        let n = self.len();
        for k in 0..n {
            for i in 0..n {
                if self.below[i * n + k] {
                    for j in 0..n {
                        if self.below[k * n + j] {
                            self.below[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            if self.below[i * n + i] {
                return Err(PosetError::NotAPartialOrder(self.ids[i].clone()));
            }
        }
        debug_assert!(self.check_axioms());
        Ok(())
    }

    /// Irreflexive, transitive and antisymmetric.
    pub fn check_axioms(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| !self.lt(i, i))
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    !(self.lt(i, j) && self.lt(j, i))
                        && (!self.lt(i, j) || (0..n).all(|k| !self.lt(j, k) || self.lt(i, k)))
                })
            })
    }

    fn require(&self, id: &str) -> Result<usize, PosetError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| PosetError::UnknownElement(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// `i < j` by index.
    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.below[i * self.ids.len() + j]
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.lt(i, j) || self.lt(j, i)
    }

    pub fn incomparable(&self, i: usize, j: usize) -> bool {
        i != j && !self.comparable(i, j)
    }

    /// `a < b` by id; false for unknown ids.
    pub fn less(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.lt(i, j),
            _ => false,
        }
    }

    pub fn parallel(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.incomparable(i, j),
            _ => false,
        }
    }

    /// All pairs `(i, j)` with `i < j`.
    pub fn relations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| self.lt(i, j)).map(move |j| (i, j)))
    }

    /// Unordered incomparable pairs `(i, j)` with `i < j` as indices.
    pub fn incomparable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.comparable(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        self.relations()
            .filter(|&(i, j)| !(0..n).any(|k| self.lt(i, k) && self.lt(k, j)))
            .collect()
    }

    pub fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.lt(i, j))
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.lt(i, j))
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.predecessors(j).next().is_none())
            .collect()
    }

    pub fn is_linear(&self) -> bool {
        self.incomparable_pairs().is_empty()
    }

    /// The same order with every relation reversed.
    pub fn dual(&self) -> Poset {
        let pairs: Vec<_> = self.relations().map(|(i, j)| (j, i)).collect();
        Self::from_index_pairs(self.ids.clone(), pairs).expect("dual of an order")
    }

    pub fn restriction<S: AsRef<str>>(&self, subset: &[S]) -> Result<Poset, PosetError> {
        let idx: Vec<usize> = subset
            .iter()
            .map(|s| self.require(s.as_ref()))
            .collect::<Result<_, _>>()?;
        Ok(self.restrict_indices(&idx))
    }

    pub fn restrict_indices(&self, idx: &[usize]) -> Poset {
        let elements: Vec<String> = idx.iter().map(|&i| self.ids[i].clone()).collect();
        let mut pairs = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                if self.lt(i, j) {
                    pairs.push((a, b));
                }
            }
        }
        Self::from_index_pairs(elements, pairs).expect("restriction of an order")
    }

    /// Renames every element through `f`.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> Result<Poset, PosetError> {
        let ids: Vec<String> = self.ids.iter().map(|s| f(s)).collect();
        Self::from_index_pairs(ids, self.relations().collect::<Vec<_>>())
    }

    /// Ids of `other` renamed so they avoid every id of `self`.
    fn disjoint_ids(&self, other: &Poset) -> Vec<String> {
        let mut taken: HashSet<String> = self.ids.iter().cloned().collect();
        taken.extend(other.ids.iter().cloned());
        other
            .ids
            .iter()
            .map(|id| {
                if !self.contains(id) {
                    return id.clone();
                }
                let mut k = 2;
                loop {
                    let cand = format!("{id}_{k}");
                    if !taken.contains(&cand) {
                        taken.insert(cand.clone());
                        return cand;
                    }
                    k += 1;
                }
            })
            .collect()
    }

    fn combine(&self, other: &Poset, series: bool) -> Poset {
        let n = self.len();
        let mut ids = self.ids.clone();
        ids.extend(self.disjoint_ids(other));
        let mut pairs: Vec<(usize, usize)> = self.relations().collect();
        pairs.extend(other.relations().map(|(i, j)| (i + n, j + n)));
        if series {
            for i in 0..n {
                for j in 0..other.len() {
                    pairs.push((i, j + n));
                }
            }
        }
        Self::from_index_pairs(ids, pairs).expect("sum of orders")
    }

    /// Every element of `self` below every element of `other`. Clashing
    /// ids of `other` get a `_k` suffix.
    pub fn series_sum(&self, other: &Poset) -> Poset {
        self.combine(other, true)
    }

    /// Disjoint union with no relations across.
    pub fn disjoint_union(&self, other: &Poset) -> Poset {
        self.combine(other, false)
    }

    pub fn same_ground_set(&self, other: &Poset) -> bool {
        self.len() == other.len() && self.ids.iter().all(|id| other.contains(id))
    }

    /// Relation-wise intersection over a shared ground set.
    pub fn intersection(&self, other: &Poset) -> Result<Poset, PosetError> {
        if !self.same_ground_set(other) {
            return Err(PosetError::GroundSetMismatch);
        }
        let map: Vec<usize> = self.ids.iter().map(|id| other.index[id]).collect();
        let pairs: Vec<_> = self
            .relations()
            .filter(|&(i, j)| other.lt(map[i], map[j]))
            .collect();
        Ok(Self::from_index_pairs(self.ids.clone(), pairs).expect("intersection of orders"))
    }

    /// `self ⊆ other` as relations on a shared ground set.
    pub fn is_extended_by(&self, other: &Poset) -> bool {
        self.same_ground_set(other)
            && self
                .relations()
                .all(|(i, j)| other.less(&self.ids[i], &self.ids[j]))
    }

    /// Per element: length of the longest chain ending there.
    pub fn levels(&self) -> Vec<usize> {
        let order = self.some_linear_extension_indices();
        let mut level = vec![0; self.len()];
        for &j in &order {
            level[j] = self.predecessors(j).map(|i| level[i] + 1).max().unwrap_or(0);
        }
        level
    }

    fn some_linear_extension_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        // Sorting by predecessor count is a topological order of a closed relation.
        idx.sort_by_key(|&j| (self.predecessors(j).count(), j));
        idx
    }

    /// A linear extension, as a chain over the same ids.
    pub fn some_linear_extension(&self) -> Poset {
        let order = self.some_linear_extension_indices();
        let ids: Vec<&str> = order.iter().map(|&i| self.ids[i].as_str()).collect();
        Poset::chain(&ids)
    }

    /// Linear extension as an id sequence from bottom to top.
    pub fn linear_extension_order(&self) -> Vec<String> {
        self.some_linear_extension_indices()
            .into_iter()
            .map(|i| self.ids[i].clone())
            .collect()
    }

    /// Number of linear extensions, by dynamic programming over down-sets.
    pub fn count_linear_extensions(&self) -> Result<u128, PosetError> {
        let n = self.len();
        if n > 24 {
            return Err(PosetError::TooLarge(n));
        }
        let pred_mask: Vec<u32> = (0..n)
            .map(|j| self.predecessors(j).fold(0u32, |m, i| m | (1 << i)))
            .collect();
        let mut ways = vec![0u128; 1 << n];
        ways[0] = 1;
        for mask in 0..(1usize << n) {
            let w = ways[mask];
            if w == 0 {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) == 0 && (pred_mask[j] as usize) & !mask == 0 {
                    ways[mask | (1 << j)] += w;
                }
            }
        }
        Ok(ways[(1 << n) - 1])
    }

    /// Searches for a relation-preserving bijection `self → other`.
    pub fn isomorphism(&self, other: &Poset) -> Option<HashMap<String, String>> {
        if self.len() != other.len() {
            return None;
        }
        let n = self.len();
        let sig = |p: &Poset| -> Vec<(usize, usize, usize)> {
            let lv = p.levels();
            (0..p.len())
                .map(|i| (p.predecessors(i).count(), p.successors(i).count(), lv[i]))
                .collect()
        };
        let (sa, sb) = (sig(self), sig(other));
        let mut ka = sa.clone();
        let mut kb = sb.clone();
        ka.sort();
        kb.sort();
        if ka != kb || self.relations().count() != other.relations().count() {
            return None;
        }
        let all: Vec<usize> = (0..n).collect();
        let map = embed(self, &all, other, &sa, &sb, true)?;
        Some(
            map.into_iter()
                .enumerate()
                .map(|(i, j)| (self.ids[i].clone(), other.ids[j].clone()))
                .collect(),
        )
    }

    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        self.isomorphism(other).is_some()
    }

    /// Finds an induced copy of `pattern`: an injective map from pattern ids
    /// to ids of `self` whose image restriction is isomorphic to `pattern`.
    pub fn find_pattern(&self, pattern: &Poset) -> Option<HashMap<String, String>> {
        if pattern.len() > self.len() {
            return None;
        }
        let sig = |p: &Poset| -> Vec<(usize, usize, usize)> {
            (0..p.len())
                .map(|i| (p.predecessors(i).count(), p.successors(i).count(), 0))
                .collect()
        };
        let all: Vec<usize> = (0..pattern.len()).collect();
        let map = embed(pattern, &all, self, &sig(pattern), &sig(self), false)?;
        Some(
            map.into_iter()
                .enumerate()
                .map(|(i, j)| (pattern.ids[i].clone(), self.ids[j].clone()))
                .collect(),
        )
    }

    /// Every element outside `set` is above all of it, below all of it, or
    /// incomparable to all of it.
    pub fn is_autonomous(&self, set: &[usize]) -> bool {
        let inside: HashSet<usize> = set.iter().copied().collect();
        (0..self.len()).filter(|z| !inside.contains(z)).all(|z| {
            let first = match set.first() {
                Some(&a) => (self.lt(z, a), self.lt(a, z)),
                None => return true,
            };
            set.iter().all(|&a| (self.lt(z, a), self.lt(a, z)) == first)
        })
    }

    /// All autonomous sets `A` with `2 <= |A| < |P|`, as sorted id lists.
    pub fn autonomous_sets(&self) -> Result<Vec<Vec<String>>, PosetError> {
        let n = self.len();
        if n > 24 {
            return Err(PosetError::TooLarge(n));
        }
        let mut out = Vec::new();
        for mask in 1u32..(1u32 << n).saturating_sub(1) {
            if mask.count_ones() < 2 {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if self.is_autonomous(&set) {
                let mut ids: Vec<String> = set.iter().map(|&i| self.ids[i].clone()).collect();
                ids.sort();
                out.push(ids);
            }
        }
        Ok(out)
    }

    /// Reverses the order inside an autonomous set, keeping everything else.
    pub fn reverse_autonomous<S: AsRef<str>>(&self, set: &[S]) -> Result<Poset, PosetError> {
        let idx: Vec<usize> = set
            .iter()
            .map(|s| self.require(s.as_ref()))
            .collect::<Result<_, _>>()?;
        if !self.is_autonomous(&idx) {
            return Err(PosetError::NotAutonomous(
                set.iter().map(|s| s.as_ref().to_string()).collect(),
            ));
        }
        let inside: HashSet<usize> = idx.iter().copied().collect();
        let pairs: Vec<_> = self
            .relations()
            .map(|(i, j)| {
                if inside.contains(&i) && inside.contains(&j) {
                    (j, i)
                } else {
                    (i, j)
                }
            })
            .collect();
        Ok(Self::from_index_pairs(self.ids.clone(), pairs).expect("reversal of autonomous set"))
    }

    /// Id-sorted relation pairs; a canonical value for comparisons and output.
    pub fn relation_ids(&self) -> BTreeSet<(String, String)> {
        self.relations()
            .map(|(i, j)| (self.ids[i].clone(), self.ids[j].clone()))
            .collect()
    }
}

/// Backtracking embedding of `pattern` (indices `order`) into `host`.
/// `exact` asks for a bijection with matching signatures.
fn embed(
    pattern: &Poset,
    order: &[usize],
    host: &Poset,
    psig: &[(usize, usize, usize)],
    hsig: &[(usize, usize, usize)],
    exact: bool,
) -> Option<Vec<usize>> {
    let k = pattern.len();
    // Most constrained first: larger comparability degree.
    let mut seq: Vec<usize> = order.to_vec();
    seq.sort_by_key(|&i| std::cmp::Reverse(psig[i].0 + psig[i].1));
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; host.len()];

    fn go(
        depth: usize,
        seq: &[usize],
        pattern: &Poset,
        host: &Poset,
        psig: &[(usize, usize, usize)],
        hsig: &[(usize, usize, usize)],
        exact: bool,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == seq.len() {
            return true;
        }
        let p = seq[depth];
        for h in 0..host.len() {
            if used[h] {
                continue;
            }
            if exact && psig[p] != hsig[h] {
                continue;
            }
            // An induced copy needs at least as much room in the host.
            if !exact && (hsig[h].0 < psig[p].0 || hsig[h].1 < psig[p].1) {
                continue;
            }
            let consistent = seq[..depth].iter().all(|&q| {
                let hq = map[q];
                pattern.lt(p, q) == host.lt(h, hq) && pattern.lt(q, p) == host.lt(hq, h)
            });
            if !consistent {
                continue;
            }
            map[p] = h;
            used[h] = true;
            if go(depth + 1, seq, pattern, host, psig, hsig, exact, map, used) {
                return true;
            }
            used[h] = false;
            map[p] = usize::MAX;
        }
        false
    }

    if go(0, &seq, pattern, host, psig, hsig, exact, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

impl PartialEq for Poset {
    /// Same ground set and same relation; element order is irrelevant.
    fn eq(&self, other: &Self) -> bool {
        self.same_ground_set(other) && self.relation_ids() == other.relation_ids()
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(i, j)| format!("{}<{}", self.ids[i], self.ids[j]))
            .collect();
        write!(f, "Poset[{}; {}]", self.ids.join(" "), covers.join(" "))
    }
}

/// Small named orders used throughout.
pub mod named {
    use super::Poset;

    /// Two disjoint 2-chains `a<b`, `c<d`.
    pub fn two_plus_two() -> Poset {
        Poset::build(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap()
    }

    /// A 3-chain `a<b<c` and an isolated `d`.
    pub fn three_plus_one() -> Poset {
        Poset::build(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c")]).unwrap()
    }
}
