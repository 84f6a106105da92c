#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use trapezoid_orders::lp::{LinearConstraint, Relation};
use trapezoid_orders::{Interval, Poset, Rational, Representation, Trapezoid};

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// Order generated by a random set of pairs `i<j` (natural labeling).
pub fn random_poset(rng: &mut impl Rng, n: usize, density: f64) -> Poset {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    Poset::from_index_pairs(ids(n), pairs).unwrap()
}

/// Poset from the pairs encoded in `bits` over the ordered pairs `i<j`.
pub fn poset_from_bits(n: usize, bits: u64) -> Poset {
    let mut pairs = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits >> k & 1 == 1 {
                pairs.push((i, j));
            }
            k += 1;
        }
    }
    Poset::from_index_pairs(ids(n), pairs).unwrap()
}

/// Every labeled strict partial order on `n` elements.
pub fn all_labeled_posets(n: usize) -> Vec<Poset> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let rel: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let has = |a: usize, b: usize| rel.contains(&(a, b));
        let antisym = rel.iter().all(|&(a, b)| !has(b, a));
        let trans = rel.iter().all(|&(a, b)| (0..n).all(|c| !has(b, c) || has(a, c)));
        if antisym && trans {
            out.push(Poset::from_index_pairs(ids(n), rel).unwrap());
        }
    }
    out
}

pub fn random_intervals(rng: &mut impl Rng, n: usize, max: i64) -> Vec<(i64, i64)> {
    (0..n)
        .map(|_| {
            let a = rng.gen_range(0..=max);
            let b = rng.gen_range(0..=max);
            (a.min(b), a.max(b))
        })
        .collect()
}

fn precedence_order(n: usize, ivs: &[(Rational, Rational)]) -> Poset {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if ivs[i].1 < ivs[j].0 {
                pairs.push((i, j));
            }
        }
    }
    Poset::from_index_pairs(ids(n), pairs).unwrap()
}

pub fn random_interval_order(rng: &mut impl Rng, n: usize) -> Poset {
    let ivs: Vec<(Rational, Rational)> = random_intervals(rng, n, 2 * n as i64)
        .into_iter()
        .map(|(a, b)| (Rational::from(a), Rational::from(b)))
        .collect();
    precedence_order(n, &ivs)
}

/// Unit intervals with left ends on a grid of quarters.
pub fn random_semiorder(rng: &mut impl Rng, n: usize) -> Poset {
    let ivs: Vec<(Rational, Rational)> = (0..n)
        .map(|_| {
            let l = Rational::new(rng.gen_range(0..=4 * n as i64), 4);
            let r = &l + &Rational::one();
            (l, r)
        })
        .collect();
    precedence_order(n, &ivs)
}

pub fn random_linear_order(rng: &mut impl Rng, n: usize) -> Poset {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    let pairs: Vec<(usize, usize)> = v.windows(2).map(|w| (w[0], w[1])).collect();
    Poset::from_index_pairs(ids(n), pairs).unwrap()
}

/// A uniformly shuffled topological order of `p`, as a chain.
pub fn random_linear_extension(rng: &mut impl Rng, p: &Poset) -> Poset {
    let n = p.len();
    let mut placed = vec![false; n];
    let mut seq = Vec::new();
    while seq.len() < n {
        let ready: Vec<usize> = (0..n)
            .filter(|&j| !placed[j] && p.predecessors(j).all(|i| placed[i]))
            .collect();
        let &j = ready.choose(rng).unwrap();
        placed[j] = true;
        seq.push(j);
    }
    let pairs: Vec<(usize, usize)> = seq.windows(2).map(|w| (w[0], w[1])).collect();
    Poset::from_index_pairs(p.ids().to_vec(), pairs).unwrap()
}

pub fn random_trapezoid(rng: &mut impl Rng, max: i64) -> Trapezoid {
    let (l, r) = random_intervals(rng, 1, max)[0];
    let (a, b) = random_intervals(rng, 1, max)[0];
    Trapezoid::ints(l, r, a, b)
}

pub fn random_rep(rng: &mut impl Rng, n: usize, max: i64) -> Representation {
    Representation::from_pairs(ids(n).into_iter().map(|id| (id, random_trapezoid(rng, max)))).unwrap()
}

/// Random representation with constant base sum `c`.
pub fn random_unit_rep(rng: &mut impl Rng, n: usize, c: i64, max: i64) -> Representation {
    let traps = ids(n).into_iter().map(|id| {
        let b = rng.gen_range(0..=c);
        let l = rng.gen_range(0..=max);
        let big_l = rng.gen_range(0..=max);
        (id, Trapezoid::ints(l, l + b, big_l, big_l + c - b))
    });
    Representation::from_pairs(traps).unwrap()
}

pub fn interval(a: i64, b: i64) -> Interval {
    Interval::new(Rational::from(a), Rational::from(b)).unwrap()
}

/// Random constraint over `nvars` variables with small integer data.
pub fn random_constraint(rng: &mut impl Rng, nvars: usize) -> LinearConstraint {
    let terms: Vec<(usize, Rational)> = (0..nvars)
        .filter_map(|v| {
            let c = rng.gen_range(-3i64..=3);
            (c != 0).then(|| (v, Rational::from(c)))
        })
        .collect();
    let rel = match rng.gen_range(0..3) {
        0 => Relation::Lt,
        1 => Relation::Le,
        _ => Relation::Eq,
    };
    LinearConstraint::new(terms, rel, Rational::from(rng.gen_range(-4i64..=4)))
}

/// Fourier–Motzkin elimination: an independent feasibility oracle for
/// small systems over the rationals.
pub fn fourier_motzkin(nvars: usize, cons: &[LinearConstraint]) -> bool {
    // (coefficients, strict, rhs) meaning sum <= rhs or sum < rhs
    let mut rows: Vec<(Vec<Rational>, bool, Rational)> = Vec::new();
    for c in cons {
        let mut coef = vec![Rational::zero(); nvars];
        for (v, a) in c.terms() {
            coef[*v] = a.clone();
        }
        match c.rel {
            Relation::Lt => rows.push((coef, true, c.rhs.clone())),
            Relation::Le => rows.push((coef, false, c.rhs.clone())),
            Relation::Eq => {
                let neg: Vec<Rational> = coef.iter().map(|a| -a.clone()).collect();
                rows.push((coef, false, c.rhs.clone()));
                rows.push((neg, false, -c.rhs.clone()));
            }
        }
    }
    for x in 0..nvars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.0[x].is_positive() {
                pos.push(r);
            } else if r.0[x].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for q in &neg {
                let a = p.0[x].clone();
                let b = -q.0[x].clone();
                let coef: Vec<Rational> = (0..nvars).map(|k| &(&p.0[k] * &b) + &(&q.0[k] * &a)).collect();
                let rhs = &(&p.2 * &b) + &(&q.2 * &a);
                rest.push((coef, p.1 || q.1, rhs));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, strict, rhs)| if *strict { rhs.is_positive() } else { !rhs.is_negative() })
}
