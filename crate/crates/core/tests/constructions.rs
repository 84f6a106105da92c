mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use trapezoid_orders::constructions::{
    canonical_interval_rep, interval_order_proper_parallelogram, interval_order_unit_trapezoid,
    proper_parallelogram_from_interval_and_linear, semiorders_of_unit_parallelogram, unit_interval_rep,
    unit_parallelogram_from_semiorders, unit_trapezoid_from_interval_and_semiorder, ConstructionError,
};
use trapezoid_orders::poset::named::{three_plus_one, two_plus_two};
use trapezoid_orders::{Poset, Property, Rational, Representation, Trapezoid};

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn canonical_intervals_represent(n in 1usize..=8, seed in any::<u64>()) {
        let x = common::random_interval_order(&mut rng(seed), n);
        prop_assert_eq!(canonical_interval_rep(&x).unwrap().induced_order(), x);
    }

    #[test]
    fn unit_intervals_represent(n in 1usize..=8, seed in any::<u64>()) {
        let s = common::random_semiorder(&mut rng(seed), n);
        let m = unit_interval_rep(&s).unwrap();
        prop_assert_eq!(m.induced_order(), s);
        let lens: Vec<Rational> = m.iter().map(|(_, iv)| iv.length()).collect();
        prop_assert!(lens.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn interval_and_semiorder(n in 1usize..=7, seed in any::<u64>()) {
        let mut g = rng(seed);
        let x = common::random_interval_order(&mut g, n);
        let s = common::random_semiorder(&mut g, n);
        let r = unit_trapezoid_from_interval_and_semiorder(&x, &s).unwrap();
        prop_assert_eq!(r.induced_order(), x.intersection(&s).unwrap());
        prop_assert!(r.is_unit());
    }

    #[test]
    fn interval_and_linear(n in 1usize..=7, seed in any::<u64>()) {
        let mut g = rng(seed);
        let x = common::random_interval_order(&mut g, n);
        let l = common::random_linear_order(&mut g, n);
        let r = proper_parallelogram_from_interval_and_linear(&x, &l).unwrap();
        prop_assert_eq!(r.induced_order(), x.intersection(&l).unwrap());
        let f = r.property_set().unwrap();
        prop_assert!(f.contains(Property::Proper) && f.contains(Property::Parallelogram));
    }

    #[test]
    fn interval_orders_both_ways(n in 1usize..=7, seed in any::<u64>()) {
        let x = common::random_interval_order(&mut rng(seed), n);
        prop_assert!(interval_order_unit_trapezoid(&x).unwrap().is_unit());
        let pp = interval_order_proper_parallelogram(&x).unwrap();
        prop_assert_eq!(pp.induced_order(), x);
    }

    #[test]
    fn interval_order_with_its_own_extension(n in 1usize..=7, seed in any::<u64>()) {
        let mut g = rng(seed);
        let x = common::random_interval_order(&mut g, n);
        let l = common::random_linear_extension(&mut g, &x);
        let r = proper_parallelogram_from_interval_and_linear(&x, &l).unwrap();
        prop_assert_eq!(r.induced_order(), x);
    }

    #[test]
    fn semiorder_pairs_round_trip(n in 1usize..=6, seed in any::<u64>()) {
        let mut g = rng(seed);
        let s = common::random_semiorder(&mut g, n);
        let t = common::random_semiorder(&mut g, n);
        let r = unit_parallelogram_from_semiorders(&s, &t).unwrap();
        prop_assert_eq!(semiorders_of_unit_parallelogram(&r).unwrap(), (s, t));
    }
}

#[test]
fn wrong_inputs_are_rejected() {
    let x = two_plus_two();
    let chain = Poset::chain(x.ids());
    assert!(matches!(canonical_interval_rep(&x), Err(ConstructionError::NotIntervalOrder(_))));
    assert!(matches!(unit_interval_rep(&three_plus_one()), Err(ConstructionError::NotSemiorder { pattern: "3+1", .. })));
    assert!(matches!(
        proper_parallelogram_from_interval_and_linear(&chain, &Poset::antichain(x.ids())),
        Err(ConstructionError::NotLinear)
    ));
    let other = Poset::chain(&["p", "q", "r", "s"]);
    assert!(unit_trapezoid_from_interval_and_semiorder(&chain, &other).is_err());
}

#[test]
fn split_needs_unit_parallelograms() {
    let r = Representation::from_pairs([("a", Trapezoid::ints(0, 1, 0, 2)), ("b", Trapezoid::ints(3, 4, 3, 5))]).unwrap();
    assert!(matches!(semiorders_of_unit_parallelogram(&r), Err(ConstructionError::MissingProperties { .. })));
}

#[test]
fn degenerate_interval_order() {
    let a = Poset::antichain(&["a", "b", "c"]);
    let r = interval_order_unit_trapezoid(&a).unwrap();
    assert_eq!(r.induced_order(), a);
    assert!(r.is_unit());
}
