mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use trapezoid_orders::lp::{ConstraintSystem, LinearConstraint, Relation, Solution};
use trapezoid_orders::Rational;

fn system(seed: u64) -> (usize, Vec<LinearConstraint>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let nvars = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=6);
    (nvars, (0..m).map(|_| common::random_constraint(&mut rng, nvars)).collect())
}

fn solve(nvars: usize, cons: &[LinearConstraint]) -> Solution {
    let mut sys = ConstraintSystem::new();
    for v in 0..nvars {
        sys.add_var(format!("x{v}"));
    }
    sys.extend(cons.iter().cloned());
    sys.solve()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn agrees_with_elimination(seed in any::<u64>()) {
        let (nvars, cons) = system(seed);
        let fm = common::fourier_motzkin(nvars, &cons);
        match solve(nvars, &cons) {
            Solution::Feasible(x) => {
                prop_assert!(fm);
                for c in &cons {
                    prop_assert!(c.holds(|v| x[v].clone()));
                }
            }
            Solution::Infeasible => prop_assert!(!fm),
        }
    }

    #[test]
    fn negation_splits_the_space(seed in any::<u64>(), a in -5i64..5, b in -5i64..5) {
        let (nvars, cons) = system(seed);
        let c = &cons[0];
        let point = |v: usize| Rational::from(if v % 2 == 0 { a } else { b });
        let neg_holds = c.negate().iter().any(|n| n.holds(point));
        prop_assert_ne!(c.holds(point), neg_holds);
        let _ = nvars;
    }
}

#[test]
fn strict_cycle_is_infeasible() {
    let mut sys = ConstraintSystem::new();
    let x = sys.add_var("x");
    let y = sys.add_var("y");
    sys.add(LinearConstraint::lt(x, y));
    sys.add(LinearConstraint::le(y, x));
    assert!(!sys.solve().is_feasible());
}

#[test]
fn strictness_is_respected() {
    let mut sys = ConstraintSystem::new();
    let x = sys.add_var("x");
    let y = sys.add_var("y");
    sys.add(LinearConstraint::lt(x, y));
    sys.add(LinearConstraint::new([(y, Rational::one()), (x, -Rational::one())], Relation::Le, Rational::new(1, 1000)));
    let Solution::Feasible(v) = sys.solve() else { panic!("feasible") };
    assert!(v[x] < v[y]);
}

#[test]
fn ground_constraints() {
    let mut sys = ConstraintSystem::new();
    sys.add(LinearConstraint::new([], Relation::Lt, Rational::zero()));
    assert!(!sys.solve().is_feasible());
    let mut sys = ConstraintSystem::new();
    sys.add(LinearConstraint::new([], Relation::Le, Rational::zero()));
    assert!(sys.solve().is_feasible());
}

#[test]
fn difference_detection() {
    let c = LinearConstraint::lt(0, 1);
    assert!(c.as_difference().is_some());
    let c = LinearConstraint::new([(0, Rational::from(2)), (1, -Rational::one())], Relation::Le, Rational::zero());
    assert!(c.as_difference().is_none());
}
