use trapezoid_orders::catalog::{catalog_load, verify_paper, CatalogError, JawCopy, Scope, NAMES, PPUT_JAW, UGLY_JAWS};
use trapezoid_orders::classify::{is_interval_order, Class};
use trapezoid_orders::oracle::{holds_in_all, Layout, PropertyQuery, SearchOptions};

#[test]
fn every_entry_loads_with_provenance() {
    for name in NAMES {
        let e = catalog_load(name).unwrap();
        assert!(!e.provenance.is_empty(), "{name}");
        assert!(!e.assertions.is_empty(), "{name}");
        assert!(!is_interval_order(&e.poset), "{name}");
    }
    assert!(matches!(catalog_load("nope"), Err(CatalogError::Unknown(_))));
}

#[test]
fn larger_entries_contain_the_jaw() {
    let jaw = catalog_load("jaw").unwrap().poset;
    for name in ["nonparallel", "pput", "uglymess"] {
        let p = catalog_load(name).unwrap().poset;
        assert!(p.find_pattern(&jaw).is_some(), "{name}");
    }
    let ugly = catalog_load("uglymess").unwrap().poset;
    for copy in UGLY_JAWS.iter().chain([&PPUT_JAW]) {
        let host = if copy == &PPUT_JAW { catalog_load("pput").unwrap().poset } else { ugly.clone() };
        let r = host.restriction(&copy.ids()).unwrap();
        assert!(r.is_isomorphic(&jaw));
    }
}

#[test]
fn jaw_formula_holds_in_each_copy() {
    let p = catalog_load("uglymess").unwrap().poset;
    let lay = Layout::new(&p);
    for copy in UGLY_JAWS {
        let v = holds_in_all(&p, PropertyQuery::trapezoid(), &copy.formula(&lay), &SearchOptions::default());
        assert!(v.is_valid());
    }
    let jaw = catalog_load("jaw").unwrap().poset;
    assert!(holds_in_all(&jaw, PropertyQuery::trapezoid(), &JawCopy::IDENTITY.formula(&Layout::new(&jaw)), &SearchOptions::default()).is_valid());
}

#[test]
fn full_verification_passes() {
    for name in NAMES {
        let e = catalog_load(name).unwrap();
        let r = verify_paper(&e, None, Scope::All);
        assert!(r.all_pass(), "{r}");
        for c in &r.checks {
            if let Some(w) = &c.witness {
                assert_eq!(w.induced_order(), e.poset);
            }
        }
    }
}

#[test]
fn expected_classes() {
    let e = catalog_load("nonparallel").unwrap();
    assert!(e.expected.contains(&(Class::UTrap, true)));
    assert!(e.expected.contains(&(Class::Pgram, false)));
}
