mod common;

use std::sync::{Arc, OnceLock};

use common::{pair_observable, synthesized_maps};
use qlp_core::distribution::{
    check_f_properties, F_BOUNDS, F_COMPATIBLE_COMMUTATIVITY, F_LOWER_LIMIT, F_MONOTONE, F_UPPER_LIMIT,
};
use qlp_core::lattice::make_mo;
use qlp_core::rational::{int, ratio};
use qlp_core::smap::{check_propositions, complete, validate, Property};
use qlp_core::{reference, Observable, SMap};

/// The reference table followed by 20 synthesized maps.
fn maps() -> &'static [SMap] {
    static MAPS: OnceLock<Vec<SMap>> = OnceLock::new();
    MAPS.get_or_init(|| {
        let l = reference::lattice();
        let mut out = vec![complete(&reference::partial(&l, false).unwrap()).unwrap().map];
        out.extend(synthesized_maps(3, 20));
        out
    })
}

fn assert_property(property: Property) {
    for (k, p) in maps().iter().enumerate() {
        assert!(validate(p).passed(), "map {k} is invalid");
        let check = check_propositions(p).check(property).clone();
        assert!(check.holds(), "map {k}: {} fails, witness {:?}", property.name(), check.witness);
    }
    let reference = check_propositions(&maps()[0]).check(property).clone();
    assert!(reference.instances > 0, "{} has no instance on the reference table", property.name());
}

macro_rules! property_tests {
    ($($name:ident => $property:expr,)*) => {
        $(
            #[test]
            fn $name() {
                assert_property($property);
            }
        )*
    };
}

property_tests! {
    orthogonal_pair_anywhere_gives_zero => Property::OrthogonalZero,
    diagonal_is_a_state => Property::DiagonalState,
    value_bounded_by_each_diagonal => Property::DiagonalBound,
    compatible_neighbours_collapse_to_meet => Property::CompatibleMeetCollapse,
    unit_replaced_by_present_entry => Property::UnitReplacement,
    repeated_entry_permits_any_permutation => Property::RepeatPermutation,
    compatible_pair_permits_any_permutation => Property::CompatiblePermutation,
    unit_replacement_class => Property::UnitClass,
    repeat_replacement_class => Property::RepeatClass,
    compatible_replacement_class => Property::CompatibleClass,
}

/// Observable systems for a map: pair observables on distinct complementary
/// pairs, and a system with a repeated observable so that two coordinates are
/// compatible.
fn systems(p: &SMap) -> Vec<Vec<Observable>> {
    let l: &Arc<_> = p.lattice();
    let atoms: Vec<_> = l.atoms().iter().copied().filter(|&a| a.index() % 2 == 1).collect();
    let n = p.arity();
    let distinct: Vec<Observable> = (0..n).map(|i| pair_observable(l, atoms[i % atoms.len()])).collect();
    let mut repeated = distinct.clone();
    repeated[1] = repeated[0].compose(&[(int(1), int(1)), (int(-1), int(-1))].into_iter().collect()).unwrap();
    let mut scaled = distinct.clone();
    scaled[n - 1] = scaled[n - 1].compose(&[(int(1), ratio(1, 2)), (int(-1), int(3))].into_iter().collect()).unwrap();
    vec![distinct, repeated, scaled]
}

fn assert_f_property(name: &str, expect_instances: bool) {
    let mut instances = 0;
    for (k, p) in maps().iter().enumerate() {
        for (j, xs) in systems(p).iter().enumerate() {
            let refs: Vec<&Observable> = xs.iter().collect();
            let report = check_f_properties(p, &refs).unwrap();
            let check = report.check(name).unwrap();
            assert!(check.holds(), "map {k}, system {j}: {name} fails, witness {:?}", check.witness);
            instances += check.instances;
        }
    }
    assert_eq!(instances > 0, expect_instances, "{name}");
}

#[test]
fn distribution_function_bounds() {
    assert_f_property(F_BOUNDS, true);
}

#[test]
fn distribution_function_monotone() {
    assert_f_property(F_MONOTONE, true);
}

#[test]
fn distribution_function_upper_limits() {
    assert_f_property(F_UPPER_LIMIT, true);
}

#[test]
fn distribution_function_lower_limits() {
    assert_f_property(F_LOWER_LIMIT, true);
}

#[test]
fn distribution_function_compatible_commutativity() {
    assert_f_property(F_COMPATIBLE_COMMUTATIVITY, true);
}

#[test]
fn violations_come_with_a_smallest_witness() {
    let l = Arc::new(make_mo(2).unwrap());
    // Symmetric in nothing, zero nowhere: breaks the axioms and most properties.
    let p = SMap::from_fn(l.clone(), 2, |t| ratio((t[0].index() + 1) as i64, (t[1].index() + 7) as i64)).unwrap();
    assert!(!validate(&p).passed());
    let report = check_propositions(&p);
    assert!(!report.passed());
    for check in report.checks.iter().filter(|c| !c.holds()) {
        let w = check.witness.as_ref().expect("failing check has a witness");
        assert!(!w.tuples.is_empty());
        assert_eq!(w.tuples.len(), w.values.len());
    }
    let zero = report.check(Property::OrthogonalZero);
    let w = zero.witness.as_ref().unwrap();
    assert!(w.tuples[0].iter().collect::<std::collections::BTreeSet<_>>().len() <= 2);
}
