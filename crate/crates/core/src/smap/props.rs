use std::collections::BTreeSet;

use super::{SMap, Tuple};
use crate::observable::check_state;
use crate::rational::Rational;

/// Consequences of the s-map axioms, each checked exhaustively by
/// [`check_propositions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    /// An orthogonal pair in any two positions forces zero.
    OrthogonalZero,
    /// `ν(a) = p(a, ..., a)` is a state.
    DiagonalState,
    /// `p(ā) <= ν(a_i)` for every `i`.
    DiagonalBound,
    /// A compatible pair `a_i, a_j` may both be replaced by `a_i ∧ a_j`.
    CompatibleMeetCollapse,
    /// A `1` in position `i` may be replaced by any other entry of the tuple.
    UnitReplacement,
    /// A repeated entry makes the value invariant under all permutations.
    RepeatPermutation,
    /// A compatible pair makes the value invariant under all permutations.
    CompatiblePermutation,
    /// A `1` at position `i`: constant on the replacement class at `i`.
    UnitClass,
    /// `a_i = a_j`, `i != j`: constant on the replacement class at `i`.
    RepeatClass,
    /// `a_i ↔ a_j`, `i != j`: constant on the replacement class at `i` of the
    /// tuple with both entries collapsed to their meet.
    CompatibleClass,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::OrthogonalZero,
        Property::DiagonalState,
        Property::DiagonalBound,
        Property::CompatibleMeetCollapse,
        Property::UnitReplacement,
        Property::RepeatPermutation,
        Property::CompatiblePermutation,
        Property::UnitClass,
        Property::RepeatClass,
        Property::CompatibleClass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::OrthogonalZero => "orthogonal-zero",
            Property::DiagonalState => "diagonal-state",
            Property::DiagonalBound => "diagonal-bound",
            Property::CompatibleMeetCollapse => "compatible-meet-collapse",
            Property::UnitReplacement => "unit-replacement",
            Property::RepeatPermutation => "repeat-permutation",
            Property::CompatiblePermutation => "compatible-permutation",
            Property::UnitClass => "unit-class",
            Property::RepeatClass => "repeat-class",
            Property::CompatibleClass => "compatible-class",
        }
    }
}

/// A failing instance: the tuples compared and their values. For a bound or a
/// zero check the second tuple is the reference cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyViolation {
    pub tuples: Vec<Tuple>,
    pub values: Vec<Rational>,
}

impl PropertyViolation {
    fn key(&self) -> (usize, &[Tuple]) {
        let distinct: BTreeSet<_> = self.tuples.iter().flatten().collect();
        (distinct.len(), &self.tuples)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyCheck {
    pub property: Property,
    pub instances: usize,
    pub failures: usize,
    /// The failing instance using the fewest distinct elements.
    pub witness: Option<PropertyViolation>,
}

impl PropertyCheck {
    fn new(property: Property) -> Self {
        PropertyCheck { property, instances: 0, failures: 0, witness: None }
    }

    fn record(&mut self, ok: bool, violation: impl FnOnce() -> PropertyViolation) {
        self.instances += 1;
        if ok {
            return;
        }
        self.failures += 1;
        let v = violation();
        if self.witness.as_ref().is_none_or(|w| v.key() < w.key()) {
            self.witness = Some(v);
        }
    }

    fn equal(&mut self, p: &SMap, lhs: &Tuple, rhs: &Tuple) {
        let (x, y) = (p.get(lhs), p.get(rhs));
        self.record(x == y, || PropertyViolation {
            tuples: vec![lhs.clone(), rhs.clone()],
            values: vec![x.clone(), y.clone()],
        });
    }

    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::holds)
    }

    pub fn check(&self, property: Property) -> &PropertyCheck {
        self.checks.iter().find(|c| c.property == property).expect("every property is checked")
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// The distinct rearrangements of `t`.
pub fn permutations_of(t: &[crate::lattice::Elem]) -> BTreeSet<Tuple> {
    all_permutations(t.len())
        .into_iter()
        .map(|perm| perm.iter().map(|&k| t[k]).collect())
        .collect()
}

/// `t` with position `i` overwritten by `t[k]` (0-based).
pub fn replace(t: &[crate::lattice::Elem], i: usize, k: usize) -> Tuple {
    let mut out = t.to_vec();
    out[i] = t[k];
    out
}

/// The union over `k` of all rearrangements of `replace(t, i, k)`.
pub fn permutation_class(t: &[crate::lattice::Elem], i: usize) -> BTreeSet<Tuple> {
    (0..t.len()).flat_map(|k| permutations_of(&replace(t, i, k))).collect()
}

/// Exhaustive check of every [`Property`] on every tuple.
pub fn check_propositions(p: &SMap) -> PropertyReport {
    let l = p.lattice();
    let n = p.arity();
    let one = l.one();
    let nu = p.derived_state();
    let diag = |e| vec![e; n];

    let mut orth = PropertyCheck::new(Property::OrthogonalZero);
    let mut state = PropertyCheck::new(Property::DiagonalState);
    let mut bound = PropertyCheck::new(Property::DiagonalBound);
    let mut collapse = PropertyCheck::new(Property::CompatibleMeetCollapse);
    let mut unit = PropertyCheck::new(Property::UnitReplacement);
    let mut repeat = PropertyCheck::new(Property::RepeatPermutation);
    let mut compat = PropertyCheck::new(Property::CompatiblePermutation);
    let mut unit_class = PropertyCheck::new(Property::UnitClass);
    let mut repeat_class = PropertyCheck::new(Property::RepeatClass);
    let mut compat_class = PropertyCheck::new(Property::CompatibleClass);

    let state_report = check_state(&nu);
    state.instances = l.len();
    state.failures = state_report.violations.len();
    state.witness = state_report.violations.first().map(|v| PropertyViolation {
        tuples: v.witness.iter().map(|&e| diag(e)).collect(),
        values: v.witness.iter().map(|&e| nu.value(e).clone()).collect(),
    });

    for t in p.space().iter() {
        let v = p.get(&t);
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));

        let orthogonal = pairs.clone().any(|(i, j)| l.is_orthogonal(t[i], t[j]));
        if orthogonal {
            orth.record(num_traits::Zero::is_zero(v), || PropertyViolation {
                tuples: vec![t.clone()],
                values: vec![v.clone()],
            });
        }

        for &e in &t {
            bound.record(v <= nu.value(e), || PropertyViolation {
                tuples: vec![t.clone(), diag(e)],
                values: vec![v.clone(), nu.value(e).clone()],
            });
        }

        let mut perms: Option<BTreeSet<Tuple>> = None;
        let mut perms = || perms.get_or_insert_with(|| permutations_of(&t)).clone();

        let compatible_pairs: Vec<(usize, usize)> =
            pairs.clone().filter(|&(i, j)| l.is_compatible(t[i], t[j])).collect();
        for &(i, j) in &compatible_pairs {
            let m = l.meet(t[i], t[j]);
            let mut c = t.clone();
            c[i] = m;
            c[j] = m;
            collapse.equal(p, &t, &c);
            for b in permutation_class(&c, i) {
                compat_class.equal(p, &t, &b);
            }
        }
        if !compatible_pairs.is_empty() {
            for b in perms() {
                compat.equal(p, &t, &b);
            }
        }

        for i in (0..n).filter(|&i| t[i] == one) {
            for j in (0..n).filter(|&j| j != i) {
                unit.equal(p, &t, &replace(&t, i, j));
            }
            for b in permutation_class(&t, i) {
                unit_class.equal(p, &t, &b);
            }
        }

        let repeated: Vec<usize> =
            pairs.filter(|&(i, j)| t[i] == t[j]).map(|(i, _)| i).collect();
        if !repeated.is_empty() {
            for b in perms() {
                repeat.equal(p, &t, &b);
            }
        }
        for i in repeated.into_iter().collect::<BTreeSet<_>>() {
            for b in permutation_class(&t, i) {
                repeat_class.equal(p, &t, &b);
            }
        }
    }

    PropertyReport {
        checks: vec![
            orth,
            state,
            bound,
            collapse,
            unit,
            repeat,
            compat,
            unit_class,
            repeat_class,
            compat_class,
        ],
    }
}
