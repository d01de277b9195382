//! States and finite observables on an orthomodular lattice.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::borel::BorelSet;
use crate::error::{Error, Result};
use crate::lattice::{Elem, Lattice};
use crate::rational::Rational;

pub(crate) fn same_lattice(a: &Arc<Lattice>, b: &Arc<Lattice>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A total assignment of rationals to lattice elements. Whether it is
/// actually a state is decided by [`check_state`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    lattice: Arc<Lattice>,
    values: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateAxiom {
    /// Every value lies in `[0, 1]`.
    Range,
    /// `s(0) = 0` and `s(1) = 1`.
    Normalization,
    /// `a ⊥ b` implies `s(a v b) = s(a) + s(b)`.
    Additivity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateViolation {
    pub axiom: StateAxiom,
    pub witness: Vec<Elem>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateReport {
    pub violations: Vec<StateViolation>,
}

impl StateReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fails(&self, axiom: StateAxiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

impl State {
    pub fn new(lattice: Arc<Lattice>, values: Vec<Rational>) -> Result<State> {
        if values.len() != lattice.len() {
            return Err(Error::Structural(format!(
                "state has {} values for {} elements",
                values.len(),
                lattice.len()
            )));
        }
        Ok(State { lattice, values })
    }

    /// Builds a state from a label map; every element must be present.
    pub fn from_labels(lattice: Arc<Lattice>, values: &BTreeMap<String, Rational>) -> Result<State> {
        let mut slots: Vec<Option<Rational>> = vec![None; lattice.len()];
        for (label, v) in values {
            let e = lattice.parse_element(label)?;
            slots[e.index()] = Some(v.clone());
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::Structural(format!("state has no value for {:?}", lattice.label(Elem(i))))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(State { lattice, values })
    }

    /// Extends atom weights additively through canonical decompositions.
    pub fn from_atom_weights(lattice: Arc<Lattice>, weight: impl Fn(Elem) -> Rational) -> State {
        let values = lattice
            .elements()
            .map(|e| lattice.canonical_decomposition(e).iter().map(|&a| weight(a)).sum())
            .collect();
        State { lattice, values }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn value(&self, e: Elem) -> &Rational {
        &self.values[e.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn to_labels(&self) -> BTreeMap<String, Rational> {
        self.lattice
            .elements()
            .map(|e| (self.lattice.label(e).to_string(), self.values[e.index()].clone()))
            .collect()
    }
}

/// Checks range, normalization and orthogonal additivity exhaustively.
pub fn check_state(s: &State) -> StateReport {
    let l = &s.lattice;
    let mut violations = Vec::new();
    for e in l.elements() {
        let v = s.value(e);
        if *v < Rational::zero() || *v > Rational::one() {
            violations.push(StateViolation { axiom: StateAxiom::Range, witness: vec![e] });
        }
    }
    if !s.value(l.zero()).is_zero() {
        violations.push(StateViolation { axiom: StateAxiom::Normalization, witness: vec![l.zero()] });
    }
    if !s.value(l.one()).is_one() {
        violations.push(StateViolation { axiom: StateAxiom::Normalization, witness: vec![l.one()] });
    }
    for a in l.elements() {
        for b in l.elements().filter(|&b| b >= a) {
            if l.is_orthogonal(a, b) && *s.value(l.join(a, b)) != s.value(a) + s.value(b) {
                violations.push(StateViolation { axiom: StateAxiom::Additivity, witness: vec![a, b] });
            }
        }
    }
    StateReport { violations }
}

/// A finite observable: a partition of unity into pairwise orthogonal nonzero
/// elements, indexed by its spectrum points in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    lattice: Arc<Lattice>,
    spectrum: Vec<Rational>,
    assign: Vec<Elem>,
}

impl Observable {
    pub fn new(lattice: Arc<Lattice>, pairs: impl IntoIterator<Item = (Rational, Elem)>) -> Result<Observable> {
        let mut pairs: Vec<(Rational, Elem)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("observable with empty spectrum".into()));
        }
        pairs.sort_by(|x, y| x.0.cmp(&y.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!("spectrum point {} listed twice", w[0].0)));
            }
        }
        for (t, e) in &pairs {
            if e.index() >= lattice.len() {
                return Err(Error::InvalidArgument(format!("element index {} out of range", e.index())));
            }
            if *e == lattice.zero() {
                return Err(Error::InvalidArgument(format!("spectrum point {t} is assigned zero")));
            }
        }
        for (i, (t, e)) in pairs.iter().enumerate() {
            for (u, f) in &pairs[i + 1..] {
                if !lattice.is_orthogonal(*e, *f) {
                    return Err(Error::InvalidArgument(format!(
                        "elements {:?} (at {t}) and {:?} (at {u}) are not orthogonal",
                        lattice.label(*e),
                        lattice.label(*f)
                    )));
                }
            }
        }
        let total = lattice.join_all(pairs.iter().map(|p| p.1));
        if total != lattice.one() {
            return Err(Error::InvalidArgument(format!(
                "assigned elements join to {:?}, not one",
                lattice.label(total)
            )));
        }
        let (spectrum, assign) = pairs.into_iter().unzip();
        Ok(Observable { lattice, spectrum, assign })
    }

    /// Builds from `point -> label`.
    pub fn from_labels(lattice: Arc<Lattice>, assign: &BTreeMap<Rational, String>) -> Result<Observable> {
        let pairs = assign
            .iter()
            .map(|(t, label)| Ok((t.clone(), lattice.parse_element(label)?)))
            .collect::<Result<Vec<_>>>()?;
        Observable::new(lattice, pairs)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn spectrum(&self) -> &[Rational] {
        &self.spectrum
    }

    /// `(point, element)` pairs in ascending point order.
    pub fn assignments(&self) -> impl Iterator<Item = (&Rational, Elem)> {
        self.spectrum.iter().zip(self.assign.iter().copied())
    }

    /// The join of the elements assigned to spectrum points inside `set`.
    pub fn apply(&self, set: &BorelSet) -> Elem {
        self.join_where(|t| set.contains(t))
    }

    /// `x({t})`, zero off the spectrum.
    pub fn at_point(&self, t: &Rational) -> Elem {
        self.join_where(|s| s == t)
    }

    /// `x((-inf, r))`.
    pub fn below(&self, r: &Rational) -> Elem {
        self.join_where(|t| t < r)
    }

    fn join_where(&self, keep: impl Fn(&Rational) -> bool) -> Elem {
        self.lattice.join_all(
            self.spectrum
                .iter()
                .zip(&self.assign)
                .filter(|(t, _)| keep(t))
                .map(|(_, &e)| e),
        )
    }

    /// Every element `x(E)`: joins of all subsets of the assigned elements.
    pub fn range(&self) -> BTreeSet<Elem> {
        let k = self.assign.len();
        assert!(k < usize::BITS as usize, "spectrum too large to enumerate its range");
        (0..1usize << k)
            .map(|mask| {
                self.lattice
                    .join_all((0..k).filter(|i| mask >> i & 1 == 1).map(|i| self.assign[i]))
            })
            .collect()
    }

    /// `g ∘ x`; `g` must be defined on the whole spectrum.
    pub fn compose(&self, g: &BTreeMap<Rational, Rational>) -> Result<Observable> {
        let mut image: BTreeMap<Rational, Elem> = BTreeMap::new();
        for (t, e) in self.assignments() {
            let gt = g
                .get(t)
                .ok_or_else(|| Error::InvalidArgument(format!("function undefined at spectrum point {t}")))?;
            let slot = image.entry(gt.clone()).or_insert(self.lattice.zero());
            *slot = self.lattice.join(*slot, e);
        }
        Observable::new(self.lattice.clone(), image)
    }

    /// Observables are compatible when every pair of assigned elements is.
    pub fn compatible_with(&self, other: &Observable) -> Result<bool> {
        if !same_lattice(&self.lattice, &other.lattice) {
            return Err(Error::InvalidArgument("observables live on different lattices".into()));
        }
        Ok(self
            .assign
            .iter()
            .all(|&e| other.assign.iter().all(|&f| self.lattice.is_compatible(e, f))))
    }
}

pub fn observables_compatible(x: &Observable, y: &Observable) -> Result<bool> {
    x.compatible_with(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_boolean, make_mo};
    use crate::rational::{int, ratio};

    fn mo3() -> Arc<Lattice> {
        Arc::new(make_mo(3).unwrap())
    }

    fn letter_obs(l: &Arc<Lattice>, letter: &str) -> Observable {
        let up = l.parse_element(letter).unwrap();
        Observable::new(l.clone(), [(int(1), up), (int(-1), l.ortho(up))]).unwrap()
    }

    fn reference_state(l: &Arc<Lattice>) -> State {
        let mut m = BTreeMap::new();
        for (x, v) in [("a", ratio(3, 10)), ("b", ratio(2, 5)), ("c", ratio(1, 2))] {
            m.insert(x.to_string(), v.clone());
            m.insert(format!("{x}'"), int(1) - v);
        }
        m.insert("0".into(), int(0));
        m.insert("1".into(), int(1));
        State::from_labels(l.clone(), &m).unwrap()
    }

    #[test]
    fn reference_state_passes() {
        let l = mo3();
        assert!(check_state(&reference_state(&l)).passed());
    }

    #[test]
    fn bad_normalization_and_additivity() {
        let l = mo3();
        let mut values = reference_state(&l).values().to_vec();
        values[l.one().index()] = ratio(9, 10);
        let report = check_state(&State::new(l.clone(), values).unwrap());
        assert!(report.fails(StateAxiom::Normalization));

        let mut values = reference_state(&l).values().to_vec();
        let (a, a_perp) = (l.parse_element("a").unwrap(), l.parse_element("a'").unwrap());
        values[a_perp.index()] = ratio(6, 10);
        let report = check_state(&State::new(l.clone(), values).unwrap());
        assert!(!report.fails(StateAxiom::Normalization));
        assert_eq!(
            report.violations.iter().find(|v| v.axiom == StateAxiom::Additivity).unwrap().witness,
            vec![a, a_perp]
        );
    }

    #[test]
    fn missing_state_value_is_structural() {
        let l = mo3();
        let mut m = reference_state(&l).to_labels();
        m.remove("b'");
        assert!(matches!(State::from_labels(l, &m), Err(Error::Structural(_))));
    }

    #[test]
    fn apply_half_lines() {
        let l = mo3();
        let x = letter_obs(&l, "a");
        assert_eq!(x.apply(&BorelSet::below(int(1))), l.parse_element("a'").unwrap());
        assert_eq!(x.apply(&BorelSet::below(int(2))), l.one());
        assert_eq!(x.apply(&BorelSet::below(int(-2))), l.zero());
        assert_eq!(x.apply(&BorelSet::point(int(1))), l.parse_element("a").unwrap());
    }

    #[test]
    fn ranges() {
        let l = mo3();
        let x = letter_obs(&l, "a");
        let names: Vec<&str> = x.range().into_iter().map(|e| l.label(e)).collect();
        assert_eq!(names, ["0", "a", "a'", "1"]);
        let constant = Observable::new(l.clone(), [(int(5), l.one())]).unwrap();
        assert_eq!(constant.range().len(), 2);
        assert_eq!(x.spectrum(), &[int(-1), int(1)]);
    }

    #[test]
    fn composition() {
        let l = mo3();
        let x = letter_obs(&l, "a");
        let id: BTreeMap<_, _> = x.spectrum().iter().map(|t| (t.clone(), t.clone())).collect();
        assert_eq!(x.compose(&id).unwrap(), x);

        let square: BTreeMap<_, _> = x.spectrum().iter().map(|t| (t.clone(), t * t)).collect();
        let sq = x.compose(&square).unwrap();
        assert_eq!(sq.spectrum(), &[int(1)]);
        assert_eq!(sq.at_point(&int(1)), l.one());

        let neg: BTreeMap<_, _> = x.spectrum().iter().map(|t| (t.clone(), -t)).collect();
        let flipped = x.compose(&neg).unwrap();
        assert_eq!(flipped.at_point(&int(1)), x.at_point(&int(-1)));
        assert_eq!(flipped.at_point(&int(-1)), x.at_point(&int(1)));

        let partial: BTreeMap<_, _> = [(int(1), int(0))].into_iter().collect();
        assert!(matches!(x.compose(&partial), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn compatibility_of_observables() {
        let l = mo3();
        let (x, y) = (letter_obs(&l, "a"), letter_obs(&l, "b"));
        assert!(!x.compatible_with(&y).unwrap());
        assert!(x.compatible_with(&x).unwrap());
        let constant = Observable::new(l.clone(), [(int(0), l.one())]).unwrap();
        assert!(x.compatible_with(&constant).unwrap());

        let other = Arc::new(make_boolean(2).unwrap());
        let z = Observable::new(other.clone(), [(int(0), other.one())]).unwrap();
        assert!(matches!(x.compatible_with(&z), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn invalid_observables() {
        let l = mo3();
        let (a, b) = (l.parse_element("a").unwrap(), l.parse_element("b").unwrap());
        assert!(Observable::new(l.clone(), [(int(0), a), (int(1), b)]).is_err());
        assert!(Observable::new(l.clone(), [(int(0), a)]).is_err());
        assert!(Observable::new(l.clone(), [(int(0), l.zero()), (int(1), l.one())]).is_err());
        assert!(Observable::new(l.clone(), Vec::new()).is_err());
    }
}
