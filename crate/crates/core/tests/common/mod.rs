//! Test oracles that share no code with the library's solvers.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use qlp_core::lattice::Lattice;
use qlp_core::lp::Relation;
use qlp_core::smap::TupleSpace;
use qlp_core::synth::{Certificate, ConstraintSet, RowOrigin, Symmetry};
use qlp_core::{Elem, Rational, SMap, State};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Row = BTreeMap<usize, Rational>;

/// Incremental Gaussian elimination over the rationals.
#[derive(Default)]
pub struct Elimination {
    pivots: Vec<(usize, Row, Rational)>,
    pub inconsistent: bool,
}

impl Elimination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut row: Row, mut rhs: Rational) {
        for (col, prow, prhs) in &self.pivots {
            let Some(k) = row.get(col).cloned() else { continue };
            for (j, v) in prow {
                let e = row.entry(*j).or_insert_with(Rational::zero);
                *e -= &k * v;
                if e.is_zero() {
                    row.remove(j);
                }
            }
            rhs -= &k * prhs;
        }
        let Some((&col, lead)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let lead = lead.clone();
        for v in row.values_mut() {
            *v /= &lead;
        }
        self.pivots.push((col, row, rhs / lead));
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The solution when the system pins every one of `n` unknowns.
    pub fn unique_solution(&self, n: usize) -> Option<Vec<Rational>> {
        if self.inconsistent || self.rank() != n {
            return None;
        }
        let mut x = vec![Rational::zero(); n];
        for (col, row, rhs) in self.pivots.iter().rev() {
            let mut v = rhs.clone();
            for (j, k) in row {
                if j != col {
                    v -= k * &x[*j];
                }
            }
            x[*col] = v;
        }
        Some(x)
    }
}

pub fn unit_row(col: usize) -> Row {
    BTreeMap::from([(col, Rational::one())])
}

/// The s-map axioms as linear equations over the full value table:
/// unit, zero on orthogonal neighbours, and additivity over every orthogonal
/// pair in every coordinate.
pub fn axiom_equations(l: &Lattice, n: usize) -> Vec<(Row, Rational)> {
    let space = TupleSpace::new(l.len(), n);
    let elems: Vec<Elem> = l.elements().collect();
    let mut out = vec![(unit_row(space.index(&vec![l.one(); n])), Rational::one())];
    for t in space.iter() {
        if t.windows(2).any(|w| l.is_orthogonal(w[0], w[1])) {
            out.push((unit_row(space.index(&t)), Rational::zero()));
        }
    }
    for i in 0..n {
        for t in space.iter().filter(|t| t[i] == l.zero()) {
            for &e in &elems {
                for &f in &elems {
                    if e.index() > f.index() || !l.is_orthogonal(e, f) {
                        continue;
                    }
                    let at = |g: Elem| {
                        let mut s = t.clone();
                        s[i] = g;
                        space.index(&s)
                    };
                    let mut row = Row::new();
                    *row.entry(at(l.join(e, f))).or_insert_with(Rational::zero) += Rational::one();
                    *row.entry(at(e)).or_insert_with(Rational::zero) -= Rational::one();
                    *row.entry(at(f)).or_insert_with(Rational::zero) -= Rational::one();
                    row.retain(|_, v| !v.is_zero());
                    out.push((row, Rational::zero()));
                }
            }
        }
    }
    out
}

/// How a certificate was confirmed.
#[derive(Debug, PartialEq, Eq)]
pub enum Recheck {
    /// The rows are equalities whose elimination reaches `0 = c` with `c != 0`.
    Elimination,
    /// Recomputed Farkas combination: nonnegative on every atom tuple,
    /// negative right side.
    Farkas,
}

fn holds(lhs: &Rational, rel: Relation, rhs: &Rational) -> bool {
    match rel {
        Relation::Eq => lhs == rhs,
        Relation::Le => lhs <= rhs,
        Relation::Ge => lhs >= rhs,
    }
}

/// Confirms that the certificate rows have no common nonnegative solution,
/// without using the library's verifier, and that every row it attributes to
/// the s-map axioms holds on `sample`, a valid map of the same arity.
pub fn recheck_certificate(cert: &Certificate, c: &ConstraintSet, sample: &SMap) -> Result<Recheck, String> {
    for row in &cert.rows {
        let lhs: Rational = row.terms.iter().map(|(t, k)| k * sample.get(t)).sum();
        match row.origin {
            RowOrigin::WellDefined { .. } | RowOrigin::Normalization | RowOrigin::AdjacentZero => {
                if !holds(&lhs, row.rel, &row.rhs) {
                    return Err(format!("axiom row {:?} fails on a valid map", row.origin));
                }
            }
            RowOrigin::Value(i) => {
                let v = &c.values[i];
                if lhs != *sample.get(&v.tuple) || row.rel != v.rel || row.rhs != v.value {
                    return Err(format!("row for value constraint {i} does not expand it"));
                }
            }
            _ => {}
        }
    }
    let mut columns: BTreeMap<Vec<Elem>, usize> = BTreeMap::new();
    for row in &cert.rows {
        for (t, _) in &row.terms {
            let next = columns.len();
            columns.entry(t.clone()).or_insert(next);
        }
    }
    let mut combo = vec![Rational::zero(); columns.len()];
    let mut rhs = Rational::zero();
    for row in &cert.rows {
        let y = &row.multiplier;
        let sign_ok = match row.rel {
            Relation::Eq => true,
            Relation::Le => *y >= Rational::zero(),
            Relation::Ge => *y <= Rational::zero(),
        };
        if !sign_ok {
            return Err(format!("multiplier {y} has the wrong sign for {:?}", row.rel));
        }
        for (t, k) in &row.terms {
            combo[columns[t]] += y * k;
        }
        rhs += y * &row.rhs;
    }
    let all_eq = cert.rows.iter().all(|r| r.rel == Relation::Eq);
    if all_eq && combo.iter().all(|v| v.is_zero()) {
        let mut e = Elimination::new();
        for row in &cert.rows {
            let mut r = Row::new();
            for (t, k) in &row.terms {
                *r.entry(columns[t]).or_insert_with(Rational::zero) += k;
            }
            r.retain(|_, v| !v.is_zero());
            e.add(r, row.rhs.clone());
        }
        return if e.inconsistent { Ok(Recheck::Elimination) } else { Err("equalities are consistent".into()) };
    }
    if combo.iter().all(|v| *v >= Rational::zero()) && rhs < Rational::zero() {
        Ok(Recheck::Farkas)
    } else {
        Err("combination does not certify infeasibility".into())
    }
}

/// A state of MO_k-like lattices or Boolean algebras from random atom weights:
/// on MO_k each complementary pair splits one unit, on a Boolean algebra the
/// weights are normalized.
pub fn random_state(rng: &mut impl Rng, l: &Arc<Lattice>) -> State {
    let den = 20;
    if l.is_boolean() {
        let mut w: Vec<i64> = l.atoms().iter().map(|_| rng.gen_range(0..=den)).collect();
        if w.iter().all(|&v| v == 0) {
            w[0] = 1;
        }
        let total: i64 = w.iter().sum();
        let weights: BTreeMap<Elem, Rational> =
            l.atoms().iter().zip(&w).map(|(&a, &v)| (a, Rational::new(v.into(), total.into()))).collect();
        return State::from_atom_weights(l.clone(), |a| weights[&a].clone());
    }
    let mut weights: BTreeMap<Elem, Rational> = BTreeMap::new();
    for &a in l.atoms() {
        if weights.contains_key(&a) {
            continue;
        }
        let v = Rational::new(rng.gen_range(0..=den).into(), den.into());
        weights.insert(l.ortho(a), Rational::one() - &v);
        weights.insert(a, v);
    }
    State::from_atom_weights(l.clone(), |a| weights[&a].clone())
}

/// Values read off `source`, optionally with one of them shifted, plus
/// random bounds and an optional symmetry requirement.
pub fn random_constraints(rng: &mut impl Rng, source: &SMap) -> ConstraintSet {
    let tuples: Vec<Vec<Elem>> = source.space().iter().collect();
    let mut c = ConstraintSet::new();
    let k = rng.gen_range(1..=6);
    for t in tuples.choose_multiple(rng, k) {
        c.fix(t.clone(), source.get(t).clone());
    }
    if rng.gen_bool(0.5) {
        let i = rng.gen_range(0..c.values.len());
        let shift = Rational::new(rng.gen_range(1..=5).into(), 10.into());
        let v = &mut c.values[i].value;
        *v = if *v >= shift { v.clone() - shift } else { v.clone() + shift };
        if *v > Rational::one() {
            *v = Rational::one();
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let t = tuples.choose(rng).unwrap().clone();
        let rel = if rng.gen_bool(0.5) { Relation::Le } else { Relation::Ge };
        c.bound(t, rel, Rational::new(rng.gen_range(0..=10).into(), 10.into()));
    }
    if rng.gen_bool(0.25) {
        c.symmetry = Some(Symmetry::Require);
    }
    c
}

/// `t ↦ atom` for `t = 1`, `t ↦ atom'` for `t = -1`.
pub fn pair_observable(l: &Arc<Lattice>, atom: Elem) -> qlp_core::Observable {
    qlp_core::Observable::new(l.clone(), [(Rational::from_integer(1.into()), atom), (Rational::from_integer((-1).into()), l.ortho(atom))])
        .unwrap()
}

/// `count` maps from the synthesizer on MO2 and MO3 at arities 2 and 3, each
/// with a random diagonal state and every other one asked to be asymmetric.
pub fn synthesized_maps(seed: u64, count: usize) -> Vec<SMap> {
    use qlp_core::synth::{synthesize, Synthesis};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lattices = [
        Arc::new(qlp_core::lattice::make_mo(2).unwrap()),
        Arc::new(qlp_core::lattice::make_mo(3).unwrap()),
    ];
    let mut out = Vec::new();
    let mut round = 0;
    while out.len() < count {
        let l = &lattices[round % 2];
        let n = 2 + (round / 2) % 2;
        let c = ConstraintSet {
            state: Some(random_state(&mut rng, l)),
            symmetry: ((round / 4) % 2 == 0).then_some(Symmetry::Forbid),
            ..Default::default()
        };
        if let Synthesis::Feasible(p) = synthesize(l, n, &c).unwrap() {
            out.push(p);
        }
        round += 1;
        assert!(round < 4 * count, "too few feasible draws");
    }
    out
}
