//! n-dimensional s-maps: dense tables over `L^n` and the operations on them.

mod complete;
mod props;
mod validate;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Elem, Lattice};
use crate::observable::{same_lattice, State};
use crate::rational::Rational;

pub use complete::{complete, complete_shuffled, describe_chain, Completion, CompletionError, DerivationStep, Inconsistency, Rule};
pub use props::{
    all_permutations, check_propositions, permutation_class, permutations_of, replace, Property,
    PropertyCheck, PropertyReport,
};
pub use validate::{validate, SMapAxiom, SMapViolation, ValidationReport};

pub type Tuple = Vec<Elem>;

/// Row-major indexing of `L^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TupleSpace {
    pub size: usize,
    pub arity: usize,
}

impl TupleSpace {
    pub fn new(size: usize, arity: usize) -> Self {
        TupleSpace { size, arity }
    }

    pub fn cells(&self) -> usize {
        self.size.pow(self.arity as u32)
    }

    pub fn index(&self, t: &[Elem]) -> usize {
        debug_assert_eq!(t.len(), self.arity);
        t.iter().fold(0, |acc, e| acc * self.size + e.index())
    }

    pub fn tuple(&self, mut index: usize) -> Tuple {
        let mut t = vec![Elem(0); self.arity];
        for slot in t.iter_mut().rev() {
            *slot = Elem(index % self.size);
            index /= self.size;
        }
        t
    }

    /// Distance between cells differing by one in coordinate `i`.
    pub fn stride(&self, i: usize) -> usize {
        self.size.pow((self.arity - 1 - i) as u32)
    }

    pub fn iter(&self) -> impl Iterator<Item = Tuple> + '_ {
        (0..self.cells()).map(move |i| self.tuple(i))
    }
}

/// A total table `L^n -> Q`. Whether it is an s-map is decided by
/// [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SMap {
    lattice: Arc<Lattice>,
    space: TupleSpace,
    table: Vec<Rational>,
}

impl SMap {
    pub fn from_table(lattice: Arc<Lattice>, arity: usize, table: Vec<Rational>) -> Result<SMap> {
        if arity == 0 {
            return Err(Error::InvalidArgument("arity must be at least 1".into()));
        }
        let space = TupleSpace::new(lattice.len(), arity);
        if table.len() != space.cells() {
            return Err(Error::Structural(format!(
                "table has {} cells, expected {}",
                table.len(),
                space.cells()
            )));
        }
        Ok(SMap { lattice, space, table })
    }

    pub fn from_fn(lattice: Arc<Lattice>, arity: usize, f: impl Fn(&[Elem]) -> Rational) -> Result<SMap> {
        let space = TupleSpace::new(lattice.len(), arity);
        let table = space.iter().map(|t| f(&t)).collect();
        SMap::from_table(lattice, arity, table)
    }

    /// Builds from explicit entries; every tuple must be present exactly once.
    pub fn from_entries(
        lattice: Arc<Lattice>,
        arity: usize,
        entries: impl IntoIterator<Item = (Tuple, Rational)>,
    ) -> Result<SMap> {
        if arity == 0 {
            return Err(Error::InvalidArgument("arity must be at least 1".into()));
        }
        let space = TupleSpace::new(lattice.len(), arity);
        let mut slots: Vec<Option<Rational>> = vec![None; space.cells()];
        for (t, v) in entries {
            check_tuple(&lattice, arity, &t)?;
            let slot = &mut slots[space.index(&t)];
            if slot.as_ref().is_some_and(|old| *old != v) {
                return Err(Error::Structural(format!(
                    "tuple {} listed twice with different values",
                    format_tuple(&lattice, &t)
                )));
            }
            *slot = Some(v);
        }
        let missing = slots.iter().filter(|s| s.is_none()).count();
        if missing > 0 {
            let first = slots.iter().position(|s| s.is_none()).unwrap();
            return Err(Error::Structural(format!(
                "table is partial: {missing} tuples missing, first {}",
                format_tuple(&lattice, &space.tuple(first))
            )));
        }
        let table = slots.into_iter().map(Option::unwrap).collect();
        SMap::from_table(lattice, arity, table)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn arity(&self) -> usize {
        self.space.arity
    }

    pub fn space(&self) -> TupleSpace {
        self.space
    }

    pub fn get(&self, t: &[Elem]) -> &Rational {
        &self.table[self.space.index(t)]
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn entries(&self) -> impl Iterator<Item = (Tuple, &Rational)> + '_ {
        self.table.iter().enumerate().map(|(i, v)| (self.space.tuple(i), v))
    }

    /// `ν(a) = p(a, ..., a)`.
    pub fn derived_state(&self) -> State {
        let values = self
            .lattice
            .elements()
            .map(|e| self.get(&vec![e; self.arity()]).clone())
            .collect();
        State::new(self.lattice.clone(), values).expect("one value per element")
    }

    /// `ā ↦ p(ā, 1)` as an arity `n - 1` table.
    pub fn fix_last_to_one(&self) -> Result<SMap> {
        if self.arity() < 2 {
            return Err(Error::InvalidArgument("cannot drop the only coordinate".into()));
        }
        let one = self.lattice.one();
        SMap::from_fn(self.lattice.clone(), self.arity() - 1, |t| {
            let mut full = t.to_vec();
            full.push(one);
            self.get(&full).clone()
        })
    }
}

/// Sparse s-map data, as listed in a source or produced by a solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSMap {
    lattice: Arc<Lattice>,
    arity: usize,
    entries: BTreeMap<Tuple, Rational>,
}

impl PartialSMap {
    pub fn new(lattice: Arc<Lattice>, arity: usize) -> Result<PartialSMap> {
        if arity == 0 {
            return Err(Error::InvalidArgument("arity must be at least 1".into()));
        }
        Ok(PartialSMap { lattice, arity, entries: BTreeMap::new() })
    }

    /// Adds an entry. Values outside `[0, 1]` are rejected; repeating a tuple
    /// with a different value is a structural error.
    pub fn insert(&mut self, t: Tuple, v: Rational) -> Result<()> {
        check_tuple(&self.lattice, self.arity, &t)?;
        if v < Rational::zero() || v > Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "value {v} for {} is outside [0, 1]",
                format_tuple(&self.lattice, &t)
            )));
        }
        if let Some(old) = self.entries.get(&t) {
            if *old != v {
                return Err(Error::Structural(format!(
                    "tuple {} listed with conflicting values {old} and {v}",
                    format_tuple(&self.lattice, &t)
                )));
            }
        }
        self.entries.insert(t, v);
        Ok(())
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &BTreeMap<Tuple, Rational> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_tuple(lattice: &Lattice, arity: usize, t: &[Elem]) -> Result<()> {
    if t.len() != arity {
        return Err(Error::Structural(format!(
            "tuple of length {} in an arity-{arity} map",
            t.len()
        )));
    }
    if let Some(bad) = t.iter().find(|e| e.index() >= lattice.len()) {
        return Err(Error::Structural(format!("element index {} out of range", bad.index())));
    }
    Ok(())
}

/// `p(a, b', c)` style rendering.
pub fn format_tuple(lattice: &Lattice, t: &[Elem]) -> String {
    let labels: Vec<&str> = t.iter().map(|&e| lattice.label(e)).collect();
    format!("({})", labels.join(","))
}

/// Result of comparing an arity-n map with the last-coordinate-one slice of an
/// arity-(n+1) map.
#[derive(Clone, Debug)]
pub struct MarginalReport {
    /// `(ā, p_n(ā), p_{n+1}(ā, 1))` for every tuple where they differ.
    pub violations: Vec<(Tuple, Rational, Rational)>,
    /// `ā ↦ p_{n+1}(ā, 1)`.
    pub restricted: SMap,
    /// Whether `restricted` passes validation.
    pub restricted_valid: bool,
}

impl MarginalReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn marginal_consistency(p_n: &SMap, p_m: &SMap) -> Result<MarginalReport> {
    if p_m.arity() != p_n.arity() + 1 {
        return Err(Error::InvalidArgument(format!(
            "arities {} and {} do not differ by one",
            p_n.arity(),
            p_m.arity()
        )));
    }
    if !same_lattice(p_n.lattice(), p_m.lattice()) {
        return Err(Error::InvalidArgument("maps live on different lattices".into()));
    }
    let restricted = p_m.fix_last_to_one()?;
    let violations = p_n
        .entries()
        .filter_map(|(t, v)| {
            let w = restricted.get(&t);
            (v != w).then(|| (t, v.clone(), w.clone()))
        })
        .collect();
    let restricted_valid = validate(&restricted).passed();
    Ok(MarginalReport { violations, restricted, restricted_valid })
}
