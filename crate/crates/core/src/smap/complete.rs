//! Completion of a partial s-map by propagation over linear identities.
//!
//! Every identity used is a consequence of the axioms: additivity over
//! orthogonal pairs and atom decompositions, the zero on orthogonal pairs in
//! any positions, `p(1, ..., 1) = 1`, replacement of a `1` by another entry,
//! and permutation invariance for tuples with a repeated entry. A cell is
//! solved when it is the only unknown in some identity; identities whose
//! cells are all known are checked. The finished table is validated again.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{format_tuple, validate, PartialSMap, SMap, Tuple, TupleSpace, ValidationReport};
use crate::lattice::{Elem, Lattice};
use crate::rational::{to_display, Rational};

/// Why a cell holds its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Given,
    Unit,
    /// A `0` entry at this 0-based position.
    ZeroEntry { position: usize },
    /// Entries at these 0-based positions are orthogonal.
    OrthogonalZero { positions: (usize, usize) },
    /// `p(.., whole, ..) = Σ p(.., part, ..)` in one coordinate.
    Additivity { coordinate: usize, whole: Elem, parts: Vec<Elem> },
    /// The `1` at `position` equals the tuple with `1` replaced by the entry at `source`.
    UnitReplacement { position: usize, source: usize },
    /// A tuple with a repeated entry equals its swap at `position, position + 1`.
    RepeatSwap { position: usize },
}

impl Rule {
    pub fn describe(&self, l: &Lattice) -> String {
        match self {
            Rule::Given => "given".into(),
            Rule::Unit => "unit tuple".into(),
            Rule::ZeroEntry { position } => format!("0 at position {}", position + 1),
            Rule::OrthogonalZero { positions: (i, j) } => {
                format!("orthogonal entries at positions {} and {}", i + 1, j + 1)
            }
            Rule::Additivity { coordinate, whole, parts } => {
                let parts: Vec<&str> = parts.iter().map(|&e| l.label(e)).collect();
                format!(
                    "additivity in coordinate {}: {} = {}",
                    coordinate + 1,
                    l.label(*whole),
                    parts.join(" v ")
                )
            }
            Rule::UnitReplacement { position, source } => {
                format!("1 at position {} replaced by entry {}", position + 1, source + 1)
            }
            Rule::RepeatSwap { position } => {
                format!("repeated entry, positions {} and {} swapped", position + 1, position + 2)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub tuple: Tuple,
    pub value: Rational,
    pub rule: Rule,
    pub inputs: Vec<Tuple>,
}

impl DerivationStep {
    pub fn describe(&self, l: &Lattice) -> String {
        let mut s = format!("p{} = {}  [{}", format_tuple(l, &self.tuple), to_display(&self.value), self.rule.describe(l));
        if !self.inputs.is_empty() {
            let inputs: Vec<String> = self.inputs.iter().map(|t| format!("p{}", format_tuple(l, t))).collect();
            let _ = write!(s, "; from {}", inputs.join(", "));
        }
        s.push(']');
        s
    }
}

pub fn describe_chain(l: &Lattice, chain: &[DerivationStep]) -> String {
    chain.iter().map(|s| format!("  {}\n", s.describe(l))).collect()
}

/// Two derivations assigning different values to the same cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inconsistency {
    pub tuple: Tuple,
    pub first: Rational,
    pub first_chain: Vec<DerivationStep>,
    pub second: Rational,
    pub second_chain: Vec<DerivationStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompletionError {
    Inconsistent(Box<Inconsistency>),
    /// A derived value left `[0, 1]`.
    OutOfRange { chain: Vec<DerivationStep> },
    /// Propagation stopped with these cells unknown.
    Underdetermined { free: Vec<Tuple> },
    /// The completed table failed validation.
    Invalid(ValidationReport),
}

impl CompletionError {
    pub fn describe(&self, l: &Lattice) -> String {
        match self {
            CompletionError::Inconsistent(inc) => format!(
                "inconsistent: p{} derived as {} and as {}\nfirst derivation:\n{}second derivation:\n{}",
                format_tuple(l, &inc.tuple),
                to_display(&inc.first),
                to_display(&inc.second),
                describe_chain(l, &inc.first_chain),
                describe_chain(l, &inc.second_chain)
            ),
            CompletionError::OutOfRange { chain } => {
                let last = chain.last().expect("chain ends at the offending cell");
                format!(
                    "derived value {} for p{} is outside [0, 1]\n{}",
                    to_display(&last.value),
                    format_tuple(l, &last.tuple),
                    describe_chain(l, chain)
                )
            }
            CompletionError::Underdetermined { free } => {
                let shown: Vec<String> = free.iter().take(20).map(|t| format!("p{}", format_tuple(l, t))).collect();
                format!(
                    "underdetermined: {} cells free, including {}",
                    free.len(),
                    shown.join(", ")
                )
            }
            CompletionError::Invalid(report) => {
                format!("completed table fails validation with {} violations", report.violations.len())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Origin {
    Fixed(Rule),
    Equation(usize),
}

struct Equation {
    rule: Rule,
    /// `Σ coeff * cell = 0`.
    terms: Vec<(usize, i64)>,
}

/// A completed table with the provenance of every cell.
#[derive(Clone, Debug)]
pub struct Completion {
    pub map: SMap,
    origins: Vec<Option<Origin>>,
    values: Vec<Option<Rational>>,
    equations: Vec<(Rule, Vec<usize>)>,
}

impl Completion {
    /// The derivation of `t`, inputs before the steps that use them.
    pub fn chain(&self, t: &[Elem]) -> Vec<DerivationStep> {
        let space = self.map.space();
        build_chain(space, space.index(t), &self.origins, &self.values, &self.equations)
    }

    pub fn given_cells(&self) -> usize {
        self.origins.iter().filter(|o| **o == Some(Origin::Fixed(Rule::Given))).count()
    }
}

fn build_chain(
    space: TupleSpace,
    target: usize,
    origins: &[Option<Origin>],
    values: &[Option<Rational>],
    equations: &[(Rule, Vec<usize>)],
) -> Vec<DerivationStep> {
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    // Iterative post-order walk over the provenance graph.
    let mut stack = vec![(target, false)];
    while let Some((cell, expanded)) = stack.pop() {
        if done.contains(&cell) {
            continue;
        }
        let inputs: Vec<usize> = match &origins[cell] {
            Some(Origin::Equation(e)) => equations[*e].1.iter().copied().filter(|&c| c != cell).collect(),
            _ => Vec::new(),
        };
        if expanded {
            done.insert(cell);
            let rule = match &origins[cell] {
                Some(Origin::Fixed(r)) => r.clone(),
                Some(Origin::Equation(e)) => equations[*e].0.clone(),
                None => continue,
            };
            out.push(DerivationStep {
                tuple: space.tuple(cell),
                value: values[cell].clone().expect("chains only visit known cells"),
                rule,
                inputs: inputs.iter().map(|&c| space.tuple(c)).collect(),
            });
        } else {
            stack.push((cell, true));
            for &c in inputs.iter().rev() {
                if !done.contains(&c) {
                    stack.push((c, false));
                }
            }
        }
    }
    out
}

struct Engine<'a> {
    l: &'a Lattice,
    space: TupleSpace,
    values: Vec<Option<Rational>>,
    origins: Vec<Option<Origin>>,
    equations: Vec<Equation>,
    by_cell: Vec<Vec<usize>>,
}

impl<'a> Engine<'a> {
    fn new(l: &'a Lattice, arity: usize) -> Self {
        let space = TupleSpace::new(l.len(), arity);
        let cells = space.cells();
        let mut engine = Engine {
            l,
            space,
            values: vec![None; cells],
            origins: vec![None; cells],
            equations: Vec::new(),
            by_cell: vec![Vec::new(); cells],
        };
        engine.build_equations();
        engine
    }

    fn build_equations(&mut self) {
        let l = self.l;
        let space = self.space;
        let n = space.arity;
        let mut seen: BTreeSet<Vec<(usize, i64)>> = BTreeSet::new();
        let mut push = |eqs: &mut Vec<Equation>, rule: Rule, mut terms: Vec<(usize, i64)>| {
            terms.sort();
            if terms.len() < 2 || (terms.len() == 2 && terms[0].0 == terms[1].0) {
                return;
            }
            let mut key = terms.clone();
            if key[0].1 < 0 {
                key.iter_mut().for_each(|t| t.1 = -t.1);
            }
            if seen.insert(key) {
                eqs.push(Equation { rule, terms });
            }
        };
        let mut eqs = Vec::new();

        // Splittings of each element: orthogonal pairs and atom decompositions.
        let mut splits: Vec<(Elem, Vec<Elem>)> = Vec::new();
        for a in l.elements().filter(|&a| a != l.zero()) {
            for b in l.elements().filter(|&b| b > a && l.is_orthogonal(a, b)) {
                splits.push((l.join(a, b), vec![a, b]));
            }
        }
        for e in l.elements() {
            for d in l.atom_decompositions(e).iter().filter(|d| d.len() > 2) {
                splits.push((e, d.clone()));
            }
        }

        for i in 0..n {
            let stride = space.stride(i);
            for base in (0..space.cells()).filter(|&c| (c / stride).is_multiple_of(space.size)) {
                for (whole, parts) in &splits {
                    let mut terms = vec![(base + whole.index() * stride, 1)];
                    terms.extend(parts.iter().map(|p| (base + p.index() * stride, -1)));
                    let rule = Rule::Additivity { coordinate: i, whole: *whole, parts: parts.clone() };
                    push(&mut eqs, rule, terms);
                }
            }
        }

        for cell in 0..space.cells() {
            let t = space.tuple(cell);
            for i in (0..n).filter(|&i| t[i] == l.one()) {
                for j in (0..n).filter(|&j| j != i) {
                    let mut r = t.clone();
                    r[i] = t[j];
                    let rule = Rule::UnitReplacement { position: i, source: j };
                    push(&mut eqs, rule, vec![(cell, 1), (space.index(&r), -1)]);
                }
            }
            let repeated = (0..n).any(|i| (i + 1..n).any(|j| t[i] == t[j]));
            if repeated {
                for i in 0..n - 1 {
                    let mut r = t.clone();
                    r.swap(i, i + 1);
                    push(&mut eqs, Rule::RepeatSwap { position: i }, vec![(cell, 1), (space.index(&r), -1)]);
                }
            }
        }

        for (k, eq) in eqs.iter().enumerate() {
            for &(c, _) in &eq.terms {
                self.by_cell[c].push(k);
            }
        }
        self.equations = eqs;
    }

    fn equation_cells(&self) -> Vec<(Rule, Vec<usize>)> {
        self.equations
            .iter()
            .map(|e| (e.rule.clone(), e.terms.iter().map(|t| t.0).collect()))
            .collect()
    }

    fn chain(&self, cell: usize) -> Vec<DerivationStep> {
        build_chain(self.space, cell, &self.origins, &self.values, &self.equation_cells())
    }

    fn fix(&mut self, cell: usize, v: Rational, rule: Rule) -> Result<(), CompletionError> {
        match &self.values[cell] {
            Some(old) if *old != v => {
                let first_chain = self.chain(cell);
                let second_chain = vec![DerivationStep {
                    tuple: self.space.tuple(cell),
                    value: v.clone(),
                    rule,
                    inputs: Vec::new(),
                }];
                Err(CompletionError::Inconsistent(Box::new(Inconsistency {
                    tuple: self.space.tuple(cell),
                    first: old.clone(),
                    first_chain,
                    second: v,
                    second_chain,
                })))
            }
            Some(_) => Ok(()),
            None => {
                self.values[cell] = Some(v);
                self.origins[cell] = Some(Origin::Fixed(rule));
                Ok(())
            }
        }
    }

    fn seed(&mut self, q: &PartialSMap) -> Result<(), CompletionError> {
        let l = self.l;
        let n = self.space.arity;
        self.fix(self.space.index(&vec![l.one(); n]), Rational::one(), Rule::Unit)?;
        for cell in 0..self.space.cells() {
            let t = self.space.tuple(cell);
            if let Some(position) = t.iter().position(|&e| e == l.zero()) {
                self.fix(cell, Rational::zero(), Rule::ZeroEntry { position })?;
                continue;
            }
            let pair = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| l.is_orthogonal(t[i], t[j]));
            if let Some(positions) = pair {
                self.fix(cell, Rational::zero(), Rule::OrthogonalZero { positions })?;
            }
        }
        for (t, v) in q.entries() {
            self.fix(self.space.index(t), v.clone(), Rule::Given)?;
        }
        Ok(())
    }

    fn run(&mut self, mut rng: Option<ChaCha8Rng>) -> Result<(), CompletionError> {
        let mut order: Vec<usize> = (0..self.equations.len()).collect();
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut queued = vec![true; self.equations.len()];
        let mut queue: VecDeque<usize> = order.into();
        while let Some(k) = queue.pop_front() {
            queued[k] = false;
            let eq = &self.equations[k];
            let unknown: Vec<usize> = eq.terms.iter().map(|t| t.0).filter(|&c| self.values[c].is_none()).collect();
            if unknown.len() > 1 {
                continue;
            }
            if unknown.is_empty() {
                self.check(k)?;
                continue;
            }
            let cell = unknown[0];
            let mut rest = Rational::zero();
            let mut own = 0i64;
            for &(c, coeff) in &eq.terms {
                if c == cell {
                    own += coeff;
                } else {
                    rest += Rational::from_integer(coeff.into()) * self.values[c].as_ref().unwrap();
                }
            }
            let v = -rest / Rational::from_integer(own.into());
            self.values[cell] = Some(v.clone());
            self.origins[cell] = Some(Origin::Equation(k));
            if v.is_negative() || v > Rational::one() {
                return Err(CompletionError::OutOfRange { chain: self.chain(cell) });
            }
            let mut next: Vec<usize> = self.by_cell[cell].iter().copied().filter(|&e| !queued[e]).collect();
            if let Some(rng) = rng.as_mut() {
                next.shuffle(rng);
            }
            for e in next {
                queued[e] = true;
                queue.push_back(e);
            }
        }
        Ok(())
    }

    /// Checks a fully known equation; on failure reports its first cell as
    /// derived two ways.
    fn check(&self, k: usize) -> Result<(), CompletionError> {
        let eq = &self.equations[k];
        let total: Rational = eq
            .terms
            .iter()
            .map(|&(c, coeff)| Rational::from_integer(coeff.into()) * self.values[c].as_ref().unwrap())
            .sum();
        if total.is_zero() {
            return Ok(());
        }
        // Blame the most recently derived cell: the one whose chain is longest.
        let (cell, coeff) = *eq
            .terms
            .iter()
            .max_by_key(|&&(c, _)| (self.chain(c).len(), std::cmp::Reverse(c)))
            .unwrap();
        let current = self.values[cell].clone().unwrap();
        let implied = &current - &total / Rational::from_integer(coeff.into());
        let mut second_chain = Vec::new();
        let mut seen = BTreeSet::new();
        for &(c, _) in eq.terms.iter().filter(|t| t.0 != cell) {
            for step in self.chain(c) {
                if seen.insert(step.tuple.clone()) {
                    second_chain.push(step);
                }
            }
        }
        second_chain.push(DerivationStep {
            tuple: self.space.tuple(cell),
            value: implied.clone(),
            rule: eq.rule.clone(),
            inputs: eq.terms.iter().filter(|t| t.0 != cell).map(|t| self.space.tuple(t.0)).collect(),
        });
        Err(CompletionError::Inconsistent(Box::new(Inconsistency {
            tuple: self.space.tuple(cell),
            first: current,
            first_chain: self.chain(cell),
            second: implied,
            second_chain,
        })))
    }

    fn finish(self, lattice: std::sync::Arc<Lattice>) -> Result<Completion, CompletionError> {
        let free: Vec<Tuple> = (0..self.space.cells())
            .filter(|&c| self.values[c].is_none())
            .map(|c| self.space.tuple(c))
            .collect();
        if !free.is_empty() {
            return Err(CompletionError::Underdetermined { free });
        }
        let equations = self.equation_cells();
        let table = self.values.iter().cloned().map(Option::unwrap).collect();
        let map = SMap::from_table(lattice, self.space.arity, table).expect("table has every cell");
        let report = validate(&map);
        if !report.passed() {
            return Err(CompletionError::Invalid(report));
        }
        Ok(Completion { map, origins: self.origins, values: self.values, equations })
    }
}

fn run(q: &PartialSMap, rng: Option<ChaCha8Rng>) -> Result<Completion, CompletionError> {
    let lattice = q.lattice().clone();
    let mut engine = Engine::new(&lattice, q.arity());
    engine.seed(q)?;
    engine.run(rng)?;
    engine.finish(lattice.clone())
}

/// Completes `q` to a total table, or reports why it cannot.
pub fn complete(q: &PartialSMap) -> Result<Completion, CompletionError> {
    run(q, None)
}

/// As [`complete`] with identities processed in a seeded random order. The
/// result must not depend on the seed.
pub fn complete_shuffled(q: &PartialSMap, seed: u64) -> Result<Completion, CompletionError> {
    run(q, Some(ChaCha8Rng::seed_from_u64(seed)))
}
