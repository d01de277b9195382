//! Synthesis of s-maps by exact linear programming.
//!
//! The variables are the values on atom tuples. An s-map is determined by
//! them through additivity, provided every element gives the same sum over
//! each of its atom decompositions in each coordinate. Atom tuples with an
//! orthogonal neighbouring pair are zero and are not variables. Witnesses are
//! extended to full tables by [`complete`] and validated again.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::json::{parse_tuple, state_from_doc, ConstraintSetDoc, RelDoc};
use crate::lattice::{Elem, Lattice};
use crate::lp::{feasibility, Farkas, Feasibility, LinearProgram, Optimum, Relation, Tableau};
use crate::observable::State;
use crate::rational::Rational;
use crate::smap::{all_permutations, complete, format_tuple, PartialSMap, SMap, Tuple, TupleSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Invariance under every permutation of the arguments.
    Require,
    /// Some permutation changes some value.
    Forbid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueConstraint {
    pub tuple: Tuple,
    pub rel: Relation,
    pub value: Rational,
}

/// `Σ coeff * p(tuple)  rel  value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSpec {
    pub terms: Vec<(Tuple, Rational)>,
    pub rel: Relation,
    pub value: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub values: Vec<ValueConstraint>,
    pub state: Option<State>,
    pub symmetry: Option<Symmetry>,
    pub linear: Vec<LinearSpec>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        ConstraintSet::default()
    }

    /// `p(tuple) = value`.
    pub fn fix(&mut self, tuple: Tuple, value: Rational) -> &mut Self {
        self.values.push(ValueConstraint { tuple, rel: Relation::Eq, value });
        self
    }

    pub fn bound(&mut self, tuple: Tuple, rel: Relation, value: Rational) -> &mut Self {
        self.values.push(ValueConstraint { tuple, rel, value });
        self
    }

    /// Every entry of `q` as an equality.
    pub fn from_partial(q: &PartialSMap) -> Self {
        let mut c = ConstraintSet::new();
        for (t, v) in q.entries() {
            c.fix(t.clone(), v.clone());
        }
        c
    }

    pub fn from_doc(lattice: &Arc<Lattice>, doc: &ConstraintSetDoc) -> Result<Self> {
        let rel = |r: RelDoc| match r {
            RelDoc::Eq => Relation::Eq,
            RelDoc::Le => Relation::Le,
            RelDoc::Ge => Relation::Ge,
        };
        let mut c = ConstraintSet::new();
        for v in &doc.constraints {
            c.values.push(ValueConstraint {
                tuple: parse_tuple(lattice, &v.tuple)?,
                rel: rel(v.rel),
                value: v.value.clone(),
            });
        }
        for lin in &doc.linear {
            let terms = lin
                .terms
                .iter()
                .map(|t| Ok((parse_tuple(lattice, &t.tuple)?, t.coeff.clone())))
                .collect::<Result<Vec<_>>>()?;
            c.linear.push(LinearSpec { terms, rel: rel(lin.rel), value: lin.value.clone() });
        }
        c.state = doc.state.as_ref().map(|s| state_from_doc(lattice.clone(), s)).transpose()?;
        c.symmetry = doc.symmetric.map(|s| if s { Symmetry::Require } else { Symmetry::Forbid });
        Ok(c)
    }

    fn check(&self, l: &Lattice, n: usize) -> Result<()> {
        let tuple_ok = |t: &Tuple| t.len() == n && t.iter().all(|e| e.index() < l.len());
        for v in &self.values {
            if !tuple_ok(&v.tuple) {
                return Err(Error::InvalidArgument(format!("constraint tuple {:?} does not fit arity {n}", v.tuple)));
            }
            if v.rel == Relation::Eq && (v.value.is_negative() || v.value > Rational::one()) {
                return Err(Error::InvalidArgument(format!(
                    "fixed value {} for {} is outside [0, 1]",
                    v.value,
                    format_tuple(l, &v.tuple)
                )));
            }
        }
        for lin in &self.linear {
            if let Some((t, _)) = lin.terms.iter().find(|(t, _)| !tuple_ok(t)) {
                return Err(Error::InvalidArgument(format!("constraint tuple {t:?} does not fit arity {n}")));
            }
        }
        if let Some(s) = &self.state {
            if **s.lattice() != *l {
                return Err(Error::InvalidArgument("target state lives on another lattice".into()));
            }
        }
        Ok(())
    }
}

/// Where a row of the program comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowOrigin {
    /// Two atom decompositions of `element` in `coordinate` give equal sums.
    WellDefined { coordinate: usize, element: Elem },
    /// `p(1, ..., 1) = 1`.
    Normalization,
    /// The `index`-th value constraint.
    Value(usize),
    /// The `index`-th linear constraint.
    Linear(usize),
    /// `p(e, ..., e)` equals the target state at `e`.
    State(Elem),
    /// Invariance under swapping `swap` and `swap + 1`.
    Symmetry { swap: usize },
    /// An atom tuple with an orthogonal neighbouring pair is zero.
    AdjacentZero,
}

impl RowOrigin {
    pub fn describe(&self, l: &Lattice) -> String {
        match self {
            RowOrigin::WellDefined { coordinate, element } => format!(
                "atom decompositions of {} agree in coordinate {}",
                l.label(*element),
                coordinate + 1
            ),
            RowOrigin::Normalization => "p(1,...,1) = 1".into(),
            RowOrigin::Value(i) => format!("value constraint #{}", i + 1),
            RowOrigin::Linear(i) => format!("linear constraint #{}", i + 1),
            RowOrigin::State(e) => format!("diagonal equals target state at {}", l.label(*e)),
            RowOrigin::Symmetry { swap } => format!("symmetry under swapping {} and {}", swap + 1, swap + 2),
            RowOrigin::AdjacentZero => "orthogonal neighbours give zero".into(),
        }
    }
}

/// A program row over atom tuples, with its multiplier in the certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateRow {
    pub origin: RowOrigin,
    pub terms: Vec<(Tuple, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
    pub multiplier: Rational,
}

/// An infeasible subset of the rows, with Farkas multipliers: the combination
/// has no negative coefficient on any atom tuple and a negative right side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub rows: Vec<CertificateRow>,
}

impl Certificate {
    /// Recomputes the combination over atom tuples and checks the signs.
    pub fn verify(&self) -> bool {
        let mut combo: BTreeMap<&Tuple, Rational> = BTreeMap::new();
        let mut rhs = Rational::zero();
        for row in &self.rows {
            let y = &row.multiplier;
            let sign_ok = match row.rel {
                Relation::Eq => true,
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
            };
            if !sign_ok {
                return false;
            }
            for (t, k) in &row.terms {
                *combo.entry(t).or_insert_with(Rational::zero) += y * k;
            }
            rhs += y * &row.rhs;
        }
        combo.values().all(|v| !v.is_negative()) && rhs.is_negative()
    }

    pub fn describe(&self, l: &Lattice) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let terms: Vec<String> = row
                .terms
                .iter()
                .map(|(t, k)| {
                    if k.is_one() {
                        format!("p{}", format_tuple(l, t))
                    } else {
                        format!("{k}*p{}", format_tuple(l, t))
                    }
                })
                .collect();
            let rel = match row.rel {
                Relation::Eq => "=",
                Relation::Le => "<=",
                Relation::Ge => ">=",
            };
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            out.push_str(&format!(
                "  [{}] x {}: {lhs} {rel} {}\n",
                row.multiplier,
                row.origin.describe(l),
                row.rhs
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum Synthesis {
    Feasible(SMap),
    Infeasible(Certificate),
    /// The constraints are feasible but force permutation invariance: every
    /// gap `p(t) - p(swap t)` over atom tuples has maximum zero.
    OnlySymmetric { pairs_checked: usize },
}

/// The atom-tuple variables of one map inside a program.
struct Block {
    n: usize,
    atoms: Vec<Elem>,
    atom_pos: Vec<Option<usize>>,
    /// Program variable of each atom tuple, `None` when forced to zero.
    var: Vec<Option<usize>>,
}

impl Block {
    fn new(l: &Lattice, n: usize, lp: &mut LinearProgram) -> Block {
        let atoms = l.atoms().to_vec();
        let mut atom_pos = vec![None; l.len()];
        for (i, a) in atoms.iter().enumerate() {
            atom_pos[a.index()] = Some(i);
        }
        let space = TupleSpace::new(atoms.len(), n);
        let var = (0..space.cells())
            .map(|k| {
                let t: Tuple = space.tuple(k).iter().map(|i| atoms[i.index()]).collect();
                let zero = t.windows(2).any(|w| l.is_orthogonal(w[0], w[1]));
                (!zero).then(|| lp.add_var())
            })
            .collect();
        Block { n, atoms, atom_pos, var }
    }

    fn space(&self) -> TupleSpace {
        TupleSpace::new(self.atoms.len(), self.n)
    }

    fn atom_tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        let space = self.space();
        (0..space.cells()).map(move |k| space.tuple(k).iter().map(|i| self.atoms[i.index()]).collect())
    }

    fn var_of(&self, t: &[Elem]) -> Option<usize> {
        let idx: Vec<Elem> = t.iter().map(|e| Elem(self.atom_pos[e.index()].expect("atom"))).collect();
        self.var[self.space().index(&idx)]
    }

    /// Atom tuples whose values sum to `p(t)`.
    fn expand(&self, l: &Lattice, t: &[Elem]) -> Vec<Tuple> {
        let mut out: Vec<Tuple> = vec![Vec::new()];
        for &e in t {
            let parts = l.canonical_decomposition(e);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    parts.iter().map(move |&d| {
                        let mut v = prefix.clone();
                        v.push(d);
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn lp_terms(&self, terms: &[(Tuple, Rational)]) -> Vec<(usize, Rational)> {
        terms
            .iter()
            .filter_map(|(t, k)| self.var_of(t).map(|v| (v, k.clone())))
            .collect()
    }

    /// Reads a solution back as a partial map on atom tuples.
    fn read(&self, l: &Arc<Lattice>, x: &[Rational]) -> Result<PartialSMap> {
        let mut q = PartialSMap::new(l.clone(), self.n)?;
        for t in self.atom_tuples() {
            let v = self.var_of(&t).map_or_else(Rational::zero, |v| x[v].clone());
            q.insert(t, v)?;
        }
        Ok(q)
    }
}

struct Row {
    origin: RowOrigin,
    terms: Vec<(Tuple, Rational)>,
    rel: Relation,
    rhs: Rational,
}

struct Model {
    lp: LinearProgram,
    rows: Vec<Row>,
}

impl Model {
    fn new() -> Self {
        Model { lp: LinearProgram::new(0), rows: Vec::new() }
    }

    fn push(&mut self, block: &Block, origin: RowOrigin, terms: Vec<(Tuple, Rational)>, rel: Relation, rhs: Rational) {
        self.lp.add(block.lp_terms(&terms), rel, rhs.clone());
        self.rows.push(Row { origin, terms, rel, rhs });
    }

    /// Rows every s-map satisfies: well-definedness and normalization.
    fn structural(&mut self, l: &Lattice, b: &Block) {
        let one = Rational::one();
        let context_space = TupleSpace::new(b.atoms.len(), b.n - 1);
        for i in 0..b.n {
            for e in l.elements() {
                let decomps = l.atom_decompositions(e);
                if decomps.len() < 2 {
                    continue;
                }
                for k in 0..context_space.cells() {
                    let ctx: Vec<Elem> = context_space.tuple(k).iter().map(|a| b.atoms[a.index()]).collect();
                    let with = |d: Elem| {
                        let mut t = ctx.clone();
                        t.insert(i, d);
                        t
                    };
                    for other in &decomps[1..] {
                        let mut terms: Vec<(Tuple, Rational)> =
                            decomps[0].iter().map(|&d| (with(d), one.clone())).collect();
                        terms.extend(other.iter().map(|&d| (with(d), -one.clone())));
                        self.push(b, RowOrigin::WellDefined { coordinate: i, element: e }, terms, Relation::Eq, Rational::zero());
                    }
                }
            }
        }
        let unit: Vec<(Tuple, Rational)> =
            b.expand(l, &vec![l.one(); b.n]).into_iter().map(|t| (t, one.clone())).collect();
        self.push(b, RowOrigin::Normalization, unit, Relation::Eq, one);
    }

    fn state_rows(&mut self, l: &Lattice, b: &Block, s: &State) {
        for e in l.elements().filter(|&e| l.is_atom(e)) {
            let terms = b.expand(l, &vec![e; b.n]).into_iter().map(|t| (t, Rational::one())).collect();
            self.push(b, RowOrigin::State(e), terms, Relation::Eq, s.value(e).clone());
        }
    }

    fn symmetry_rows(&mut self, b: &Block) {
        for t in b.atom_tuples() {
            for i in 0..b.n.saturating_sub(1) {
                let mut s = t.clone();
                s.swap(i, i + 1);
                if s <= t {
                    continue;
                }
                let terms = vec![(t.clone(), Rational::one()), (s, -Rational::one())];
                self.push(b, RowOrigin::Symmetry { swap: i }, terms, Relation::Eq, Rational::zero());
            }
        }
    }

    fn user_rows(&mut self, l: &Lattice, b: &Block, c: &ConstraintSet) {
        let expand = |t: &Tuple, k: &Rational| -> Vec<(Tuple, Rational)> {
            b.expand(l, t).into_iter().map(|a| (a, k.clone())).collect()
        };
        for (i, v) in c.values.iter().enumerate() {
            self.push(b, RowOrigin::Value(i), expand(&v.tuple, &Rational::one()), v.rel, v.value.clone());
        }
        for (i, lin) in c.linear.iter().enumerate() {
            let terms = lin.terms.iter().flat_map(|(t, k)| expand(t, k)).collect();
            self.push(b, RowOrigin::Linear(i), terms, lin.rel, lin.value.clone());
        }
    }

    /// Drops rows from the support while the rest stays infeasible, leaving
    /// an irreducible infeasible subset. Blocks of rows are tried first, then
    /// smaller ones down to single rows.
    fn irreducible(&self, farkas: Farkas) -> Farkas {
        let mut keep = farkas.support();
        let mut best = farkas;
        let mut chunk = (keep.len() / 2).max(1);
        loop {
            let mut i = 0;
            while i < keep.len() {
                let end = (i + chunk).min(keep.len());
                let trial: Vec<usize> = keep[..i].iter().chain(&keep[end..]).copied().collect();
                match self.subset_certificate(&trial) {
                    Some(f) => {
                        best = f;
                        keep = best.support();
                    }
                    None => i = end,
                }
            }
            if chunk == 1 {
                return best;
            }
            chunk /= 2;
        }
    }

    /// A certificate for the rows `subset` alone, if they are infeasible.
    fn subset_certificate(&self, subset: &[usize]) -> Option<Farkas> {
        let mut column: BTreeMap<usize, usize> = BTreeMap::new();
        let mut sub = LinearProgram::new(0);
        for &r in subset {
            let c = &self.lp.constraints[r];
            let terms = c
                .terms
                .iter()
                .map(|(v, k)| (*column.entry(*v).or_insert_with(|| sub.add_var()), k.clone()))
                .collect();
            sub.add(terms, c.rel, c.rhs.clone());
        }
        match feasibility(&sub) {
            Feasibility::Feasible(_) => None,
            Feasibility::Infeasible(f) => {
                let mut multipliers = vec![Rational::zero(); self.lp.constraints.len()];
                for (k, y) in f.multipliers.into_iter().enumerate() {
                    multipliers[subset[k]] = y;
                }
                Some(Farkas { multipliers })
            }
        }
    }

    fn certificate(&self, b: &Block, farkas: &Farkas) -> Certificate {
        let mut rows: Vec<CertificateRow> = farkas
            .support()
            .into_iter()
            .map(|i| {
                let r = &self.rows[i];
                CertificateRow {
                    origin: r.origin.clone(),
                    terms: r.terms.clone(),
                    rel: r.rel,
                    rhs: r.rhs.clone(),
                    multiplier: farkas.multipliers[i].clone(),
                }
            })
            .collect();
        // Cancel the weight left on tuples that are not variables.
        let mut combo: BTreeMap<Tuple, Rational> = BTreeMap::new();
        for row in &rows {
            for (t, k) in &row.terms {
                if b.var_of(t).is_none() {
                    *combo.entry(t.clone()).or_insert_with(Rational::zero) += &row.multiplier * k;
                }
            }
        }
        for (t, k) in combo.into_iter().filter(|(_, k)| !k.is_zero()) {
            rows.push(CertificateRow {
                origin: RowOrigin::AdjacentZero,
                terms: vec![(t, Rational::one())],
                rel: Relation::Eq,
                rhs: Rational::zero(),
                multiplier: -k,
            });
        }
        Certificate { rows }
    }
}

fn check_lattice(l: &Lattice, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("arity must be at least 1".into()));
    }
    let atomistic = l
        .elements()
        .filter(|&e| e != l.zero())
        .all(|e| !l.atom_decompositions(e).is_empty());
    if !atomistic {
        return Err(Error::InvalidArgument("lattice is not atomistic".into()));
    }
    Ok(())
}

fn witness(l: &Arc<Lattice>, b: &Block, x: &[Rational]) -> Result<SMap> {
    let q = b.read(l, x)?;
    complete(&q)
        .map(|c| c.map)
        .map_err(|e| Error::Internal(format!("feasible point does not extend: {}", e.describe(l))))
}

/// Maximizes `x_plus - x_minus` over the feasible region.
fn gap(t: &Tableau, plus: &[(usize, Rational)], minus: &[(usize, Rational)]) -> Option<(Rational, Vec<Rational>)> {
    let mut obj: Vec<(usize, Rational)> = plus.to_vec();
    obj.extend(minus.iter().map(|(v, k)| (*v, -k.clone())));
    match t.maximize(&obj) {
        Optimum::Optimal { value, point } => value.is_positive().then_some((value, point)),
        Optimum::Unbounded => None,
    }
}

fn lp_of(b: &Block, t: &[Elem]) -> Vec<(usize, Rational)> {
    b.var_of(t).map(|v| vec![(v, Rational::one())]).unwrap_or_default()
}

/// Finds an s-map of arity `n` on `lattice` meeting `c`, or proves there is none.
pub fn synthesize(lattice: &Arc<Lattice>, n: usize, c: &ConstraintSet) -> Result<Synthesis> {
    let l = lattice.as_ref();
    check_lattice(l, n)?;
    c.check(l, n)?;
    let mut model = Model::new();
    let b = Block::new(l, n, &mut model.lp);
    model.structural(l, &b);
    if let Some(s) = &c.state {
        model.state_rows(l, &b, s);
    }
    if c.symmetry == Some(Symmetry::Require) {
        model.symmetry_rows(&b);
    }
    model.user_rows(l, &b, c);

    let t = match feasibility(&model.lp) {
        Feasibility::Infeasible(farkas) => {
            let farkas = model.irreducible(farkas);
            return Ok(Synthesis::Infeasible(model.certificate(&b, &farkas)));
        }
        Feasibility::Feasible(t) => t,
    };
    if c.symmetry != Some(Symmetry::Forbid) {
        return witness(lattice, &b, &t.point()).map(Synthesis::Feasible);
    }
    let mut pairs_checked = 0;
    for tup in b.atom_tuples() {
        for i in 0..n.saturating_sub(1) {
            let mut s = tup.clone();
            s.swap(i, i + 1);
            if s == tup {
                continue;
            }
            pairs_checked += 1;
            if let Some((_, x)) = gap(&t, &lp_of(&b, &tup), &lp_of(&b, &s)) {
                return witness(lattice, &b, &x).map(Synthesis::Feasible);
            }
        }
    }
    Ok(Synthesis::OnlySymmetric { pairs_checked })
}

/// A map with `p(tuple) > p(permuted)`, where `permuted[k] = tuple[perm[k]]`.
#[derive(Clone, Debug)]
pub struct NonCommutative {
    pub map: SMap,
    pub tuple: Tuple,
    pub perm: Vec<usize>,
    pub gap: Rational,
}

/// Searches atom tuples of distinct, pairwise incompatible atoms and every
/// non-identity permutation for a strictly positive `p(ā) - p(πā)`.
pub fn find_noncommutative(lattice: &Arc<Lattice>, n: usize) -> Result<Option<NonCommutative>> {
    let l = lattice.as_ref();
    check_lattice(l, n)?;
    let mut model = Model::new();
    let b = Block::new(l, n, &mut model.lp);
    model.structural(l, &b);
    let Feasibility::Feasible(t) = feasibility(&model.lp) else {
        return Err(Error::Internal("the unconstrained program is infeasible".into()));
    };
    let perms = all_permutations(n);
    for tup in b.atom_tuples() {
        let candidate = (0..n).all(|i| (i + 1..n).all(|j| tup[i] != tup[j] && !l.is_compatible(tup[i], tup[j])));
        if !candidate {
            continue;
        }
        for perm in perms.iter().skip(1) {
            let permuted: Tuple = perm.iter().map(|&k| tup[k]).collect();
            if let Some((g, x)) = gap(&t, &lp_of(&b, &tup), &lp_of(&b, &permuted)) {
                let map = witness(lattice, &b, &x)?;
                return Ok(Some(NonCommutative { map, tuple: tup, perm: perm.clone(), gap: g }));
            }
        }
    }
    Ok(None)
}

/// Maps of arities `n` and `n + 1` with the same diagonal state and
/// `p_n(tuple) != p_{n+1}(tuple, 1)`.
#[derive(Clone, Debug)]
pub struct MarginalViolation {
    pub p_n: SMap,
    pub p_next: SMap,
    pub tuple: Tuple,
    /// `|p_n(tuple) - p_{n+1}(tuple, 1)|`, always positive.
    pub gap: Rational,
}

struct PairModel {
    model: Model,
    short: Block,
    long: Block,
}

fn pair_model(l: &Lattice, n: usize) -> PairModel {
    let mut model = Model::new();
    let short = Block::new(l, n, &mut model.lp);
    let long = Block::new(l, n + 1, &mut model.lp);
    model.structural(l, &short);
    model.structural(l, &long);
    for e in l.elements().filter(|&e| l.is_atom(e)) {
        let mut terms: Vec<(usize, Rational)> = short.lp_terms(
            &short.expand(l, &vec![e; n]).into_iter().map(|t| (t, Rational::one())).collect::<Vec<_>>(),
        );
        terms.extend(
            long.lp_terms(&long.expand(l, &vec![e; n + 1]).into_iter().map(|t| (t, -Rational::one())).collect::<Vec<_>>()),
        );
        model.lp.add(terms, Relation::Eq, Rational::zero());
    }
    PairModel { model, short, long }
}

/// `p_{n+1}(ā, 1)` as program terms.
fn with_unit(l: &Lattice, long: &Block, t: &[Elem]) -> Vec<(usize, Rational)> {
    let mut full = t.to_vec();
    full.push(l.one());
    long.lp_terms(&long.expand(l, &full).into_iter().map(|t| (t, Rational::one())).collect::<Vec<_>>())
}

pub fn find_marginal_violation(lattice: &Arc<Lattice>, n: usize) -> Result<Option<MarginalViolation>> {
    let l = lattice.as_ref();
    check_lattice(l, n)?;
    let PairModel { model, short, long } = pair_model(l, n);
    let Feasibility::Feasible(t) = feasibility(&model.lp) else {
        return Err(Error::Internal("the unconstrained pair program is infeasible".into()));
    };
    for tup in short.atom_tuples() {
        let a = lp_of(&short, &tup);
        let b = with_unit(l, &long, &tup);
        let found = gap(&t, &a, &b).or_else(|| gap(&t, &b, &a));
        if let Some((g, x)) = found {
            let p_n = witness(lattice, &short, &x)?;
            let p_next = witness(lattice, &long, &x)?;
            return Ok(Some(MarginalViolation { p_n, p_next, tuple: tup, gap: g }));
        }
    }
    Ok(None)
}

/// Maps of arities `n` and `n + 1` with `p_n(ā) = p_{n+1}(ā, 1)` for every
/// `ā` and `p_n` not permutation invariant.
#[derive(Clone, Debug)]
pub struct ConsistentAsymmetric {
    pub p_n: SMap,
    pub p_next: SMap,
    pub tuple: Tuple,
    pub swap: usize,
    pub gap: Rational,
}

/// Searches for a marginally consistent pair whose shorter map is not
/// symmetric. `Ok(None)` means every asymmetry gap has maximum zero.
pub fn find_consistent_asymmetric(lattice: &Arc<Lattice>, n: usize) -> Result<Option<ConsistentAsymmetric>> {
    let l = lattice.as_ref();
    check_lattice(l, n)?;
    let PairModel { mut model, short, long } = pair_model(l, n);
    for tup in short.atom_tuples() {
        let mut terms = lp_of(&short, &tup);
        terms.extend(with_unit(l, &long, &tup).into_iter().map(|(v, k)| (v, -k)));
        model.lp.add(terms, Relation::Eq, Rational::zero());
    }
    let Feasibility::Feasible(t) = feasibility(&model.lp) else {
        return Err(Error::Internal("the consistent pair program is infeasible".into()));
    };
    for tup in short.atom_tuples() {
        for i in 0..n.saturating_sub(1) {
            let mut s = tup.clone();
            s.swap(i, i + 1);
            if s == tup {
                continue;
            }
            if let Some((g, x)) = gap(&t, &lp_of(&short, &tup), &lp_of(&short, &s)) {
                let p_n = witness(lattice, &short, &x)?;
                let p_next = witness(lattice, &long, &x)?;
                return Ok(Some(ConsistentAsymmetric { p_n, p_next, tuple: tup, swap: i, gap: g }));
            }
        }
    }
    Ok(None)
}
