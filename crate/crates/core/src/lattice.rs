//! Finite orthomodular lattices.
//!
//! A [`Lattice`] is fully materialized: order matrix, orthocomplement, meet and
//! join tables, atoms and every decomposition of every element into mutually
//! orthogonal atoms. Values are only handed out after all orthomodular-lattice
//! axioms have been checked exhaustively, so every method may assume them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a lattice element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub usize);

impl Elem {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Largest `n` accepted by [`make_mo`].
pub const MAX_MO: usize = 256;
/// Largest `k` accepted by [`make_boolean`].
pub const MAX_BOOLEAN: usize = 10;
/// Lattices up to this size get the witness-search compatibility cross-check
/// at construction time.
const COMPAT_CROSSCHECK_LIMIT: usize = 16;

/// The on-disk form of a lattice: labels, generating order pairs `[i, j]`
/// meaning `i <= j`, the orthocomplement as a list, and the bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDescription {
    pub elements: Vec<String>,
    pub leq: Vec<[usize; 2]>,
    pub ortho: Vec<usize>,
    pub zero: usize,
    pub one: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// Every pair has a meet and a join.
    FiniteMeetsJoins,
    /// `(a')' = a`.
    Involution,
    /// `a v a' = 1`.
    Complement,
    /// `a <= b` implies `b' <= a'`.
    OrderReversing,
    /// `a <= b` implies `b = a v (a' ^ b)`.
    Orthomodular,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::FiniteMeetsJoins,
        Axiom::Involution,
        Axiom::Complement,
        Axiom::OrderReversing,
        Axiom::Orthomodular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::FiniteMeetsJoins => "finite meets and joins",
            Axiom::Involution => "involution",
            Axiom::Complement => "complement",
            Axiom::OrderReversing => "order reversing",
            Axiom::Orthomodular => "orthomodular law",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub holds: bool,
    /// First counterexample in index order.
    pub witness: Option<Vec<Elem>>,
    pub failures: usize,
}

#[derive(Clone, Debug)]
pub struct OmlReport {
    pub checks: Vec<AxiomCheck>,
    /// First element that is not a join of mutually orthogonal atoms.
    pub non_atomistic: Option<Elem>,
    /// Populated when every check passed.
    pub lattice: Option<Lattice>,
}

impl OmlReport {
    pub fn passed(&self) -> bool {
        self.lattice.is_some()
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    labels: Vec<String>,
    lookup: HashMap<String, Elem>,
    size: usize,
    leq: Vec<bool>,
    ortho: Vec<Elem>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    zero: Elem,
    one: Elem,
    atoms: Vec<Elem>,
    decompositions: Vec<Vec<Vec<Elem>>>,
}

/// Order, complement and operation tables before the axioms are known to hold.
struct Tables {
    labels: Vec<String>,
    size: usize,
    leq: Vec<bool>,
    ortho: Vec<Elem>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    zero: Elem,
    one: Elem,
}

/// Validates a lattice description against every orthomodular-lattice axiom.
///
/// Structural problems (bad indices, an order that is not a partial order,
/// missing bounds, a pair without meet or join) are errors; axiom failures
/// are reported with a witness.
pub fn check_oml(desc: &LatticeDescription) -> Result<OmlReport> {
    let tables = Tables::from_description(desc)?;
    Ok(audit(tables))
}

/// `MO_n`: bottom, top and `n` complementary pairs of atoms.
pub fn make_mo(n: usize) -> Result<Lattice> {
    if n == 0 || n > MAX_MO {
        return Err(Error::InvalidArgument(format!("MO_n needs 1 <= n <= {MAX_MO}, got {n}")));
    }
    let size = 2 * n + 2;
    let zero = Elem(0);
    let one = Elem(size - 1);
    let mut labels = vec!["0".to_string()];
    for i in 0..n {
        let base = pair_letter(i, n);
        labels.push(base.clone());
        labels.push(format!("{base}'"));
    }
    labels.push("1".to_string());

    let mut leq = vec![false; size * size];
    for x in 0..size {
        leq[x * size + x] = true;
        leq[x] = true;
        leq[x * size + one.0] = true;
    }
    let mut ortho = vec![Elem(0); size];
    ortho[0] = one;
    ortho[one.0] = zero;
    for i in 0..n {
        ortho[2 * i + 1] = Elem(2 * i + 2);
        ortho[2 * i + 2] = Elem(2 * i + 1);
    }
    let mut meet = vec![zero; size * size];
    let mut join = vec![one; size * size];
    for x in 0..size {
        for y in 0..size {
            let (ex, ey) = (Elem(x), Elem(y));
            meet[x * size + y] = if x == y || ey == one {
                ex
            } else if ex == one {
                ey
            } else {
                zero
            };
            join[x * size + y] = if x == y || ey == zero {
                ex
            } else if ex == zero {
                ey
            } else {
                one
            };
        }
    }
    finish_generated(Tables { labels, size, leq, ortho, meet, join, zero, one })
}

/// The powerset of a `k`-element set with set complement; element indices are
/// the subset bitmasks.
pub fn make_boolean(k: usize) -> Result<Lattice> {
    if k == 0 || k > MAX_BOOLEAN {
        return Err(Error::InvalidArgument(format!(
            "boolean:k needs 1 <= k <= {MAX_BOOLEAN}, got {k}"
        )));
    }
    let size = 1usize << k;
    let full = size - 1;
    let labels = (0..size)
        .map(|mask| match mask {
            0 => "0".to_string(),
            m if m == full => "1".to_string(),
            m => {
                let members: Vec<String> =
                    (0..k).filter(|b| m & (1 << b) != 0).map(|b| (b + 1).to_string()).collect();
                format!("{{{}}}", members.join(","))
            }
        })
        .collect();
    let mut leq = vec![false; size * size];
    let mut meet = vec![Elem(0); size * size];
    let mut join = vec![Elem(0); size * size];
    for x in 0..size {
        for y in 0..size {
            leq[x * size + y] = x & y == x;
            meet[x * size + y] = Elem(x & y);
            join[x * size + y] = Elem(x | y);
        }
    }
    let ortho = (0..size).map(|x| Elem(full & !x)).collect();
    finish_generated(Tables {
        labels,
        size,
        leq,
        ortho,
        meet,
        join,
        zero: Elem(0),
        one: Elem(full),
    })
}

/// Resolves `mo:<n>` and `boolean:<k>` shorthands.
pub fn from_shorthand(spec: &str) -> Result<Lattice> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("expected mo:<n> or boolean:<k>, got {spec:?}")))?;
    let n: usize = arg
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad size in {spec:?}")))?;
    match kind.trim() {
        "mo" => make_mo(n),
        "boolean" => make_boolean(n),
        other => Err(Error::InvalidArgument(format!("unknown lattice family {other:?}"))),
    }
}

fn pair_letter(i: usize, n: usize) -> String {
    if n <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{}", i + 1)
    }
}

fn finish_generated(tables: Tables) -> Result<Lattice> {
    let report = audit(tables);
    match report.lattice {
        Some(l) => Ok(l),
        None => Err(Error::Internal(format!(
            "generated lattice failed its own audit: {:?}",
            report.first_failure()
        ))),
    }
}

impl Tables {
    fn from_description(desc: &LatticeDescription) -> Result<Tables> {
        let size = desc.elements.len();
        if size == 0 {
            return Err(Error::Structural("lattice has no elements".into()));
        }
        let mut seen = HashMap::new();
        for (i, label) in desc.elements.iter().enumerate() {
            if let Some(prev) = seen.insert(label.as_str(), i) {
                return Err(Error::Structural(format!(
                    "duplicate label {label:?} at indices {prev} and {i}"
                )));
            }
        }
        let check_index = |i: usize, what: &str| {
            if i < size {
                Ok(Elem(i))
            } else {
                Err(Error::Structural(format!("{what} index {i} out of range 0..{size}")))
            }
        };
        let zero = check_index(desc.zero, "zero")?;
        let one = check_index(desc.one, "one")?;
        if desc.ortho.len() != size {
            return Err(Error::Structural(format!(
                "ortho has {} entries for {size} elements",
                desc.ortho.len()
            )));
        }
        let ortho = desc
            .ortho
            .iter()
            .map(|&j| check_index(j, "ortho"))
            .collect::<Result<Vec<_>>>()?;

        let mut order = BitRows::new(size);
        for i in 0..size {
            order.set(i, i);
        }
        for &[i, j] in &desc.leq {
            check_index(i, "leq")?;
            check_index(j, "leq")?;
            order.set(i, j);
        }
        order.transitive_closure();
        for i in 0..size {
            for j in (i + 1)..size {
                if order.get(i, j) && order.get(j, i) {
                    return Err(Error::Structural(format!(
                        "order is not antisymmetric: {:?} and {:?} are mutually below each other",
                        desc.elements[i], desc.elements[j]
                    )));
                }
            }
        }
        for x in 0..size {
            if !order.get(zero.0, x) {
                return Err(Error::Structural(format!(
                    "zero {:?} is not below {:?}",
                    desc.elements[zero.0], desc.elements[x]
                )));
            }
            if !order.get(x, one.0) {
                return Err(Error::Structural(format!(
                    "{:?} is not below one {:?}",
                    desc.elements[x], desc.elements[one.0]
                )));
            }
        }

        let down = order.transposed();
        let rank: Vec<usize> = (0..size).map(|x| down.count(x)).collect();
        let mut meet = vec![zero; size * size];
        let mut join = vec![one; size * size];
        for a in 0..size {
            for b in a..size {
                let lower = down.intersect(a, b);
                let glb = greatest_of(&lower, &rank, &down).ok_or_else(|| {
                    Error::Structural(format!(
                        "no meet for ({:?}, {:?})",
                        desc.elements[a], desc.elements[b]
                    ))
                })?;
                let upper = order.intersect(a, b);
                let lub = greatest_of(&upper, &rank.iter().map(|r| size - r).collect::<Vec<_>>(), &order)
                    .ok_or_else(|| {
                        Error::Structural(format!(
                            "no join for ({:?}, {:?})",
                            desc.elements[a], desc.elements[b]
                        ))
                    })?;
                meet[a * size + b] = Elem(glb);
                meet[b * size + a] = Elem(glb);
                join[a * size + b] = Elem(lub);
                join[b * size + a] = Elem(lub);
            }
        }
        let mut leq = vec![false; size * size];
        for i in 0..size {
            for j in 0..size {
                leq[i * size + j] = order.get(i, j);
            }
        }
        Ok(Tables {
            labels: desc.elements.clone(),
            size,
            leq,
            ortho,
            meet,
            join,
            zero,
            one,
        })
    }

    #[inline]
    fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }
    #[inline]
    fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b].0
    }
    #[inline]
    fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b].0
    }
    #[inline]
    fn ortho(&self, a: usize) -> usize {
        self.ortho[a].0
    }
}

/// Among the candidate set (bitset), the element whose down-set (in `rel`,
/// row `x` = things related to `x`) contains every candidate. Candidates are
/// tried by decreasing `key`.
fn greatest_of(candidates: &[u64], key: &[usize], rel: &BitRows) -> Option<usize> {
    let mut best: Option<usize> = None;
    for x in iter_bits(candidates) {
        if best.is_none_or(|b| key[x] > key[b]) {
            best = Some(x);
        }
    }
    let g = best?;
    let covers_all = candidates
        .iter()
        .zip(rel.row(g))
        .all(|(c, r)| c & !r == 0);
    covers_all.then_some(g)
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut bits = word;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let tz = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(w * 64 + tz)
        })
    })
}

/// Square boolean matrix stored as bit rows.
struct BitRows {
    size: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(size: usize) -> Self {
        let words = size.div_ceil(64);
        BitRows { size, words, bits: vec![0; size * words] }
    }
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }
    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }
    fn count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }
    fn intersect(&self, a: usize, b: usize) -> Vec<u64> {
        self.row(a).iter().zip(self.row(b)).map(|(x, y)| x & y).collect()
    }
    fn transitive_closure(&mut self) {
        for k in 0..self.size {
            let row_k: Vec<u64> = self.row(k).to_vec();
            for i in 0..self.size {
                if self.get(i, k) {
                    let start = i * self.words;
                    for (w, bits) in row_k.iter().enumerate() {
                        self.bits[start + w] |= bits;
                    }
                }
            }
        }
    }
    fn transposed(&self) -> BitRows {
        let mut t = BitRows::new(self.size);
        for i in 0..self.size {
            for j in iter_bits(self.row(i)).collect::<Vec<_>>() {
                t.set(j, i);
            }
        }
        t
    }
}

fn audit(t: Tables) -> OmlReport {
    let size = t.size;
    let mut checks = Vec::with_capacity(5);
    checks.push(AxiomCheck { axiom: Axiom::FiniteMeetsJoins, holds: true, witness: None, failures: 0 });

    let mut involution = Recorder::new(Axiom::Involution);
    let mut complement = Recorder::new(Axiom::Complement);
    for a in 0..size {
        if t.ortho(t.ortho(a)) != a {
            involution.fail(&[a]);
        }
        if t.join(a, t.ortho(a)) != t.one.0 {
            complement.fail(&[a]);
        }
    }
    let mut reversing = Recorder::new(Axiom::OrderReversing);
    let mut orthomodular = Recorder::new(Axiom::Orthomodular);
    for a in 0..size {
        for b in 0..size {
            if !t.leq(a, b) {
                continue;
            }
            if !t.leq(t.ortho(b), t.ortho(a)) {
                reversing.fail(&[a, b]);
            }
            if t.join(a, t.meet(t.ortho(a), b)) != b {
                orthomodular.fail(&[a, b]);
            }
        }
    }
    checks.extend([involution, complement, reversing, orthomodular].map(Recorder::finish));

    if checks.iter().any(|c| !c.holds) {
        return OmlReport { checks, non_atomistic: None, lattice: None };
    }

    let atoms: Vec<Elem> = (0..size)
        .filter(|&x| x != t.zero.0)
        .filter(|&x| (0..size).all(|c| c == t.zero.0 || c == x || !(t.leq(c, x))))
        .map(Elem)
        .collect();
    let decompositions: Vec<Vec<Vec<Elem>>> =
        (0..size).map(|e| orthogonal_atom_sets(&t, &atoms, e)).collect();
    let non_atomistic = decompositions.iter().position(|d| d.is_empty()).map(Elem);
    if non_atomistic.is_some() {
        return OmlReport { checks, non_atomistic, lattice: None };
    }

    let lookup = t.labels.iter().enumerate().map(|(i, l)| (l.clone(), Elem(i))).collect();
    let lattice = Lattice {
        labels: t.labels,
        lookup,
        size,
        leq: t.leq,
        ortho: t.ortho,
        meet: t.meet,
        join: t.join,
        zero: t.zero,
        one: t.one,
        atoms,
        decompositions,
    };
    if size <= COMPAT_CROSSCHECK_LIMIT {
        for a in lattice.elements() {
            for b in lattice.elements() {
                if lattice.is_compatible(a, b) != lattice.compatible_by_witness(a, b) {
                    // Both characterizations are equivalent on an OML; a
                    // mismatch means the tables are wrong.
                    checks.push(AxiomCheck {
                        axiom: Axiom::Orthomodular,
                        holds: false,
                        witness: Some(vec![a, b]),
                        failures: 1,
                    });
                    return OmlReport { checks, non_atomistic: None, lattice: None };
                }
            }
        }
    }
    OmlReport { checks, non_atomistic: None, lattice: Some(lattice) }
}

struct Recorder {
    axiom: Axiom,
    witness: Option<Vec<Elem>>,
    failures: usize,
}

impl Recorder {
    fn new(axiom: Axiom) -> Self {
        Recorder { axiom, witness: None, failures: 0 }
    }
    fn fail(&mut self, elems: &[usize]) {
        self.failures += 1;
        if self.witness.is_none() {
            self.witness = Some(elems.iter().copied().map(Elem).collect());
        }
    }
    fn finish(self) -> AxiomCheck {
        AxiomCheck {
            axiom: self.axiom,
            holds: self.failures == 0,
            witness: self.witness,
            failures: self.failures,
        }
    }
}

/// Every set of mutually orthogonal atoms whose join is `target`, each sorted,
/// in lexicographic order.
fn orthogonal_atom_sets(t: &Tables, atoms: &[Elem], target: usize) -> Vec<Vec<Elem>> {
    let below: Vec<usize> = atoms.iter().map(|a| a.0).filter(|&a| t.leq(a, target)).collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn walk(
        t: &Tables,
        below: &[usize],
        start: usize,
        acc: usize,
        target: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<Elem>>,
    ) {
        if acc == target {
            out.push(current.iter().copied().map(Elem).collect());
        }
        for idx in start..below.len() {
            let atom = below[idx];
            if current.iter().all(|&c| t.leq(c, t.ortho(atom))) {
                current.push(atom);
                walk(t, below, idx + 1, t.join(acc, atom), target, current, out);
                current.pop();
            }
        }
    }
    walk(t, &below, 0, t.zero.0, target, &mut current, &mut out);
    out
}

impl Lattice {
    /// Validates a description; axiom failures and non-atomistic lattices are
    /// rejected with [`Error::InvalidArgument`].
    pub fn from_description(desc: &LatticeDescription) -> Result<Lattice> {
        let report = check_oml(desc)?;
        if let Some(l) = report.lattice {
            return Ok(l);
        }
        if let Some(e) = report.non_atomistic {
            return Err(Error::InvalidArgument(format!(
                "element {:?} is not a join of orthogonal atoms",
                desc.elements[e.0]
            )));
        }
        let fail = report.first_failure().expect("failed report has a failing check");
        let witness: Vec<&str> = fail
            .witness
            .iter()
            .flatten()
            .map(|e| desc.elements[e.0].as_str())
            .collect();
        Err(Error::InvalidArgument(format!(
            "not an orthomodular lattice: {} fails at {:?}",
            fail.axiom.name(),
            witness
        )))
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.size).map(Elem)
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn label(&self, e: Elem) -> &str {
        &self.labels[e.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks up a label; `⊥` is accepted in place of `'`.
    pub fn element(&self, label: &str) -> Option<Elem> {
        let label = label.trim();
        self.lookup
            .get(label)
            .or_else(|| self.lookup.get(&label.replace('⊥', "'")))
            .copied()
    }

    pub fn parse_element(&self, label: &str) -> Result<Elem> {
        self.element(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.0 * self.size + b.0]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a.0 * self.size + b.0]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a.0 * self.size + b.0]
    }

    pub fn ortho(&self, a: Elem) -> Elem {
        self.ortho[a.0]
    }

    pub fn join_all(&self, elems: impl IntoIterator<Item = Elem>) -> Elem {
        elems.into_iter().fold(self.zero, |acc, e| self.join(acc, e))
    }

    pub fn meet_all(&self, elems: impl IntoIterator<Item = Elem>) -> Elem {
        elems.into_iter().fold(self.one, |acc, e| self.meet(acc, e))
    }

    pub fn atoms(&self) -> &[Elem] {
        &self.atoms
    }

    pub fn is_atom(&self, e: Elem) -> bool {
        self.atoms.binary_search(&e).is_ok()
    }

    /// `a ⊥ b` iff `a <= b'`.
    pub fn is_orthogonal(&self, a: Elem, b: Elem) -> bool {
        self.leq(a, self.ortho(b))
    }

    /// Compatibility by the distributive criterion `a = (a v b) ^ (a v b')`.
    pub fn is_compatible(&self, a: Elem, b: Elem) -> bool {
        a == self.meet(self.join(a, b), self.join(a, self.ortho(b)))
    }

    /// Compatibility by exhaustive search for mutually orthogonal `a1, b1, c`
    /// with `a = a1 v c` and `b = b1 v c`.
    pub fn compatible_by_witness(&self, a: Elem, b: Elem) -> bool {
        self.compatibility_witness(a, b).is_some()
    }

    pub fn compatibility_witness(&self, a: Elem, b: Elem) -> Option<(Elem, Elem, Elem)> {
        for c in self.elements().filter(|&c| self.leq(c, a) && self.leq(c, b)) {
            for a1 in self.elements() {
                if !self.leq(a1, a) || !self.is_orthogonal(a1, c) || self.join(a1, c) != a {
                    continue;
                }
                for b1 in self.elements() {
                    if self.leq(b1, b)
                        && self.is_orthogonal(b1, c)
                        && self.is_orthogonal(b1, a1)
                        && self.join(b1, c) == b
                    {
                        return Some((a1, b1, c));
                    }
                }
            }
        }
        None
    }

    /// All sets of mutually orthogonal atoms joining to `e`; `[[]]` for zero.
    pub fn atom_decompositions(&self, e: Elem) -> &[Vec<Elem>] {
        &self.decompositions[e.0]
    }

    /// The first decomposition of `e`, used when any one will do.
    pub fn canonical_decomposition(&self, e: Elem) -> &[Elem] {
        &self.decompositions[e.0][0]
    }

    /// True when every pair of elements is compatible.
    pub fn is_boolean(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.is_compatible(a, b)))
    }

    /// Serializable form using the covering relation.
    pub fn description(&self) -> LatticeDescription {
        let mut order = BitRows::new(self.size);
        for a in 0..self.size {
            for b in 0..self.size {
                if a != b && self.leq[a * self.size + b] {
                    order.set(a, b);
                }
            }
        }
        let mut leq = Vec::new();
        for b in 0..self.size {
            for a in 0..self.size {
                if !order.get(a, b) {
                    continue;
                }
                // a < b is a cover when nothing strictly above a is strictly below b.
                let covered = order
                    .row(a)
                    .iter()
                    .enumerate()
                    .all(|(w, bits)| {
                        let mut bits = *bits;
                        while bits != 0 {
                            let c = w * 64 + bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            if c != b && order.get(c, b) {
                                return false;
                            }
                        }
                        true
                    });
                if covered {
                    leq.push([a, b]);
                }
            }
        }
        leq.sort_unstable();
        LatticeDescription {
            elements: self.labels.clone(),
            leq,
            ortho: self.ortho.iter().map(|e| e.0).collect(),
            zero: self.zero.0,
            one: self.one.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(l: &Lattice, s: &str) -> Elem {
        l.parse_element(s).unwrap()
    }

    #[test]
    fn mo3_shape() {
        let l = make_mo(3).unwrap();
        assert_eq!(l.len(), 8);
        assert_eq!(l.atoms().len(), 6);
        assert_eq!(l.labels(), ["0", "a", "a'", "b", "b'", "c", "c'", "1"]);
        assert_eq!(e(&l, "a⊥"), e(&l, "a'"));
        assert!(!l.is_boolean());
    }

    #[test]
    fn mo1_is_boolean_and_mo2_is_not() {
        let l = make_mo(1).unwrap();
        assert_eq!(l.len(), 4);
        assert!(l.is_boolean());
        let l2 = make_mo(2).unwrap();
        assert_eq!(l2.len(), 6);
        let (a, b) = (e(&l2, "a"), e(&l2, "b"));
        assert_eq!(l2.meet(a, b), l2.zero());
        assert_eq!(l2.join(a, b), l2.one());
        assert!(!l2.is_boolean());
    }

    #[test]
    fn generator_bounds() {
        assert!(matches!(make_mo(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_boolean(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_boolean(11), Err(Error::InvalidArgument(_))));
        assert!(from_shorthand("mo:x").is_err());
        assert!(from_shorthand("torus:3").is_err());
        assert_eq!(from_shorthand("boolean:3").unwrap().len(), 8);
    }

    #[test]
    fn boolean_sizes_and_compatibility() {
        let b1 = make_boolean(1).unwrap();
        assert_eq!(b1.len(), 2);
        let b2 = make_boolean(2).unwrap();
        assert!(b2.is_compatible(e(&b2, "{1}"), e(&b2, "{2}")));
        let b3 = make_boolean(3).unwrap();
        assert_eq!(b3.len(), 8);
        assert!(b3.is_boolean());
    }

    #[test]
    fn orthogonality_in_mo3() {
        let l = make_mo(3).unwrap();
        assert!(l.is_orthogonal(e(&l, "a"), e(&l, "a'")));
        assert!(!l.is_orthogonal(e(&l, "a"), e(&l, "b")));
        for x in l.elements() {
            assert!(l.is_orthogonal(l.zero(), x));
        }
    }

    #[test]
    fn compatibility_in_mo3() {
        let l = make_mo(3).unwrap();
        let (a, b) = (e(&l, "a"), e(&l, "b"));
        assert!(!l.is_compatible(a, b));
        assert!(!l.compatible_by_witness(a, b));
        assert!(l.is_compatible(a, e(&l, "a'")));
        assert_eq!(
            l.compatibility_witness(a, e(&l, "a'")),
            Some((a, e(&l, "a'"), l.zero()))
        );
    }

    #[test]
    fn decompositions() {
        let l = make_mo(3).unwrap();
        let names = |sets: &[Vec<Elem>]| -> Vec<Vec<String>> {
            sets.iter()
                .map(|s| s.iter().map(|&x| l.label(x).to_string()).collect())
                .collect()
        };
        assert_eq!(
            names(l.atom_decompositions(l.one())),
            vec![vec!["a", "a'"], vec!["b", "b'"], vec!["c", "c'"]]
        );
        assert_eq!(names(l.atom_decompositions(e(&l, "a"))), vec![vec!["a"]]);
        assert_eq!(l.atom_decompositions(l.zero()), &[Vec::<Elem>::new()]);

        let b2 = make_boolean(2).unwrap();
        assert_eq!(
            b2.atom_decompositions(b2.one()),
            &[vec![e(&b2, "{1}"), e(&b2, "{2}")]]
        );
    }

    #[test]
    fn description_round_trip() {
        for l in [make_mo(3).unwrap(), make_boolean(3).unwrap()] {
            let desc = l.description();
            let back = Lattice::from_description(&desc).unwrap();
            assert_eq!(back, l);
        }
        // Hasse diagram of MO3: 0 below each atom, each atom below 1.
        assert_eq!(make_mo(3).unwrap().description().leq.len(), 12);
    }

    #[test]
    fn broken_ortho_fails_involution_only() {
        let mut desc = make_mo(3).unwrap().description();
        // ortho(a) = b, everything else untouched
        desc.ortho[1] = 3;
        let report = check_oml(&desc).unwrap();
        assert!(!report.passed());
        let failing: Vec<Axiom> = report.checks.iter().filter(|c| !c.holds).map(|c| c.axiom).collect();
        assert_eq!(failing, vec![Axiom::Involution]);
        let inv = &report.checks[1];
        assert_eq!(inv.witness.as_deref(), Some(&[Elem(1)][..]));
    }

    #[test]
    fn self_orthocomplement_fails_complement_axiom() {
        let mut desc = make_mo(3).unwrap().description();
        desc.ortho[1] = 1;
        desc.ortho[2] = 2;
        let report = check_oml(&desc).unwrap();
        let comp = report.checks.iter().find(|c| c.axiom == Axiom::Complement).unwrap();
        assert!(!comp.holds);
        assert_eq!(comp.witness.as_deref(), Some(&[Elem(1)][..]));
    }

    #[test]
    fn structural_errors() {
        // a and b with no join: 0 < a, 0 < b, no top above both except via missing pairs.
        let desc = LatticeDescription {
            elements: vec!["0".into(), "a".into(), "b".into(), "c".into(), "d".into(), "1".into()],
            // a,b both below c and d: no least upper bound
            leq: vec![[0, 1], [0, 2], [1, 3], [2, 3], [1, 4], [2, 4], [3, 5], [4, 5]],
            ortho: vec![5, 4, 3, 2, 1, 0],
            zero: 0,
            one: 5,
        };
        let err = check_oml(&desc).unwrap_err();
        assert!(matches!(err, Error::Structural(ref m) if m.contains("no join")), "{err}");

        let cyclic = LatticeDescription {
            elements: vec!["0".into(), "a".into(), "b".into(), "1".into()],
            leq: vec![[0, 1], [1, 2], [2, 1], [2, 3]],
            ortho: vec![3, 2, 1, 0],
            zero: 0,
            one: 3,
        };
        assert!(matches!(check_oml(&cyclic), Err(Error::Structural(_))));

        let short = LatticeDescription {
            elements: vec!["0".into(), "1".into()],
            leq: vec![[0, 1]],
            ortho: vec![1],
            zero: 0,
            one: 1,
        };
        assert!(matches!(check_oml(&short), Err(Error::Structural(_))));
    }

    #[test]
    fn non_orthomodular_benzene_is_rejected() {
        // The hexagon O6: 0 < x < y < 1, 0 < y' < x' < 1. Ortholattice, not orthomodular.
        let desc = LatticeDescription {
            elements: vec!["0".into(), "x".into(), "y".into(), "y'".into(), "x'".into(), "1".into()],
            leq: vec![[0, 1], [1, 2], [2, 5], [0, 3], [3, 4], [4, 5]],
            ortho: vec![5, 4, 3, 2, 1, 0],
            zero: 0,
            one: 5,
        };
        let report = check_oml(&desc).unwrap();
        let om = report.checks.iter().find(|c| c.axiom == Axiom::Orthomodular).unwrap();
        assert!(!om.holds);
        assert_eq!(om.witness.as_deref(), Some(&[Elem(1), Elem(2)][..]));
        assert!(Lattice::from_description(&desc).is_err());
    }
}
