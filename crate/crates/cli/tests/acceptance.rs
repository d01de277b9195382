//! Acceptance gate: one line per criterion, exact rational comparisons.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use common::{
    axiom_equations, pair_observable, random_constraints, random_state, recheck_certificate, synthesized_maps,
    unit_row, Elimination, Recheck,
};
use num_traits::Signed;
use qlp_core::distribution::{self, check_commutativity, check_f_properties, classical_model, marginal_f};
use qlp_core::lattice::{make_boolean, make_mo, Lattice};
use qlp_core::lp::Relation;
use qlp_core::rational::{int, ratio};
use qlp_core::smap::{check_propositions, complete, validate, CompletionError, Property};
use qlp_core::synth::{find_marginal_violation, find_noncommutative, synthesize, ConstraintSet, Symmetry, Synthesis};
use qlp_core::{reference, Elem, Observable, Rational, SMap, State};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn tup(l: &Lattice, labels: &str) -> Vec<Elem> {
    labels.split(',').map(|s| l.parse_element(s).unwrap()).collect()
}

struct System {
    l: Arc<Lattice>,
    p: SMap,
    xs: BTreeMap<String, Observable>,
}

impl System {
    fn load() -> Result<System, String> {
        let l = reference::lattice();
        let q = reference::partial(&l, false).map_err(|e| e.to_string())?;
        let p = complete(&q).map_err(|e| e.describe(&l))?.map;
        let xs = reference::observables(&l);
        Ok(System { l, p, xs })
    }

    fn order(&self, names: &[&str]) -> Vec<&Observable> {
        names.iter().map(|n| &self.xs[*n]).collect()
    }
}

fn reproduction() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_qlp")).args(["verify", "example31"]).output().unwrap();
    ensure!(out.status.code() == Some(0), "verify exited {:?}", out.status.code());

    let s = System::load()?;
    let ones = vec![int(1); 3];
    let f = |names: &[&str]| distribution::f(&s.p, &s.order(names), &ones).unwrap();
    let values = [
        (f(&["x1", "x2", "x3"]), ratio(3, 10)),
        (f(&["x2", "x1", "x3"]), ratio(1, 5)),
        (f(&["x3", "x2", "x1"]), ratio(29, 100)),
    ];
    for (got, want) in &values {
        ensure!(got == want, "F(1,1,1) = {got}, expected {want}");
    }
    let nu = s.p.derived_state();
    for (label, want) in [("a", ratio(3, 10)), ("b", ratio(2, 5)), ("c", ratio(1, 2))] {
        let got = nu.value(s.l.parse_element(label).unwrap());
        ensure!(*got == want, "nu({label}) = {got}, expected {want}");
    }
    Ok("verify exits 0; F = 3/10, 1/5, 29/100; nu(a,b,c) = 3/10, 2/5, 1/2".into())
}

fn completion() -> Outcome {
    let s = System::load()?;
    ensure!(s.p.table().len() == 512, "{} cells", s.p.table().len());
    let v = validate(&s.p);
    ensure!(v.passed(), "validation fails: {v:?}");
    let props = check_propositions(&s.p);
    let failing: Vec<_> = props.checks.iter().filter(|c| !c.holds()).map(|c| c.property.name()).collect();
    ensure!(failing.is_empty(), "failing: {failing:?}");

    let raw = reference::partial(&s.l, true).map_err(|e| e.to_string())?;
    let Err(CompletionError::Inconsistent(inc)) = complete(&raw) else {
        return Err("raw listing completed without conflict".into());
    };
    ensure!(!inc.first_chain.is_empty() && !inc.second_chain.is_empty(), "empty derivation chain");
    let text = CompletionError::Inconsistent(inc).describe(&s.l);
    ensure!(text.contains("p(c,a',c')"), "conflict names another cell: {text}");
    Ok("512 cells, 0 axiom and 0 property violations; raw listing conflicts at p(c,a',c')".into())
}

fn classical() -> Outcome {
    let s = System::load()?;
    let xs = s.order(&["x1", "x2", "x3"]);
    let (model, report) = classical_model(&s.p, &xs).map_err(|e| e.to_string())?;
    ensure!(report.passed(), "model checks fail: {report:?}");
    ensure!(model.total() == int(1), "P(Omega) = {}", model.total());
    let nu = s.p.derived_state();
    let mut laws = 0;
    for (i, x) in xs.iter().enumerate() {
        for r in distribution::grid(x) {
            ensure!(model.law_below(i, &r) == *nu.value(x.below(&r)), "law of coordinate {i} at {r}");
            laws += 1;
        }
    }
    let grids: Vec<Vec<Rational>> = xs.iter().map(|x| distribution::grid(x)).collect();
    let mut points = 0;
    for r1 in &grids[0] {
        for r2 in &grids[1] {
            for r3 in &grids[2] {
                let rs = [r1.clone(), r2.clone(), r3.clone()];
                ensure!(model.f(&rs) == distribution::f(&s.p, &xs, &rs).unwrap(), "F differs at {rs:?}");
                points += 1;
            }
        }
    }
    Ok(format!("P(Omega) = 1, {laws} coordinate laws, F equal at {points} grid points"))
}

fn marginal_symmetry() -> Outcome {
    let s = System::load()?;
    let xs = s.order(&["x1", "x2", "x3"]);
    let swapped = s.order(&["x1", "x3", "x2"]);
    let mut points = 0;
    for r2 in distribution::grid(&s.xs["x2"]) {
        for r3 in distribution::grid(&s.xs["x3"]) {
            let a = marginal_f(&s.p, &xs, &[None, Some(r2.clone()), Some(r3.clone())]).unwrap();
            let b = marginal_f(&s.p, &swapped, &[None, Some(r3.clone()), Some(r2.clone())]).unwrap();
            ensure!(a == b, "asymmetric at r2 = {r2}, r3 = {r3}");
            points += 1;
        }
    }
    let report = check_commutativity(&s.p, &xs).map_err(|e| e.to_string())?;
    ensure!(!report.commutative(), "F reported commutative");
    let w = report.find(&tup(&s.l, "a',b',c'"), &[1, 0, 2]).ok_or("no witness at (a',b',c')")?;
    Ok(format!(
        "marginal symmetric at {points} points; non-commutative, p(a',b',c') = {} vs {}",
        w.value, w.permuted_value
    ))
}

/// `p(a_1, ..., a_n) = μ(a_1 ∧ ... ∧ a_n)`, meets taken on bitmasks.
fn meet_value(mu: &State, t: &[Elem]) -> Rational {
    mu.value(Elem(t.iter().fold(usize::MAX, |m, e| m & e.index()))).clone()
}

/// The axioms, the diagonal on atoms and the orthogonal zeros as a linear
/// system; returns its unique solution if the rank is full.
fn boolean_extension_by_elimination(l: &Arc<Lattice>, mu: &State, n: usize) -> Option<Vec<Rational>> {
    let space = qlp_core::smap::TupleSpace::new(l.len(), n);
    let mut e = Elimination::new();
    for (row, rhs) in axiom_equations(l, n) {
        e.add(row, rhs);
    }
    for &a in l.atoms() {
        e.add(unit_row(space.index(&vec![a; n])), mu.value(a).clone());
    }
    for t in space.iter() {
        if (0..n).any(|i| (i + 1..n).any(|j| l.is_orthogonal(t[i], t[j]))) {
            e.add(unit_row(space.index(&t)), int(0));
        }
    }
    if e.inconsistent {
        return None;
    }
    e.unique_solution(space.cells())
}

fn boolean_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let lattices = [Arc::new(make_boolean(2).unwrap()), Arc::new(make_boolean(3).unwrap())];
    let mut tuples = 0;
    let mut unique = 0;
    for round in 0..100 {
        let l = &lattices[round % 2];
        let mu = random_state(&mut rng, l);
        for n in 2..=3 {
            let c = ConstraintSet { state: Some(mu.clone()), ..Default::default() };
            let Synthesis::Feasible(p) = synthesize(l, n, &c).map_err(|e| e.to_string())? else {
                return Err(format!("state {round} on 2^{} does not extend at n = {n}", round % 2 + 2));
            };
            for (t, v) in p.entries() {
                ensure!(*v == meet_value(&mu, &t), "state {round}, n = {n}: p{t:?} = {v}");
                tuples += 1;
            }
            let x = boolean_extension_by_elimination(l, &mu, n).ok_or("extension not unique")?;
            ensure!(x[..] == p.table()[..], "elimination solution differs, n = {n}");
            unique += 1;
        }
    }
    for k in 1..=3 {
        for n in 1..=3 {
            let l = Arc::new(make_boolean(k).unwrap());
            ensure!(find_noncommutative(&l, n).unwrap().is_none(), "2^{k}, n = {n} non-commutative");
        }
    }
    Ok(format!(
        "100 states, {tuples} tuples equal the meet map; uniqueness by full rank on {unique} systems; no non-commutative map on 2^1..2^3"
    ))
}

fn satisfies(p: &SMap, c: &ConstraintSet) -> bool {
    let values = c.values.iter().all(|v| {
        let x = p.get(&v.tuple);
        match v.rel {
            Relation::Eq => *x == v.value,
            Relation::Le => *x <= v.value,
            Relation::Ge => *x >= v.value,
        }
    });
    let symmetric = c.symmetry != Some(Symmetry::Require)
        || p.entries().all(|(t, v)| {
            let mut s = t.clone();
            s.reverse();
            v == p.get(&s)
        });
    values && symmetric
}

fn synthesis() -> Outcome {
    let l = reference::lattice();
    let p3 = System::load()?.p;
    let p2 = p3.fix_last_to_one().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut feasible, mut by_elimination, mut by_farkas) = (0, 0, 0);
    for round in 0..50 {
        let source = if round % 2 == 0 { &p2 } else { &p3 };
        let c = random_constraints(&mut rng, source);
        match synthesize(&l, source.arity(), &c).map_err(|e| e.to_string())? {
            Synthesis::Feasible(p) => {
                ensure!(validate(&p).passed(), "round {round}: witness fails validation");
                ensure!(satisfies(&p, &c), "round {round}: witness misses a constraint");
                feasible += 1;
            }
            Synthesis::Infeasible(cert) => {
                ensure!(cert.verify(), "round {round}: certificate does not verify");
                match recheck_certificate(&cert, &c, source)? {
                    Recheck::Elimination => by_elimination += 1,
                    Recheck::Farkas => by_farkas += 1,
                }
            }
            Synthesis::OnlySymmetric { .. } => return Err(format!("round {round}: unexpected status")),
        }
    }

    let mut c = ConstraintSet::new();
    c.fix(tup(&l, "a,a"), ratio(3, 10)).fix(tup(&l, "a,1"), ratio(1, 5));
    let Synthesis::Infeasible(cert) = synthesize(&l, 2, &c).map_err(|e| e.to_string())? else {
        return Err("contradictory set reported feasible".into());
    };
    ensure!(cert.verify(), "contradictory certificate does not verify");
    let how = recheck_certificate(&cert, &c, &p2)?;
    ensure!(how == Recheck::Elimination, "contradictory set not confirmed by elimination");
    Ok(format!(
        "50 sets: {feasible} witnesses valid; {} certificates rechecked ({by_elimination} by elimination, {by_farkas} by independent Farkas recomputation); contradictory set certified",
        by_elimination + by_farkas
    ))
}

fn non_marginality() -> Outcome {
    let l = reference::lattice();
    let v = find_marginal_violation(&l, 2).map_err(|e| e.to_string())?.ok_or("no violation found")?;
    ensure!(v.gap.is_positive(), "gap {} is not positive", v.gap);
    ensure!(v.p_n.derived_state() == v.p_next.derived_state(), "diagonal states differ");
    ensure!(validate(&v.p_n).passed() && validate(&v.p_next).passed(), "pair fails validation");
    let mut with_one = v.tuple.clone();
    with_one.push(l.one());
    let diff = (v.p_n.get(&v.tuple) - v.p_next.get(&with_one)).abs();
    ensure!(diff == v.gap, "reported gap {} but values differ by {diff}", v.gap);
    let labels: Vec<String> = v.tuple.iter().map(|&e| l.label(e).to_string()).collect();
    Ok(format!("equal diagonals, p2({}) differs from p3({},1) by {}", labels.join(","), labels.join(","), v.gap))
}

fn systems(p: &SMap) -> Vec<Vec<Observable>> {
    let l = p.lattice();
    let atoms: Vec<_> = l.atoms().iter().copied().filter(|&a| a.index() % 2 == 1).collect();
    let n = p.arity();
    let distinct: Vec<Observable> = (0..n).map(|i| pair_observable(l, atoms[i % atoms.len()])).collect();
    let mut repeated = distinct.clone();
    repeated[1] = repeated[0].compose(&[(int(1), int(1)), (int(-1), int(-1))].into_iter().collect()).unwrap();
    vec![distinct, repeated]
}

fn property_suite() -> Outcome {
    let l = reference::lattice();
    let mut maps = vec![complete(&reference::partial(&l, false).unwrap()).unwrap().map];
    maps.extend(synthesized_maps(3, 20));
    let mut instances: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, p) in maps.iter().enumerate() {
        ensure!(validate(p).passed(), "map {k} is invalid");
        let report = check_propositions(p);
        for property in Property::ALL {
            let c = report.check(property);
            ensure!(c.holds(), "map {k}: {} fails, witness {:?}", property.name(), c.witness);
            *instances.entry(property.name()).or_default() += c.instances;
        }
        for xs in systems(p) {
            let refs: Vec<&Observable> = xs.iter().collect();
            let report = check_f_properties(p, &refs).map_err(|e| e.to_string())?;
            for c in &report.checks {
                ensure!(c.holds(), "map {k}: {} fails, witness {:?}", c.name, c.witness);
                *instances.entry(c.name).or_default() += c.instances;
            }
        }
    }
    let empty: Vec<_> = instances.iter().filter(|(_, &n)| n == 0).map(|(name, _)| *name).collect();
    ensure!(empty.is_empty(), "no instances for {empty:?}");

    let mo2 = Arc::new(make_mo(2).unwrap());
    let broken = SMap::from_fn(mo2, 2, |t| ratio((t[0].index() + 1) as i64, (t[1].index() + 7) as i64)).unwrap();
    let report = check_propositions(&broken);
    for c in report.checks.iter().filter(|c| !c.holds()) {
        let w = c.witness.as_ref().ok_or_else(|| format!("{} fails without a witness", c.property.name()))?;
        ensure!(!w.tuples.is_empty(), "{} witness is empty", c.property.name());
    }
    Ok(format!(
        "{} properties over {} maps, {} instances, 0 violations; violations on a broken map carry witnesses",
        instances.len(),
        maps.len(),
        instances.values().sum::<usize>()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("reference system reproduction", reproduction),
        ("completion consistency", completion),
        ("classical representation", classical),
        ("marginal symmetry and non-commutativity", marginal_symmetry),
        ("Boolean oracle equivalence", boolean_oracle),
        ("synthesis soundness", synthesis),
        ("non-marginality", non_marginality),
        ("property suite", property_suite),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                println!("FAIL {} {name}: {why} ({secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("total {total:.1}s");
    if !failed.is_empty() || total >= 60.0 {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
