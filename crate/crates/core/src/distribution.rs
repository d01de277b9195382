//! Joint distributions and distribution functions of finite observables under
//! an s-map, and the classical probability space over the product of spectra.
//!
//! `F` is a step function that only changes at spectrum points, so every
//! property is checked on the grid made of all spectrum points plus one
//! sentinel below the minimum and one above the maximum of each observable.

use num_traits::{One, Zero};

use crate::borel::BorelSet;
use crate::error::{Error, Result};
use crate::lattice::Elem;
use crate::observable::{observables_compatible, same_lattice, Observable};
use crate::rational::{int, Rational};
use crate::smap::{all_permutations, SMap, Tuple};

fn check_inputs(p: &SMap, xs: &[&Observable], len: usize) -> Result<()> {
    if xs.len() != p.arity() {
        return Err(Error::InvalidArgument(format!(
            "{} observables for an arity-{} map",
            xs.len(),
            p.arity()
        )));
    }
    if len != xs.len() {
        return Err(Error::InvalidArgument(format!("{len} arguments for {} observables", xs.len())));
    }
    if xs.iter().any(|x| !same_lattice(x.lattice(), p.lattice())) {
        return Err(Error::InvalidArgument("observable on a different lattice than the map".into()));
    }
    Ok(())
}

/// `p(x_1(E_1), ..., x_n(E_n))`.
pub fn joint(p: &SMap, xs: &[&Observable], es: &[BorelSet]) -> Result<Rational> {
    check_inputs(p, xs, es.len())?;
    let t: Tuple = xs.iter().zip(es).map(|(x, e)| x.apply(e)).collect();
    Ok(p.get(&t).clone())
}

/// `F(r_1, ..., r_n) = p(x_1(-inf, r_1), ..., x_n(-inf, r_n))`.
pub fn f(p: &SMap, xs: &[&Observable], rs: &[Rational]) -> Result<Rational> {
    check_inputs(p, xs, rs.len())?;
    Ok(p.get(&below_tuple(xs, rs)).clone())
}

/// `F` with coordinates given as `None` sent to `+inf`, which puts `1` in
/// that coordinate.
pub fn marginal_f(p: &SMap, xs: &[&Observable], rs: &[Option<Rational>]) -> Result<Rational> {
    check_inputs(p, xs, rs.len())?;
    let one = p.lattice().one();
    let t: Tuple = xs
        .iter()
        .zip(rs)
        .map(|(x, r)| r.as_ref().map_or(one, |r| x.below(r)))
        .collect();
    Ok(p.get(&t).clone())
}

fn below_tuple(xs: &[&Observable], rs: &[Rational]) -> Tuple {
    xs.iter().zip(rs).map(|(x, r)| x.below(r)).collect()
}

/// Spectrum points of `x` with a sentinel one below and one above.
pub fn grid(x: &Observable) -> Vec<Rational> {
    let s = x.spectrum();
    let mut g = Vec::with_capacity(s.len() + 2);
    g.push(&s[0] - int(1));
    g.extend(s.iter().cloned());
    g.push(&s[s.len() - 1] + int(1));
    g
}

/// All grid points of the product grid, as index vectors.
fn grid_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &k in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

/// A failing instance: the arguments and the values compared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridWitness {
    pub at: Vec<Rational>,
    pub values: Vec<Rational>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCheck {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub witness: Option<GridWitness>,
}

impl GridCheck {
    fn new(name: &'static str) -> Self {
        GridCheck { name, instances: 0, failures: 0, witness: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> GridWitness) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn holds(&self) -> bool {
        self.failures == 0
    }

    /// No instance applied.
    pub fn vacuous(&self) -> bool {
        self.instances == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridReport {
    pub checks: Vec<GridCheck>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(GridCheck::holds)
    }

    pub fn check(&self, name: &str) -> Option<&GridCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const F_BOUNDS: &str = "bounds";
pub const F_MONOTONE: &str = "monotone";
pub const F_UPPER_LIMIT: &str = "upper-limit";
pub const F_LOWER_LIMIT: &str = "lower-limit";
pub const F_COMPATIBLE_COMMUTATIVITY: &str = "compatible-commutativity";

/// Bounds, monotonicity, both limits and, when some pair of observables is
/// compatible, invariance under every simultaneous permutation, all on the
/// full grid.
pub fn check_f_properties(p: &SMap, xs: &[&Observable]) -> Result<GridReport> {
    check_inputs(p, xs, xs.len())?;
    let n = xs.len();
    let grids: Vec<Vec<Rational>> = xs.iter().map(|x| grid(x)).collect();
    let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
    let points = grid_indices(&sizes);
    let at = |idx: &[usize]| -> Vec<Rational> { idx.iter().enumerate().map(|(i, &k)| grids[i][k].clone()).collect() };
    let value = |idx: &[usize]| p.get(&below_tuple(xs, &at(idx))).clone();

    let mut bounds = GridCheck::new(F_BOUNDS);
    let mut monotone = GridCheck::new(F_MONOTONE);
    let mut upper = GridCheck::new(F_UPPER_LIMIT);
    let mut lower = GridCheck::new(F_LOWER_LIMIT);
    let mut commut = GridCheck::new(F_COMPATIBLE_COMMUTATIVITY);

    let compatible = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| observables_compatible(xs[i], xs[j]))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .any(|c| c);
    let perms = all_permutations(n);

    for idx in &points {
        let v = value(idx);
        bounds.record(v >= Rational::zero() && v <= Rational::one(), || GridWitness {
            at: at(idx),
            values: vec![v.clone()],
            note: String::new(),
        });
        for i in 0..n {
            if idx[i] + 1 < sizes[i] {
                let mut next = idx.clone();
                next[i] += 1;
                let w = value(&next);
                monotone.record(v <= w, || GridWitness {
                    at: at(idx),
                    values: vec![v.clone(), w.clone()],
                    note: format!("coordinate {} raised to {}", i + 1, grids[i][next[i]]),
                });
            }
            if idx[i] == sizes[i] - 1 {
                let mut rs: Vec<Option<Rational>> = at(idx).into_iter().map(Some).collect();
                rs[i] = None;
                let m = marginal_f(p, xs, &rs)?;
                upper.record(v == m, || GridWitness {
                    at: at(idx),
                    values: vec![v.clone(), m.clone()],
                    note: format!("coordinate {} beyond the spectrum", i + 1),
                });
            }
            if idx[i] == 0 {
                lower.record(v.is_zero(), || GridWitness {
                    at: at(idx),
                    values: vec![v.clone()],
                    note: format!("coordinate {} below the spectrum", i + 1),
                });
            }
        }
        if compatible {
            let rs = at(idx);
            for perm in perms.iter().skip(1) {
                let pxs: Vec<&Observable> = perm.iter().map(|&k| xs[k]).collect();
                let prs: Vec<Rational> = perm.iter().map(|&k| rs[k].clone()).collect();
                let w = p.get(&below_tuple(&pxs, &prs)).clone();
                commut.record(v == w, || GridWitness {
                    at: rs.clone(),
                    values: vec![v.clone(), w.clone()],
                    note: format!("permutation {}", show_perm(perm)),
                });
            }
        }
    }
    Ok(GridReport { checks: vec![bounds, monotone, upper, lower, commut] })
}

/// 1-based image list, `[2, 1, 3]` for the swap of the first two.
pub fn show_perm(perm: &[usize]) -> String {
    let parts: Vec<String> = perm.iter().map(|k| (k + 1).to_string()).collect();
    format!("[{}]", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativityViolation {
    /// Spectrum points `(t_1, ..., t_n)`.
    pub points: Vec<Rational>,
    /// `(x_1({t_1}), ..., x_n({t_n}))`.
    pub tuple: Tuple,
    /// The permuted tuple is `perm.map(|k| tuple[k])`.
    pub perm: Vec<usize>,
    pub value: Rational,
    pub permuted_value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativityReport {
    pub checked: usize,
    pub violations: Vec<CommutativityViolation>,
}

impl CommutativityReport {
    pub fn commutative(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn find(&self, tuple: &[Elem], perm: &[usize]) -> Option<&CommutativityViolation> {
        self.violations.iter().find(|v| v.tuple == tuple && v.perm == perm)
    }
}

/// Invariance of `p` on spectrum-singleton tuples under every permutation.
/// By additivity in each coordinate this decides invariance on all
/// `(x_1(E_1), ..., x_n(E_n))`.
pub fn check_commutativity(p: &SMap, xs: &[&Observable]) -> Result<CommutativityReport> {
    check_inputs(p, xs, xs.len())?;
    let n = xs.len();
    let sizes: Vec<usize> = xs.iter().map(|x| x.spectrum().len()).collect();
    let perms = all_permutations(n);
    let mut checked = 0;
    let mut violations = Vec::new();
    for idx in grid_indices(&sizes) {
        let points: Vec<Rational> = idx.iter().enumerate().map(|(i, &k)| xs[i].spectrum()[k].clone()).collect();
        let tuple: Tuple = xs.iter().zip(&points).map(|(x, t)| x.at_point(t)).collect();
        let value = p.get(&tuple);
        for perm in perms.iter().skip(1) {
            checked += 1;
            let permuted: Tuple = perm.iter().map(|&k| tuple[k]).collect();
            let permuted_value = p.get(&permuted);
            if value != permuted_value {
                violations.push(CommutativityViolation {
                    points: points.clone(),
                    tuple: tuple.clone(),
                    perm: perm.clone(),
                    value: value.clone(),
                    permuted_value: permuted_value.clone(),
                });
            }
        }
    }
    Ok(CommutativityReport { checked, violations })
}

/// `Ω = σ(x_1) × ... × σ(x_n)` with point masses
/// `P({ω}) = p(x_1({ω_1}), ..., x_n({ω_n}))`; `ξ_i` is the `i`-th projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalModel {
    pub omega: Vec<Vec<Rational>>,
    pub masses: Vec<Rational>,
}

impl ClassicalModel {
    /// `P(A)` for `A` given by a predicate on outcomes.
    pub fn probability(&self, a: impl Fn(&[Rational]) -> bool) -> Rational {
        self.omega
            .iter()
            .zip(&self.masses)
            .filter(|(w, _)| a(w))
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// `P(ξ_i < r)`.
    pub fn law_below(&self, i: usize, r: &Rational) -> Rational {
        self.probability(|w| w[i] < *r)
    }

    /// `F_ξ(r) = P(ξ_1 < r_1, ..., ξ_n < r_n)`.
    pub fn f(&self, rs: &[Rational]) -> Rational {
        self.probability(|w| w.iter().zip(rs).all(|(t, r)| t < r))
    }

    pub fn total(&self) -> Rational {
        self.masses.iter().cloned().sum()
    }
}

/// Outcome sets of at most this many points get the exhaustive additivity
/// check over all disjoint pairs of events.
const ADDITIVITY_EXHAUSTIVE_LIMIT: usize = 8;

pub const MODEL_TOTAL: &str = "total-mass";
pub const MODEL_EMPTY: &str = "empty-event";
pub const MODEL_ADDITIVITY: &str = "additivity";
pub const MODEL_LAWS: &str = "coordinate-laws";
pub const MODEL_F: &str = "distribution-function";

/// Builds the model and checks it: nonnegative masses and `P(Ω) = 1` are
/// required for construction; additivity, `P(ξ_i < r) = ν(x_i(-inf, r))` at
/// every grid threshold and `F_ξ = F_x` on the full grid are reported.
pub fn classical_model(p: &SMap, xs: &[&Observable]) -> Result<(ClassicalModel, GridReport)> {
    check_inputs(p, xs, xs.len())?;
    let sizes: Vec<usize> = xs.iter().map(|x| x.spectrum().len()).collect();
    let mut omega = Vec::new();
    let mut masses = Vec::new();
    for idx in grid_indices(&sizes) {
        let w: Vec<Rational> = idx.iter().enumerate().map(|(i, &k)| xs[i].spectrum()[k].clone()).collect();
        let t: Tuple = xs.iter().zip(&w).map(|(x, r)| x.at_point(r)).collect();
        let m = p.get(&t).clone();
        if m < Rational::zero() {
            return Err(Error::Model(format!("negative point mass {m} at {w:?}")));
        }
        omega.push(w);
        masses.push(m);
    }
    let model = ClassicalModel { omega, masses };
    let total = model.total();
    if !total.is_one() {
        return Err(Error::Model(format!("point masses sum to {total}, not 1")));
    }

    let mut total_check = GridCheck::new(MODEL_TOTAL);
    total_check.record(total.is_one(), || GridWitness { at: vec![], values: vec![total.clone()], note: String::new() });
    let mut empty = GridCheck::new(MODEL_EMPTY);
    let empty_p = model.probability(|_| false);
    empty.record(empty_p.is_zero(), || GridWitness { at: vec![], values: vec![empty_p.clone()], note: String::new() });

    let mut additivity = GridCheck::new(MODEL_ADDITIVITY);
    let k = model.omega.len();
    if k <= ADDITIVITY_EXHAUSTIVE_LIMIT {
        let event = |mask: usize| {
            (0..k).filter(|i| mask >> i & 1 == 1).map(|i| model.masses[i].clone()).sum::<Rational>()
        };
        let sums: Vec<Rational> = (0..1usize << k).map(event).collect();
        for a in 0..1usize << k {
            // Enumerate the subsets b of the complement of a.
            let rest = !a & ((1 << k) - 1);
            let mut b = rest;
            loop {
                let lhs = &sums[a | b];
                let rhs = &sums[a] + &sums[b];
                additivity.record(*lhs == rhs, || GridWitness {
                    at: vec![],
                    values: vec![lhs.clone(), rhs.clone()],
                    note: format!("events {a:#b} and {b:#b}"),
                });
                if b == 0 {
                    break;
                }
                b = (b - 1) & rest;
            }
        }
    } else {
        for (i, m) in model.masses.iter().enumerate() {
            let single = model.probability(|w| *w == model.omega[i][..]);
            additivity.record(single == *m, || GridWitness {
                at: model.omega[i].clone(),
                values: vec![single.clone(), m.clone()],
                note: "point event".into(),
            });
        }
    }

    let nu = p.derived_state();
    let mut laws = GridCheck::new(MODEL_LAWS);
    for (i, x) in xs.iter().enumerate() {
        for r in grid(x) {
            let lhs = model.law_below(i, &r);
            let rhs = nu.value(x.below(&r)).clone();
            laws.record(lhs == rhs, || GridWitness {
                at: vec![r.clone()],
                values: vec![lhs.clone(), rhs.clone()],
                note: format!("coordinate {}", i + 1),
            });
        }
    }

    let mut f_check = GridCheck::new(MODEL_F);
    let grids: Vec<Vec<Rational>> = xs.iter().map(|x| grid(x)).collect();
    for idx in grid_indices(&grids.iter().map(Vec::len).collect::<Vec<_>>()) {
        let rs: Vec<Rational> = idx.iter().enumerate().map(|(i, &k)| grids[i][k].clone()).collect();
        let lhs = model.f(&rs);
        let rhs = f(p, xs, &rs)?;
        f_check.record(lhs == rhs, || GridWitness { at: rs.clone(), values: vec![lhs.clone(), rhs.clone()], note: String::new() });
    }

    Ok((model, GridReport { checks: vec![total_check, empty, additivity, laws, f_check] }))
}
