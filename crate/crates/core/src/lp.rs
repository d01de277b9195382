//! Exact rational simplex over `x >= 0`.
//!
//! Two-phase tableau method with Bland's rule. Phase one puts an artificial
//! variable on every row; when the artificial optimum is positive its reduced
//! costs give the multipliers of a Farkas certificate. A feasible tableau can
//! then be reused for any number of objectives.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// `Σ coeff * x_var  rel  rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, constraints: Vec::new() }
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    /// Adds a constraint and returns its row index. Repeated variables in
    /// `terms` are summed.
    pub fn add(&mut self, terms: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) -> usize {
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        let mut terms = terms;
        terms.sort_by_key(|t| t.0);
        for (v, c) in terms {
            assert!(v < self.num_vars, "variable {v} out of range");
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|t| !t.1.is_zero());
        self.constraints.push(LinearConstraint { terms: merged, rel, rhs });
        self.constraints.len() - 1
    }

    /// Whether `x` satisfies every constraint and `x >= 0`.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.terms.iter().map(|(v, k)| k * &x[*v]).sum();
                match c.rel {
                    Relation::Eq => lhs == c.rhs,
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }
}

/// Multipliers `y` with `yᵀA >= 0`, `yᵀb < 0`, `y_i >= 0` on `<=` rows and
/// `y_i <= 0` on `>=` rows. Any `x >= 0` would give `0 <= yᵀAx <= yᵀb < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Farkas {
    pub multipliers: Vec<Rational>,
}

impl Farkas {
    /// Rows with a nonzero multiplier.
    pub fn support(&self) -> Vec<usize> {
        (0..self.multipliers.len()).filter(|&i| !self.multipliers[i].is_zero()).collect()
    }

    /// Checks the certificate against `lp` with plain arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if self.multipliers.len() != lp.constraints.len() {
            return false;
        }
        let mut combo = vec![Rational::zero(); lp.num_vars];
        let mut rhs = Rational::zero();
        for (c, y) in lp.constraints.iter().zip(&self.multipliers) {
            let sign_ok = match c.rel {
                Relation::Eq => true,
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
            };
            if !sign_ok {
                return false;
            }
            if y.is_zero() {
                continue;
            }
            for (v, k) in &c.terms {
                combo[*v] += y * k;
            }
            rhs += y * &c.rhs;
        }
        combo.iter().all(|v| !v.is_negative()) && rhs.is_negative()
    }
}

#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible(Box<Tableau>),
    Infeasible(Farkas),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded,
}

/// A tableau holding a basic feasible solution, artificials driven out or
/// pinned at zero.
#[derive(Clone, Debug)]
pub struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Basic column of each row.
    basis: Vec<usize>,
    num_vars: usize,
    /// Columns `>= first_artificial` may not enter.
    first_artificial: usize,
    width: usize,
    pub pivots: usize,
}

impl Tableau {
    /// The current basic solution restricted to the program's variables.
    pub fn point(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.num_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.num_vars {
                x[b] = self.rows[r][self.width].clone();
            }
        }
        x
    }

    /// Maximizes `Σ coeff * x_var` from this tableau, leaving it untouched.
    pub fn maximize(&self, objective: &[(usize, Rational)]) -> Optimum {
        let mut t = self.clone();
        let mut cost = vec![Rational::zero(); t.width + 1];
        for (v, c) in objective {
            cost[*v] -= c;
        }
        // Reduced costs relative to the current basis.
        let mut obj = cost.clone();
        for (r, &b) in t.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let cb = cost[b].clone();
            for (o, v) in obj.iter_mut().zip(&t.rows[r]) {
                if !v.is_zero() {
                    *o -= &cb * v;
                }
            }
        }
        match t.optimize(&mut obj) {
            true => {
                let point = t.point();
                let value = objective.iter().map(|(v, c)| c * &point[*v]).sum();
                Optimum::Optimal { value, point }
            }
            false => Optimum::Unbounded,
        }
    }

    fn pivot(&mut self, obj: &mut [Rational], pr: usize, pc: usize) {
        self.pivots += 1;
        let inv = self.rows[pr][pc].recip();
        let nonzero: Vec<usize> = (0..=self.width).filter(|&c| !self.rows[pr][c].is_zero()).collect();
        for &c in &nonzero {
            self.rows[pr][c] *= &inv;
        }
        let pivot_row = self.rows[pr].clone();
        let eliminate = |row: &mut [Rational]| {
            if row[pc].is_zero() {
                return;
            }
            let factor = row[pc].clone();
            for &c in &nonzero {
                row[c] -= &factor * &pivot_row[c];
            }
        };
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r != pr {
                eliminate(row);
            }
        }
        eliminate(obj);
        self.basis[pr] = pc;
    }

    /// Minimizes with reduced costs in `obj` (its last entry is minus the
    /// objective value). Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [Rational]) -> bool {
        loop {
            let Some(pc) = (0..self.first_artificial).find(|&c| obj[c].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][pc];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[r][self.width] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((pr, _)) = best else {
                return false;
            };
            self.pivot(obj, pr, pc);
        }
    }
}

/// Phase one. Returns a feasible tableau or a Farkas certificate.
pub fn feasibility(lp: &LinearProgram) -> Feasibility {
    let m = lp.constraints.len();
    let n = lp.num_vars;
    let slack_rows: Vec<usize> = (0..m).filter(|&i| lp.constraints[i].rel != Relation::Eq).collect();
    let first_artificial = n + slack_rows.len();
    let width = first_artificial + m;

    let mut rows = Vec::with_capacity(m);
    let mut negated = vec![false; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); width + 1];
        for (v, k) in &c.terms {
            row[*v] = k.clone();
        }
        if let Some(s) = slack_rows.iter().position(|&r| r == i) {
            row[n + s] = if c.rel == Relation::Le { Rational::one() } else { -Rational::one() };
        }
        row[width] = c.rhs.clone();
        if c.rhs.is_negative() {
            negated[i] = true;
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[first_artificial + i] = Rational::one();
        rows.push(row);
    }

    let mut obj = vec![Rational::zero(); width + 1];
    for row in &rows {
        for (c, v) in row.iter().enumerate() {
            if (c < first_artificial || c == width) && !v.is_zero() {
                obj[c] -= v;
            }
        }
    }
    let mut t = Tableau {
        rows,
        basis: (first_artificial..width).collect(),
        num_vars: n,
        first_artificial,
        width,
        pivots: 0,
    };
    t.optimize(&mut obj);

    if !obj[width].is_zero() {
        // obj[width] = -w*. Phase-one duals are y_k = 1 - d_k on artificial k.
        let multipliers = (0..m)
            .map(|i| {
                let y = Rational::one() - &obj[first_artificial + i];
                if negated[i] { y } else { -y }
            })
            .collect();
        return Feasibility::Infeasible(Farkas { multipliers });
    }

    // Drive zero-valued artificials out of the basis where possible.
    for r in 0..t.rows.len() {
        if t.basis[r] < first_artificial {
            continue;
        }
        if let Some(c) = (0..first_artificial).find(|&c| !t.rows[r][c].is_zero()) {
            t.pivot(&mut obj, r, c);
        }
    }
    Feasibility::Feasible(Box::new(t))
}
