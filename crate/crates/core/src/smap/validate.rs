use num_traits::{One, Zero};

use super::{SMap, Tuple};
use crate::lattice::Elem;
use crate::rational::Rational;

/// Violations kept per axiom; the counts in the report are always complete.
const LISTED_PER_AXIOM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SMapAxiom {
    /// Every value lies in `[0, 1]`.
    Range,
    /// `p(1, ..., 1) = 1`.
    Unit,
    /// Orthogonal neighbours force zero.
    AdjacentOrthogonal,
    /// Additivity in each coordinate over orthogonal pairs.
    Additivity,
}

impl SMapAxiom {
    pub const ALL: [SMapAxiom; 4] =
        [SMapAxiom::Range, SMapAxiom::Unit, SMapAxiom::AdjacentOrthogonal, SMapAxiom::Additivity];

    pub fn name(self) -> &'static str {
        match self {
            SMapAxiom::Range => "range",
            SMapAxiom::Unit => "s1",
            SMapAxiom::AdjacentOrthogonal => "s2",
            SMapAxiom::Additivity => "s3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SMapViolation {
    pub axiom: SMapAxiom,
    /// The offending cell. For additivity this is the cell holding the join.
    pub tuple: Tuple,
    /// 0-based coordinate involved, for s2 (left of the pair) and s3.
    pub coordinate: Option<usize>,
    /// The orthogonal pair split in an additivity failure.
    pub pair: Option<(Elem, Elem)>,
    pub expected: Rational,
    pub found: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<SMapViolation>,
    /// `(axiom, number of failing instances)`.
    pub counts: Vec<(SMapAxiom, usize)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fails(&self, axiom: SMapAxiom) -> bool {
        self.count(axiom) > 0
    }

    pub fn count(&self, axiom: SMapAxiom) -> usize {
        self.counts.iter().find(|(a, _)| *a == axiom).map_or(0, |(_, c)| *c)
    }

    pub fn first(&self, axiom: SMapAxiom) -> Option<&SMapViolation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

struct Collector {
    report: ValidationReport,
}

impl Collector {
    fn push(&mut self, v: SMapViolation) {
        let axiom = v.axiom;
        let entry = match self.report.counts.iter_mut().find(|(a, _)| *a == axiom) {
            Some(entry) => entry,
            None => {
                self.report.counts.push((axiom, 0));
                self.report.counts.last_mut().unwrap()
            }
        };
        entry.1 += 1;
        if entry.1 <= LISTED_PER_AXIOM {
            self.report.violations.push(v);
        }
    }
}

/// Exhaustive check of range, (s1), (s2) and (s3) over every orthogonal pair,
/// including pairs involving `0`.
pub fn validate(p: &SMap) -> ValidationReport {
    let l = p.lattice();
    let space = p.space();
    let n = p.arity();
    let table = p.table();
    let mut out = Collector { report: ValidationReport::default() };

    for (i, v) in table.iter().enumerate() {
        if *v < Rational::zero() || *v > Rational::one() {
            out.push(SMapViolation {
                axiom: SMapAxiom::Range,
                tuple: space.tuple(i),
                coordinate: None,
                pair: None,
                expected: Rational::zero(),
                found: v.clone(),
            });
        }
    }

    let unit = vec![l.one(); n];
    if !p.get(&unit).is_one() {
        out.push(SMapViolation {
            axiom: SMapAxiom::Unit,
            tuple: unit,
            coordinate: None,
            pair: None,
            expected: Rational::one(),
            found: p.get(&vec![l.one(); n]).clone(),
        });
    }

    for (idx, v) in table.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let t = space.tuple(idx);
        if let Some(i) = (0..n.saturating_sub(1)).find(|&i| l.is_orthogonal(t[i], t[i + 1])) {
            out.push(SMapViolation {
                axiom: SMapAxiom::AdjacentOrthogonal,
                tuple: t,
                coordinate: Some(i),
                pair: None,
                expected: Rational::zero(),
                found: v.clone(),
            });
        }
    }

    let pairs: Vec<(Elem, Elem)> = l
        .elements()
        .flat_map(|a| l.elements().filter(move |&b| b >= a).map(move |b| (a, b)))
        .filter(|&(a, b)| l.is_orthogonal(a, b))
        .collect();
    for i in 0..n {
        let stride = space.stride(i);
        for base in 0..space.cells() {
            if !(base / stride).is_multiple_of(space.size) {
                continue;
            }
            for &(a, b) in &pairs {
                let j = l.join(a, b);
                let sum = &table[base + a.index() * stride] + &table[base + b.index() * stride];
                let found = &table[base + j.index() * stride];
                if *found != sum {
                    out.push(SMapViolation {
                        axiom: SMapAxiom::Additivity,
                        tuple: space.tuple(base + j.index() * stride),
                        coordinate: Some(i),
                        pair: Some((a, b)),
                        expected: sum,
                        found: found.clone(),
                    });
                }
            }
        }
    }
    out.report
}
