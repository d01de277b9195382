//! Finite unions of real intervals with rational or infinite endpoints.
//!
//! Only membership of rational points is ever asked of a Borel set here, which
//! is all a finite observable needs.

use std::cmp::Ordering;
use std::fmt;

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Bound {
    fn cmp_bound(&self, other: &Bound) -> Ordering {
        use Bound::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

/// An interval; `closed` flags are ignored at infinite ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Bound,
    pub lo_closed: bool,
    pub hi: Bound,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, t: &Rational) -> bool {
        let above_lo = match &self.lo {
            Bound::NegInf => true,
            Bound::Finite(l) => t > l || (self.lo_closed && t == l),
            Bound::PosInf => false,
        };
        let below_hi = match &self.hi {
            Bound::PosInf => true,
            Bound::Finite(h) => t < h || (self.hi_closed && t == h),
            Bound::NegInf => false,
        };
        above_lo && below_hi
    }

    fn is_empty(&self) -> bool {
        match self.lo.cmp_bound(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(matches!(self.lo, Bound::Finite(_)) && self.lo_closed && self.hi_closed),
            Ordering::Less => false,
        }
    }

    fn normalized(mut self) -> Self {
        if !matches!(self.lo, Bound::Finite(_)) {
            self.lo_closed = false;
        }
        if !matches!(self.hi, Bound::Finite(_)) {
            self.hi_closed = false;
        }
        self
    }
}

/// A normalized finite union of disjoint, sorted, non-adjacent intervals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BorelSet {
    intervals: Vec<Interval>,
}

impl BorelSet {
    pub fn empty() -> Self {
        BorelSet::default()
    }

    pub fn real_line() -> Self {
        BorelSet::from_intervals(vec![Interval {
            lo: Bound::NegInf,
            lo_closed: false,
            hi: Bound::PosInf,
            hi_closed: false,
        }])
    }

    /// The half-line `(-inf, r)`, open at `r`.
    pub fn below(r: Rational) -> Self {
        BorelSet::from_intervals(vec![Interval {
            lo: Bound::NegInf,
            lo_closed: false,
            hi: Bound::Finite(r),
            hi_closed: false,
        }])
    }

    pub fn point(t: Rational) -> Self {
        BorelSet::from_intervals(vec![Interval {
            lo: Bound::Finite(t.clone()),
            lo_closed: true,
            hi: Bound::Finite(t),
            hi_closed: true,
        }])
    }

    pub fn points(ts: impl IntoIterator<Item = Rational>) -> Self {
        ts.into_iter().map(BorelSet::point).fold(BorelSet::empty(), |acc, p| acc.union(&p))
    }

    pub fn interval(lo: Bound, lo_closed: bool, hi: Bound, hi_closed: bool) -> Self {
        BorelSet::from_intervals(vec![Interval { lo, lo_closed, hi, hi_closed }])
    }

    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        let mut parts: Vec<Interval> = intervals
            .into_iter()
            .map(Interval::normalized)
            .filter(|i| !i.is_empty())
            .collect();
        parts.sort_by(|a, b| {
            a.lo.cmp_bound(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for next in parts {
            if let Some(last) = merged.last_mut() {
                let touches = match last.hi.cmp_bound(&next.lo) {
                    Ordering::Greater => true,
                    Ordering::Equal => last.hi_closed || next.lo_closed,
                    Ordering::Less => false,
                };
                if touches {
                    match last.hi.cmp_bound(&next.hi) {
                        Ordering::Less => {
                            last.hi = next.hi;
                            last.hi_closed = next.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= next.hi_closed,
                        Ordering::Greater => {}
                    }
                    continue;
                }
            }
            merged.push(next);
        }
        BorelSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.intervals.iter().any(|i| i.contains(t))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self, other: &BorelSet) -> BorelSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        BorelSet::from_intervals(all)
    }

    pub fn complement(&self) -> BorelSet {
        let mut out = Vec::new();
        let mut lo = Bound::NegInf;
        let mut lo_closed = false;
        for i in &self.intervals {
            out.push(Interval { lo: lo.clone(), lo_closed, hi: i.lo.clone(), hi_closed: !i.lo_closed });
            lo = i.hi.clone();
            lo_closed = !i.hi_closed;
        }
        out.push(Interval { lo, lo_closed, hi: Bound::PosInf, hi_closed: false });
        BorelSet::from_intervals(out)
    }

    pub fn intersection(&self, other: &BorelSet) -> BorelSet {
        self.complement().union(&other.complement()).complement()
    }

    pub fn is_disjoint(&self, other: &BorelSet) -> bool {
        self.intersection(other).is_empty()
    }
}

impl fmt::Display for BorelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let show = |b: &Bound| match b {
            Bound::NegInf => "-inf".to_string(),
            Bound::PosInf => "inf".to_string(),
            Bound::Finite(r) => r.to_string(),
        };
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|i| {
                if i.lo == i.hi {
                    return format!("{{{}}}", show(&i.lo));
                }
                format!(
                    "{}{}, {}{}",
                    if i.lo_closed { '[' } else { '(' },
                    show(&i.lo),
                    show(&i.hi),
                    if i.hi_closed { ']' } else { ')' }
                )
            })
            .collect();
        write!(f, "{}", parts.join(" u "))
    }
}
