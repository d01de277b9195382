//! JSON documents for lattices, states, observables, s-maps and constraints.
//!
//! Rationals travel as `"p/q"` strings (integers and decimal literals are
//! accepted on input). Element references are labels. Output is sorted so
//! that identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{from_shorthand, Elem, Lattice, LatticeDescription};
use crate::observable::{Observable, State};
use crate::rational::{self, Rational};
use crate::smap::{PartialSMap, SMap, Tuple};

/// A lattice given inline, by generator shorthand (`mo:3`, `boolean:2`), or
/// by a path to a lattice document relative to the referring file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSource {
    Named(String),
    Inline(LatticeDescription),
}

impl LatticeSource {
    pub fn resolve(&self, base: Option<&Path>) -> Result<Lattice> {
        match self {
            LatticeSource::Inline(desc) => Lattice::from_description(desc),
            LatticeSource::Named(name) if name.contains(':') && !name.ends_with(".json") => from_shorthand(name),
            LatticeSource::Named(path) => {
                let full = match base {
                    Some(dir) => dir.join(path),
                    None => PathBuf::from(path),
                };
                let desc: LatticeDescription = read_json(&full)?;
                Lattice::from_description(&desc)
            }
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn parse_tuple(l: &Lattice, labels: &[String]) -> Result<Tuple> {
    labels.iter().map(|s| l.parse_element(s)).collect()
}

pub fn tuple_labels(l: &Lattice, t: &[Elem]) -> Vec<String> {
    t.iter().map(|&e| l.label(e).to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub tuple: Vec<String>,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

/// Total and partial s-maps share this document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SMapDoc {
    pub lattice: LatticeSource,
    pub arity: usize,
    pub entries: Vec<EntryDoc>,
}

impl SMapDoc {
    pub fn from_smap(p: &SMap, lattice: LatticeSource) -> SMapDoc {
        let l = p.lattice();
        let entries = p
            .entries()
            .map(|(t, v)| EntryDoc { tuple: tuple_labels(l, &t), value: v.clone() })
            .collect();
        SMapDoc::sorted(lattice, p.arity(), entries)
    }

    pub fn from_partial(q: &PartialSMap, lattice: LatticeSource) -> SMapDoc {
        let l = q.lattice();
        let entries = q
            .entries()
            .iter()
            .map(|(t, v)| EntryDoc { tuple: tuple_labels(l, t), value: v.clone() })
            .collect();
        SMapDoc::sorted(lattice, q.arity(), entries)
    }

    fn sorted(lattice: LatticeSource, arity: usize, mut entries: Vec<EntryDoc>) -> SMapDoc {
        entries.sort_by(|a, b| a.tuple.cmp(&b.tuple));
        SMapDoc { lattice, arity, entries }
    }

    pub fn to_partial(&self, lattice: Arc<Lattice>) -> Result<PartialSMap> {
        let mut q = PartialSMap::new(lattice.clone(), self.arity)?;
        for e in &self.entries {
            q.insert(parse_tuple(&lattice, &e.tuple)?, e.value.clone())?;
        }
        Ok(q)
    }

    pub fn to_smap(&self, lattice: Arc<Lattice>) -> Result<SMap> {
        let entries = self
            .entries
            .iter()
            .map(|e| Ok((parse_tuple(&lattice, &e.tuple)?, e.value.clone())))
            .collect::<Result<Vec<_>>>()?;
        SMap::from_entries(lattice, self.arity, entries)
    }
}

/// `{"<label>": "<rational>"}`.
pub type StateDoc = BTreeMap<String, StrRational>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrRational(#[serde(with = "rational::serde_str")] pub Rational);

pub fn state_doc(s: &State) -> StateDoc {
    s.to_labels().into_iter().map(|(k, v)| (k, StrRational(v))).collect()
}

pub fn state_from_doc(lattice: Arc<Lattice>, doc: &StateDoc) -> Result<State> {
    let values: BTreeMap<String, Rational> = doc.iter().map(|(k, v)| (k.clone(), v.0.clone())).collect();
    State::from_labels(lattice, &values)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservableDoc {
    #[serde(with = "rational::serde_vec")]
    pub spectrum: Vec<Rational>,
    pub assign: BTreeMap<String, String>,
}

impl ObservableDoc {
    pub fn from_observable(x: &Observable) -> ObservableDoc {
        let l = x.lattice();
        ObservableDoc {
            spectrum: x.spectrum().to_vec(),
            assign: x.assignments().map(|(t, e)| (t.to_string(), l.label(e).to_string())).collect(),
        }
    }

    pub fn to_observable(&self, lattice: Arc<Lattice>) -> Result<Observable> {
        let mut assign = BTreeMap::new();
        for (point, label) in &self.assign {
            let t = rational::parse(point)?;
            if assign.insert(t.clone(), label.clone()).is_some() {
                return Err(Error::Structural(format!("spectrum point {t} assigned twice")));
            }
        }
        let mut listed = self.spectrum.clone();
        listed.sort();
        listed.dedup();
        if listed.len() != self.spectrum.len() || listed != assign.keys().cloned().collect::<Vec<_>>() {
            return Err(Error::Structural("spectrum does not match the assigned points".into()));
        }
        Observable::from_labels(lattice, &assign)
    }
}

/// A named family of observables, `{"x1": {...}, "x2": {...}}`.
pub type ObservableSetDoc = BTreeMap<String, ObservableDoc>;

pub fn observables_from_doc(lattice: Arc<Lattice>, doc: &ObservableSetDoc) -> Result<BTreeMap<String, Observable>> {
    doc.iter()
        .map(|(name, o)| {
            let x = o
                .to_observable(lattice.clone())
                .map_err(|e| Error::Structural(format!("observable {name}: {e}")))?;
            Ok((name.clone(), x))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelDoc {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub tuple: Vec<String>,
    #[serde(default = "default_rel")]
    pub rel: RelDoc,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

fn default_rel() -> RelDoc {
    RelDoc::Eq
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub tuple: Vec<String>,
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearDoc {
    pub terms: Vec<TermDoc>,
    pub rel: RelDoc,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

/// A constraint file. `symmetric: true` requires permutation invariance,
/// `false` asks for a map that is not permutation invariant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSetDoc {
    #[serde(default)]
    pub constraints: Vec<ConstraintDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub linear: Vec<LinearDoc>,
}

/// Constraint files may also be a bare list of value constraints.
#[derive(Deserialize)]
#[serde(untagged)]
enum ConstraintFile {
    List(Vec<ConstraintDoc>),
    Full(ConstraintSetDoc),
}

pub fn parse_constraints(text: &str) -> Result<ConstraintSetDoc> {
    Ok(match serde_json::from_str(text)? {
        ConstraintFile::List(constraints) => ConstraintSetDoc { constraints, ..Default::default() },
        ConstraintFile::Full(doc) => doc,
    })
}
