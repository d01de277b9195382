use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use qlp_core::json::{observables_from_doc, LatticeSource, ObservableSetDoc, SMapDoc};
use qlp_core::lattice::Lattice;
use qlp_core::rational;
use qlp_core::smap::{complete, CompletionError, TupleSpace};
use qlp_core::{Observable, Rational, SMap};
use serde::de::DeserializeOwned;

pub fn read_doc<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// A lattice named by generator shorthand or by path.
pub fn lattice_arg(arg: &str) -> anyhow::Result<(Arc<Lattice>, LatticeSource)> {
    let source = LatticeSource::Named(arg.to_string());
    let l = source.resolve(None).with_context(|| format!("cannot load lattice {arg}"))?;
    let out = if arg.contains(':') && !arg.ends_with(".json") { source } else { LatticeSource::Inline(l.description()) };
    Ok((Arc::new(l), out))
}

/// Lattice reference for documents written by a command: shorthands stay,
/// paths are inlined since the output may land elsewhere.
pub fn output_source(doc: &SMapDoc, l: &Lattice) -> LatticeSource {
    match &doc.lattice {
        LatticeSource::Named(n) if n.contains(':') && !n.ends_with(".json") => doc.lattice.clone(),
        _ => LatticeSource::Inline(l.description()),
    }
}

pub struct MapFile {
    pub doc: SMapDoc,
    pub lattice: Arc<Lattice>,
}

pub fn map_file(path: &Path) -> anyhow::Result<MapFile> {
    let doc: SMapDoc = read_doc(path)?;
    let lattice = doc
        .lattice
        .resolve(path.parent())
        .with_context(|| format!("cannot load the lattice of {}", path.display()))?;
    Ok(MapFile { doc, lattice: Arc::new(lattice) })
}

impl MapFile {
    pub fn is_total(&self) -> bool {
        self.doc.arity > 0 && self.doc.entries.len() >= TupleSpace::new(self.lattice.len(), self.doc.arity).cells()
    }

    /// The map itself, or its completion when only some values are listed.
    pub fn total(&self) -> anyhow::Result<Result<SMap, CompletionError>> {
        if self.is_total() {
            return Ok(Ok(self.doc.to_smap(self.lattice.clone())?));
        }
        let q = self.doc.to_partial(self.lattice.clone())?;
        Ok(complete(&q).map(|c| c.map))
    }
}

pub fn observables(path: &Path, l: &Arc<Lattice>) -> anyhow::Result<BTreeMap<String, Observable>> {
    let doc: ObservableSetDoc = read_doc(path)?;
    Ok(observables_from_doc(l.clone(), &doc)?)
}

/// Observables in the order given by a comma list, or all in name order.
pub fn ordered<'a>(
    xs: &'a BTreeMap<String, Observable>,
    order: Option<&str>,
) -> anyhow::Result<(Vec<String>, Vec<&'a Observable>)> {
    let names: Vec<String> = match order {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => xs.keys().cloned().collect(),
    };
    let picked = names
        .iter()
        .map(|n| xs.get(n).ok_or_else(|| anyhow!("no observable named {n:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((names, picked))
}

/// A comma list of rationals; `inf` marks a coordinate that is dropped.
pub fn points(list: &str) -> anyhow::Result<Vec<Option<Rational>>> {
    list.split(',')
        .map(|s| match s.trim() {
            "inf" | "+inf" | "∞" => Ok(None),
            t => rational::parse(t).map(Some).map_err(|e| anyhow!("bad point {t:?}: {e}")),
        })
        .collect()
}

pub fn finite_points(list: &str) -> anyhow::Result<Vec<Rational>> {
    points(list)?
        .into_iter()
        .map(|p| p.ok_or_else(|| anyhow!("`inf` is only allowed for marginals")))
        .collect()
}

/// `3`, `arity=3` or `n=3`.
pub fn arity(arg: &str) -> anyhow::Result<usize> {
    let digits = arg.rsplit('=').next().unwrap_or(arg);
    match digits.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => bail!("expected an arity such as arity=3, got {arg:?}"),
    }
}
