use std::path::Path;

use qlp_core::json::to_pretty;
use qlp_core::lattice::{check_oml, from_shorthand, LatticeDescription};
use serde_json::json;

use crate::load::read_doc;
use crate::report::{Report, Status};

pub fn check(path: &Path) -> anyhow::Result<Report> {
    let desc: LatticeDescription = read_doc(path)?;
    let oml = check_oml(&desc)?;
    let mut r = Report::new("lattice check", Status::from_bool(oml.passed()));
    let label = |i: usize| desc.elements.get(i).cloned().unwrap_or_else(|| i.to_string());
    r.line(format!("{}: {} elements", path.display(), desc.elements.len()));
    let mut axioms = Vec::new();
    for c in &oml.checks {
        let witness: Option<Vec<String>> = c.witness.as_ref().map(|w| w.iter().map(|e| label(e.index())).collect());
        match &witness {
            None => r.line(format!("  pass  {}", c.axiom.name())),
            Some(w) => r.line(format!(
                "  FAIL  {}  ({} failures, first at {})",
                c.axiom.name(),
                c.failures,
                w.join(", ")
            )),
        };
        axioms.push(json!({
            "axiom": c.axiom,
            "name": c.axiom.name(),
            "holds": c.holds,
            "failures": c.failures,
            "witness": witness,
        }));
    }
    r.set("axioms", json!(axioms));
    if let Some(e) = oml.non_atomistic {
        r.line(format!("  note  {} is not a join of orthogonal atoms", label(e.index())));
        r.set("non_atomistic", json!(label(e.index())));
    }
    if let Some(l) = &oml.lattice {
        let atoms: Vec<&str> = l.atoms().iter().map(|&a| l.label(a)).collect();
        r.line(format!("  atoms: {}", atoms.join(", ")));
        r.line(format!("  boolean: {}", l.is_boolean()));
        r.set("atoms", json!(atoms)).set("boolean", json!(l.is_boolean()));
    }
    Ok(r)
}

pub fn make(spec: &str) -> anyhow::Result<Report> {
    let l = from_shorthand(spec)?;
    let doc = to_pretty(&l.description());
    let name = format!("{}.json", spec.replace(':', ""));
    let mut r = Report::new("lattice make", Status::Pass);
    r.set("lattice", serde_json::to_value(l.description())?)
        .set("file", json!(name))
        .artifact(&name, doc.clone());
    r.text = doc;
    r.bare = true;
    Ok(r)
}
