use std::path::Path;
use std::sync::Arc;

use anyhow::bail;
use clap::ValueEnum;
use qlp_core::json::{parse_constraints, to_pretty, LatticeSource, SMapDoc};
use qlp_core::lattice::Lattice;
use qlp_core::lp::Relation;
use qlp_core::rational::to_display;
use qlp_core::smap::{
    check_propositions, complete, format_tuple, validate, CompletionError, PropertyReport, SMapAxiom,
    ValidationReport,
};
use qlp_core::synth::{
    find_consistent_asymmetric, find_marginal_violation, find_noncommutative, synthesize, Certificate, ConstraintSet,
    Synthesis,
};
use qlp_core::SMap;
use serde_json::{json, Value};

use crate::load::{self, map_file, output_source};
use crate::report::{frac, table, value_rows, Report, Status};

fn labels(l: &Lattice, t: &[qlp_core::Elem]) -> Vec<String> {
    t.iter().map(|&e| l.label(e).to_string()).collect()
}

pub fn validation_json(l: &Lattice, v: &ValidationReport) -> Value {
    let axioms: Vec<Value> = SMapAxiom::ALL
        .iter()
        .map(|&a| {
            let first = v.first(a).map(|x| {
                json!({
                    "tuple": labels(l, &x.tuple),
                    "coordinate": x.coordinate.map(|c| c + 1),
                    "pair": x.pair.map(|(e, f)| [l.label(e), l.label(f)]),
                    "expected": frac(&x.expected),
                    "found": frac(&x.found),
                })
            });
            json!({ "axiom": a.name(), "violations": v.count(a), "first": first })
        })
        .collect();
    json!(axioms)
}

pub fn validation_text(r: &mut Report, l: &Lattice, v: &ValidationReport) {
    for a in SMapAxiom::ALL {
        match v.first(a) {
            None => r.line(format!("  pass  {}", a.name())),
            Some(x) => r.line(format!(
                "  FAIL  {}  ({} violations; p{} is {}, expected {})",
                a.name(),
                v.count(a),
                format_tuple(l, &x.tuple),
                to_display(&x.found),
                to_display(&x.expected)
            )),
        };
    }
}

pub fn props_json(l: &Lattice, p: &PropertyReport) -> Value {
    let checks: Vec<Value> = p
        .checks
        .iter()
        .map(|c| {
            let witness = c.witness.as_ref().map(|w| {
                let cells: Vec<Value> = w
                    .tuples
                    .iter()
                    .zip(&w.values)
                    .map(|(t, v)| json!({ "tuple": labels(l, t), "value": frac(v) }))
                    .collect();
                json!(cells)
            });
            json!({
                "property": c.property.name(),
                "instances": c.instances,
                "failures": c.failures,
                "witness": witness,
            })
        })
        .collect();
    json!(checks)
}

pub fn props_text(r: &mut Report, l: &Lattice, p: &PropertyReport) {
    for c in &p.checks {
        match &c.witness {
            None => r.line(format!("  pass  {} ({} instances)", c.property.name(), c.instances)),
            Some(w) => {
                let cells: Vec<String> = w
                    .tuples
                    .iter()
                    .zip(&w.values)
                    .map(|(t, v)| format!("p{} = {}", format_tuple(l, t), to_display(v)))
                    .collect();
                r.line(format!(
                    "  FAIL  {} ({} of {} instances; {})",
                    c.property.name(),
                    c.failures,
                    c.instances,
                    cells.join(" vs ")
                ))
            }
        };
    }
}

pub fn completion_failure_json(l: &Lattice, e: &CompletionError) -> Value {
    let chain = |steps: &[qlp_core::smap::DerivationStep]| -> Value {
        json!(steps
            .iter()
            .map(|s| json!({
                "tuple": labels(l, &s.tuple),
                "value": frac(&s.value),
                "rule": s.rule.describe(l),
                "inputs": s.inputs.iter().map(|t| labels(l, t)).collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>())
    };
    match e {
        CompletionError::Inconsistent(inc) => json!({
            "kind": "inconsistent",
            "tuple": labels(l, &inc.tuple),
            "values": [frac(&inc.first), frac(&inc.second)],
            "first_chain": chain(&inc.first_chain),
            "second_chain": chain(&inc.second_chain),
        }),
        CompletionError::OutOfRange { chain: steps } => json!({ "kind": "out_of_range", "chain": chain(steps) }),
        CompletionError::Underdetermined { free } => json!({
            "kind": "underdetermined",
            "free": free.iter().map(|t| labels(l, t)).collect::<Vec<_>>(),
        }),
        CompletionError::Invalid(v) => json!({ "kind": "invalid", "validation": validation_json(l, v) }),
    }
}

fn entries_text(r: &mut Report, p: &SMap) {
    let l = p.lattice();
    let rows = value_rows(p.entries().map(|(t, v)| (format!("p{}", format_tuple(l, &t)), v)));
    r.text.push_str(&table(&rows));
}

pub fn validate_cmd(path: &Path) -> anyhow::Result<Report> {
    let mf = map_file(path)?;
    if !mf.is_total() {
        bail!("{} lists {} values, not a full table; run `smap complete` first", path.display(), mf.doc.entries.len());
    }
    let p = mf.doc.to_smap(mf.lattice.clone())?;
    let v = validate(&p);
    let mut r = Report::new("smap validate", Status::from_bool(v.passed()));
    r.line(format!("{}: arity {}, {} cells", path.display(), p.arity(), p.table().len()));
    validation_text(&mut r, &mf.lattice, &v);
    r.set("arity", json!(p.arity())).set("axioms", validation_json(&mf.lattice, &v));
    Ok(r)
}

pub fn complete_cmd(path: &Path) -> anyhow::Result<Report> {
    let mf = map_file(path)?;
    let q = mf.doc.to_partial(mf.lattice.clone())?;
    let l = mf.lattice.as_ref();
    match complete(&q) {
        Ok(c) => {
            let mut r = Report::new("smap complete", Status::Pass);
            let doc = SMapDoc::from_smap(&c.map, output_source(&mf.doc, l));
            r.line(format!(
                "{}: {} listed values complete to {} cells (arity {})",
                path.display(),
                c.given_cells(),
                c.map.table().len(),
                c.map.arity()
            ));
            entries_text(&mut r, &c.map);
            r.set("given", json!(c.given_cells()))
                .set("cells", json!(c.map.table().len()))
                .set("smap", serde_json::to_value(&doc)?)
                .artifact("smap.json", to_pretty(&doc));
            Ok(r)
        }
        Err(e) => {
            let mut r = Report::new("smap complete", Status::Fail);
            r.line(format!("{}: completion failed", path.display())).line(e.describe(l));
            r.set("error", completion_failure_json(l, &e));
            Ok(r)
        }
    }
}

pub fn props_cmd(path: &Path) -> anyhow::Result<Report> {
    let mf = map_file(path)?;
    let p = match mf.total()? {
        Ok(p) => p,
        Err(e) => {
            let mut r = Report::new("smap props", Status::Fail);
            r.line(format!("{}: completion failed", path.display())).line(e.describe(&mf.lattice));
            r.set("error", completion_failure_json(&mf.lattice, &e));
            return Ok(r);
        }
    };
    let v = validate(&p);
    let props = check_propositions(&p);
    let mut r = Report::new("smap props", Status::from_bool(v.passed() && props.passed()));
    r.line(format!("{}: arity {}", path.display(), p.arity()));
    validation_text(&mut r, &mf.lattice, &v);
    props_text(&mut r, &mf.lattice, &props);
    r.set("axioms", validation_json(&mf.lattice, &v)).set("properties", props_json(&mf.lattice, &props));
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Search {
    /// A map with p(ā) > p(πā) for distinct, pairwise incompatible atoms.
    Noncommutative,
    /// Maps of arities n and n+1 with one diagonal state and p_n(ā) != p_{n+1}(ā,1).
    MarginalViolation,
    /// Maps with p_n(ā) = p_{n+1}(ā,1) everywhere and p_n not symmetric.
    ConsistentAsymmetric,
}

fn certificate_json(l: &Lattice, cert: &Certificate) -> Value {
    let rows: Vec<Value> = cert
        .rows
        .iter()
        .map(|row| {
            json!({
                "origin": row.origin.describe(l),
                "multiplier": frac(&row.multiplier),
                "terms": row.terms.iter().map(|(t, k)| json!({ "tuple": labels(l, t), "coeff": frac(k) })).collect::<Vec<_>>(),
                "rel": match row.rel { Relation::Eq => "=", Relation::Le => "<=", Relation::Ge => ">=" },
                "rhs": frac(&row.rhs),
            })
        })
        .collect();
    json!(rows)
}

fn witness(r: &mut Report, name: &str, p: &SMap, source: &LatticeSource) -> anyhow::Result<()> {
    let doc = SMapDoc::from_smap(p, source.clone());
    r.set(name, serde_json::to_value(&doc)?);
    r.artifact(&format!("{name}.json"), to_pretty(&doc));
    Ok(())
}

pub fn synth_cmd(lattice: &str, arity: &str, constraints: Option<&Path>, search: Option<Search>) -> anyhow::Result<Report> {
    let (l, source) = load::lattice_arg(lattice)?;
    let n = load::arity(arity)?;
    match search {
        None => synth_constraints(&l, &source, n, constraints),
        Some(s) => synth_search(&l, &source, n, s),
    }
}

fn synth_constraints(l: &Arc<Lattice>, source: &LatticeSource, n: usize, path: Option<&Path>) -> anyhow::Result<Report> {
    let c = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", p.display()))?;
            ConstraintSet::from_doc(l, &parse_constraints(&text)?)?
        }
        None => ConstraintSet::new(),
    };
    let mut r;
    match synthesize(l, n, &c)? {
        Synthesis::Feasible(p) => {
            r = Report::new("smap synth", Status::Pass);
            r.line(format!("feasible: witness of arity {n} on {} elements", l.len()));
            r.line("derived state:");
            let nu = p.derived_state();
            let rows = value_rows(l.elements().map(|e| (l.label(e).to_string(), nu.value(e))).collect::<Vec<_>>());
            r.text.push_str(&table(&rows));
            r.set("result", json!("feasible"));
            witness(&mut r, "witness", &p, source)?;
        }
        Synthesis::Infeasible(cert) => {
            r = Report::new("smap synth", Status::Fail);
            r.line(format!("infeasible: {} rows combine to a contradiction", cert.rows.len()));
            r.text.push_str(&cert.describe(l));
            r.set("result", json!("infeasible")).set("certificate", certificate_json(l, &cert));
        }
        Synthesis::OnlySymmetric { pairs_checked } => {
            r = Report::new("smap synth", Status::Fail);
            r.line(format!(
                "no asymmetric map: all {pairs_checked} adjacent-swap gaps over atom tuples have maximum 0"
            ));
            r.set("result", json!("only_symmetric")).set("pairs_checked", json!(pairs_checked));
        }
    }
    Ok(r)
}

fn synth_search(l: &Arc<Lattice>, source: &LatticeSource, n: usize, search: Search) -> anyhow::Result<Report> {
    let mut r;
    match search {
        Search::Noncommutative => match find_noncommutative(l, n)? {
            Some(w) => {
                r = Report::new("smap synth", Status::Pass);
                let permuted: Vec<_> = w.perm.iter().map(|&k| w.tuple[k]).collect();
                r.line(format!(
                    "found: p{} - p{} = {}",
                    format_tuple(l, &w.tuple),
                    format_tuple(l, &permuted),
                    to_display(&w.gap)
                ));
                r.set("tuple", json!(labels(l, &w.tuple)))
                    .set("permuted", json!(labels(l, &permuted)))
                    .set("gap", frac(&w.gap));
                witness(&mut r, "witness", &w.map, source)?;
            }
            None => {
                r = Report::new("smap synth", Status::Fail);
                r.line("none: every gap has maximum 0");
            }
        },
        Search::MarginalViolation => match find_marginal_violation(l, n)? {
            Some(v) => {
                r = Report::new("smap synth", Status::Pass);
                let mut with_one = v.tuple.clone();
                with_one.push(l.one());
                r.line(format!(
                    "found: p{} = {}, p{} = {}, gap {}",
                    format_tuple(l, &v.tuple),
                    to_display(v.p_n.get(&v.tuple)),
                    format_tuple(l, &with_one),
                    to_display(v.p_next.get(&with_one)),
                    to_display(&v.gap)
                ));
                r.set("tuple", json!(labels(l, &v.tuple))).set("gap", frac(&v.gap));
                witness(&mut r, "p_n", &v.p_n, source)?;
                witness(&mut r, "p_next", &v.p_next, source)?;
            }
            None => {
                r = Report::new("smap synth", Status::Fail);
                r.line("none: every gap has maximum 0");
            }
        },
        Search::ConsistentAsymmetric => match find_consistent_asymmetric(l, n)? {
            Some(v) => {
                r = Report::new("smap synth", Status::Pass);
                r.line(format!(
                    "found: swapping {} and {} in p{} changes the value by {}",
                    v.swap + 1,
                    v.swap + 2,
                    format_tuple(l, &v.tuple),
                    to_display(&v.gap)
                ));
                r.set("tuple", json!(labels(l, &v.tuple))).set("gap", frac(&v.gap));
                witness(&mut r, "p_n", &v.p_n, source)?;
                witness(&mut r, "p_next", &v.p_next, source)?;
            }
            None => {
                r = Report::new("smap synth", Status::Fail);
                r.line("none: marginally consistent maps are symmetric here");
            }
        },
    }
    let name = search.to_possible_value().map(|v| v.get_name().to_string());
    r.set("search", json!(name));
    Ok(r)
}
