use std::path::Path;

use anyhow::{bail, Context};
use qlp_core::distribution::{self, check_commutativity, check_f_properties, classical_model, show_perm, GridReport};
use qlp_core::lattice::Lattice;
use qlp_core::rational::to_display;
use qlp_core::smap::format_tuple;
use qlp_core::{Error, Observable, Rational, SMap};
use serde_json::{json, Value};

use crate::cmd_smap::completion_failure_json;
use crate::load::{self, map_file};
use crate::report::{frac, table, Report, Status};

pub struct Inputs<'a> {
    pub smap: &'a Path,
    pub observables: &'a Path,
    pub order: Option<&'a str>,
}

struct System {
    p: SMap,
    names: Vec<String>,
    xs: Vec<Observable>,
}

impl System {
    fn refs(&self) -> Vec<&Observable> {
        self.xs.iter().collect()
    }

    fn lattice(&self) -> &Lattice {
        self.p.lattice()
    }

    fn label(&self, rs: &[String]) -> String {
        format!("F_{{{}}}({})", self.names.join(","), rs.join(","))
    }
}

/// The system, or a failure report when the map does not complete.
fn load(command: &str, inputs: &Inputs) -> anyhow::Result<Result<System, Report>> {
    let mf = map_file(inputs.smap)?;
    let p = match mf.total()? {
        Ok(p) => p,
        Err(e) => {
            let mut r = Report::new(command, Status::Fail);
            r.line(format!("{}: completion failed", inputs.smap.display())).line(e.describe(&mf.lattice));
            r.set("error", completion_failure_json(&mf.lattice, &e));
            return Ok(Err(r));
        }
    };
    let all = load::observables(inputs.observables, &mf.lattice)?;
    let (names, xs) = load::ordered(&all, inputs.order)?;
    if xs.len() != p.arity() {
        bail!("{} observables given for a map of arity {}", xs.len(), p.arity());
    }
    let xs = xs.into_iter().cloned().collect();
    Ok(Ok(System { p, names, xs }))
}

fn labels(l: &Lattice, t: &[qlp_core::Elem]) -> Vec<String> {
    t.iter().map(|&e| l.label(e).to_string()).collect()
}

pub fn grid_json(g: &GridReport) -> Value {
    json!(g
        .checks
        .iter()
        .map(|c| json!({
            "check": c.name,
            "instances": c.instances,
            "failures": c.failures,
            "vacuous": c.vacuous(),
            "witness": c.witness.as_ref().map(|w| json!({
                "at": w.at.iter().map(frac).collect::<Vec<_>>(),
                "values": w.values.iter().map(frac).collect::<Vec<_>>(),
                "note": w.note,
            })),
        }))
        .collect::<Vec<_>>())
}

pub fn grid_text(r: &mut Report, g: &GridReport) {
    for c in &g.checks {
        let line = match &c.witness {
            _ if c.vacuous() => format!("  pass  {} (vacuous)", c.name),
            None => format!("  pass  {} ({} instances)", c.name, c.instances),
            Some(w) => {
                let at: Vec<String> = w.at.iter().map(|r| r.to_string()).collect();
                format!("  FAIL  {} ({} failures; at ({}) {})", c.name, c.failures, at.join(","), w.note)
            }
        };
        r.line(line);
    }
}

fn grid_points(xs: &[&Observable]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
    for x in xs {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                distribution::grid(x).into_iter().map(move |r| {
                    let mut v = prefix.clone();
                    v.push(r);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn f_cmd(inputs: &Inputs, at: Option<&str>) -> anyhow::Result<Report> {
    let s = match load("dist F", inputs)? {
        Ok(s) => s,
        Err(r) => return Ok(r),
    };
    let xs = s.refs();
    let l = s.lattice();
    match at {
        Some(list) => {
            let rs = load::finite_points(list)?;
            let value = distribution::f(&s.p, &xs, &rs)?;
            let tuple: Vec<_> = xs.iter().zip(&rs).map(|(x, r)| x.below(r)).collect();
            let shown: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
            let mut r = Report::new("dist F", Status::Pass);
            r.line(format!("{} = p{} = {}", s.label(&shown), format_tuple(l, &tuple), to_display(&value)));
            r.set("order", json!(s.names))
                .set("at", json!(shown))
                .set("tuple", json!(labels(l, &tuple)))
                .set("value", frac(&value));
            Ok(r)
        }
        None => {
            let report = check_f_properties(&s.p, &xs)?;
            let mut r = Report::new("dist F", Status::from_bool(report.passed()));
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for rs in grid_points(&xs) {
                let v = distribution::f(&s.p, &xs, &rs)?;
                let shown: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
                rows.push((s.label(&shown), to_display(&v)));
                values.push(json!({ "at": shown, "value": frac(&v) }));
            }
            r.line("grid values:");
            r.text.push_str(&table(&rows));
            r.line("properties:");
            grid_text(&mut r, &report);
            r.set("order", json!(s.names)).set("grid", json!(values)).set("properties", grid_json(&report));
            Ok(r)
        }
    }
}

pub fn marginal_cmd(inputs: &Inputs, at: &str) -> anyhow::Result<Report> {
    let s = match load("dist marginal", inputs)? {
        Ok(s) => s,
        Err(r) => return Ok(r),
    };
    let xs = s.refs();
    let l = s.lattice();
    let rs = load::points(at)?;
    let value = distribution::marginal_f(&s.p, &xs, &rs)?;
    let tuple: Vec<_> = xs
        .iter()
        .zip(&rs)
        .map(|(x, r)| r.as_ref().map_or(l.one(), |r| x.below(r)))
        .collect();
    let shown: Vec<String> = rs.iter().map(|r| r.as_ref().map_or("inf".into(), |r| r.to_string())).collect();
    let mut r = Report::new("dist marginal", Status::Pass);
    r.line(format!("{} = p{} = {}", s.label(&shown), format_tuple(l, &tuple), to_display(&value)));
    r.set("order", json!(s.names))
        .set("at", json!(shown))
        .set("tuple", json!(labels(l, &tuple)))
        .set("value", frac(&value));
    Ok(r)
}

pub fn commutativity_cmd(inputs: &Inputs) -> anyhow::Result<Report> {
    let s = match load("dist commutativity", inputs)? {
        Ok(s) => s,
        Err(r) => return Ok(r),
    };
    let l = s.lattice();
    let c = check_commutativity(&s.p, &s.refs())?;
    let mut r = Report::new("dist commutativity", Status::Pass);
    r.line(format!(
        "{} ({} tuple-permutation pairs checked, {} violations)",
        if c.commutative() { "commutative" } else { "non-commutative" },
        c.checked,
        c.violations.len()
    ));
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for v in &c.violations {
        let permuted: Vec<_> = v.perm.iter().map(|&k| v.tuple[k]).collect();
        let points: Vec<String> = v.points.iter().map(|t| t.to_string()).collect();
        rows.push((
            format!("({}) {}", points.join(","), show_perm(&v.perm)),
            format!(
                "p{} = {} vs p{} = {}",
                format_tuple(l, &v.tuple),
                to_display(&v.value),
                format_tuple(l, &permuted),
                to_display(&v.permuted_value)
            ),
        ));
        list.push(json!({
            "points": points,
            "tuple": labels(l, &v.tuple),
            "perm": v.perm.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "permuted": labels(l, &permuted),
            "value": frac(&v.value),
            "permuted_value": frac(&v.permuted_value),
        }));
    }
    r.text.push_str(&table(&rows));
    r.set("order", json!(s.names))
        .set("commutative", json!(c.commutative()))
        .set("checked", json!(c.checked))
        .set("violations", json!(list));
    Ok(r)
}

pub fn classical_cmd(inputs: &Inputs) -> anyhow::Result<Report> {
    let s = match load("dist classical", inputs)? {
        Ok(s) => s,
        Err(r) => return Ok(r),
    };
    let (model, checks) = match classical_model(&s.p, &s.refs()) {
        Ok(m) => m,
        Err(Error::Model(msg)) => {
            let mut r = Report::new("dist classical", Status::Fail);
            r.line(format!("model construction failed: {msg}"));
            r.set("error", json!(msg));
            return Ok(r);
        }
        Err(e) => return Err(e).context("cannot build the classical model"),
    };
    let mut r = Report::new("dist classical", Status::from_bool(checks.passed()));
    let mut rows = Vec::new();
    let mut masses = Vec::new();
    for (w, m) in model.omega.iter().zip(&model.masses) {
        let point: Vec<String> = w.iter().map(|t| t.to_string()).collect();
        rows.push((format!("({})", point.join(",")), to_display(m)));
        masses.push(json!({ "omega": point, "mass": frac(m) }));
    }
    r.line(format!("outcomes over ({}):", s.names.join(",")));
    r.text.push_str(&table(&rows));
    r.line(format!("P(Omega) = {}", to_display(&model.total())));
    r.line("checks:");
    grid_text(&mut r, &checks);
    r.set("order", json!(s.names))
        .set("masses", json!(masses))
        .set("total", frac(&model.total()))
        .set("checks", grid_json(&checks));
    Ok(r)
}
