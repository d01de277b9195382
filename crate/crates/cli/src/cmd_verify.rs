use qlp_core::distribution::{
    self, check_commutativity, check_f_properties, classical_model, marginal_f, F_COMPATIBLE_COMMUTATIVITY,
};
use qlp_core::lattice::check_oml;
use qlp_core::rational::{int, ratio, to_display};
use qlp_core::smap::{check_propositions, complete, format_tuple, validate};
use qlp_core::{reference, Observable, Rational, SMap};
use serde_json::json;

use crate::cmd_smap::completion_failure_json;
use crate::report::{Report, Status};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    Fail,
    Skipped,
    NotRun,
}

struct Check {
    name: &'static str,
    outcome: Outcome,
    detail: String,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, name: &'static str, ok: bool, detail: String) -> bool {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        self.0.push(Check { name, outcome, detail });
        ok
    }

    fn mark(&mut self, name: &'static str, outcome: Outcome, detail: &str) {
        self.0.push(Check { name, outcome, detail: detail.into() });
    }
}

const LATER: [&str; 11] = [
    "validation",
    "propositions",
    "diagonal state",
    "F x1,x2,x3",
    "F x2,x1,x3",
    "F x3,x2,x1",
    "F properties",
    "marginals",
    "marginal symmetry",
    "commutativity",
    "classical model",
];

pub fn example31(raw: bool, skip_classical: bool) -> anyhow::Result<Report> {
    let mut checks = Checks::default();
    let mut extra = String::new();
    let l = reference::lattice();
    let oml = check_oml(&l.description())?;
    checks.record("lattice", oml.passed(), format!("MO3 with {} elements", l.len()));

    let q = reference::partial(&l, raw)?;
    let completion = complete(&q);
    let mut error = None;
    match &completion {
        Ok(c) => {
            checks.record(
                "completion",
                true,
                format!("{} listed values complete to {} cells", c.given_cells(), c.map.table().len()),
            );
        }
        Err(e) => {
            let text = e.describe(&l);
            let headline = text.lines().next().unwrap_or_default().to_string();
            checks.record("completion", false, headline);
            extra = text;
            error = Some(completion_failure_json(&l, e));
        }
    }
    match completion {
        Ok(c) => run_checks(&mut checks, &c.map, skip_classical),
        Err(_) => {
            for name in LATER {
                checks.mark(name, Outcome::NotRun, "not run");
            }
        }
    }

    let first_failure = checks.0.iter().find(|c| c.outcome == Outcome::Fail).map(|c| c.name);
    let mut r = Report::new("verify example31", Status::from_bool(first_failure.is_none()));
    r.line(format!("MO3 reference system ({})", if raw { "raw listing" } else { "corrected listing" }));
    let width = checks.0.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut list = Vec::new();
    for c in &checks.0 {
        let tag = match c.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
            Outcome::NotRun => "----",
        };
        r.line(format!("  {tag}  {:<width$}  {}", c.name, c.detail));
        list.push(json!({ "check": c.name, "outcome": tag.to_lowercase(), "detail": c.detail }));
    }
    if !extra.is_empty() {
        r.line("").line(extra.trim_end());
    }
    if let Some(name) = first_failure {
        r.line(format!("first failing check: {name}"));
    }
    r.set("raw", json!(raw)).set("checks", json!(list)).set("first_failure", json!(first_failure));
    if let Some(e) = error {
        r.set("error", e);
    }
    Ok(r)
}

fn show(r: &Rational) -> String {
    to_display(r)
}

fn run_checks(checks: &mut Checks, p: &SMap, skip_classical: bool) {
    let l = p.lattice().clone();
    let all = reference::observables(&l);
    let order = |names: [&str; 3]| -> Vec<&Observable> { names.iter().map(|n| &all[*n]).collect() };
    let xs = order(["x1", "x2", "x3"]);

    let v = validate(p);
    checks.record("validation", v.passed(), format!("{} violations", v.violations.len()));
    let props = check_propositions(p);
    let failing = props.checks.iter().filter(|c| !c.holds()).count();
    checks.record("propositions", props.passed(), format!("{} properties, {failing} failing", props.checks.len()));

    let nu = p.derived_state();
    let at = |label: &str| nu.value(l.element(label).expect("reference label")).clone();
    let (a, b, c) = (at("a"), at("b"), at("c"));
    checks.record(
        "diagonal state",
        a == ratio(3, 10) && b == ratio(2, 5) && c == ratio(1, 2),
        format!("nu(a) = {}, nu(b) = {}, nu(c) = {}", show(&a), show(&b), show(&c)),
    );

    let ones = vec![int(1); 3];
    let expected = [
        ("F x1,x2,x3", ["x1", "x2", "x3"], ratio(3, 10)),
        ("F x2,x1,x3", ["x2", "x1", "x3"], ratio(1, 5)),
        ("F x3,x2,x1", ["x3", "x2", "x1"], ratio(29, 100)),
    ];
    for (name, names, want) in expected {
        match distribution::f(p, &order(names), &ones) {
            Ok(v) => checks.record(name, v == want, format!("F(1,1,1) = {}, expected {}", show(&v), show(&want))),
            Err(e) => checks.record(name, false, e.to_string()),
        };
    }

    match check_f_properties(p, &xs) {
        Ok(g) => {
            let vacuous = g.check(F_COMPATIBLE_COMMUTATIVITY).is_some_and(|c| c.vacuous());
            let failing: Vec<&str> = g.checks.iter().filter(|c| !c.holds()).map(|c| c.name).collect();
            let detail = if failing.is_empty() {
                format!("bounds, monotonicity and limits hold on the grid; compatible commutativity vacuous: {vacuous}")
            } else {
                format!("failing: {}", failing.join(", "))
            };
            checks.record("F properties", g.passed(), detail)
        }
        Err(e) => checks.record("F properties", false, e.to_string()),
    };

    let one = Some(int(1));
    let dropped_first = marginal_f(p, &xs, &[None, one.clone(), one.clone()]);
    let dropped_all = marginal_f(p, &xs, &[None, None, None]);
    match (dropped_first, dropped_all) {
        (Ok(m), Ok(full)) => checks.record(
            "marginals",
            m == ratio(3, 10) && full == int(1),
            format!("F(inf,1,1) = p(1,b',c') = {}, all dropped = {}", show(&m), show(&full)),
        ),
        (Err(e), _) | (_, Err(e)) => checks.record("marginals", false, e.to_string()),
    };

    let swapped = order(["x1", "x3", "x2"]);
    let mut points = 0;
    let mut mismatch = None;
    for r2 in distribution::grid(&all["x2"]) {
        for r3 in distribution::grid(&all["x3"]) {
            points += 1;
            let lhs = marginal_f(p, &xs, &[None, Some(r2.clone()), Some(r3.clone())]);
            let rhs = marginal_f(p, &swapped, &[None, Some(r3.clone()), Some(r2.clone())]);
            if mismatch.is_none() && (lhs.is_err() || lhs.ok() != rhs.ok()) {
                mismatch = Some(format!("differs at r2 = {r2}, r3 = {r3}"));
            }
        }
    }
    let detail = mismatch.clone().unwrap_or_else(|| format!("p(1,y(r2),z(r3)) = p(1,z(r3),y(r2)) at {points} grid points"));
    checks.record("marginal symmetry", mismatch.is_none(), detail);

    match check_commutativity(p, &xs) {
        Ok(c) => {
            let witness = l
                .element("a'")
                .zip(l.element("b'"))
                .zip(l.element("c'"))
                .map(|((a, b), c)| vec![a, b, c])
                .and_then(|t| c.find(&t, &[1, 0, 2]).cloned());
            let ok = !c.commutative()
                && witness.as_ref().is_some_and(|w| w.value == ratio(3, 10) && w.permuted_value == ratio(1, 5));
            let detail = match &witness {
                Some(w) => format!(
                    "non-commutative; p{} = {} vs {} after swapping the first two ({} violations)",
                    format_tuple(&l, &w.tuple),
                    show(&w.value),
                    show(&w.permuted_value),
                    c.violations.len()
                ),
                None => format!("commutative: {}, expected witness missing", c.commutative()),
            };
            checks.record("commutativity", ok, detail)
        }
        Err(e) => checks.record("commutativity", false, e.to_string()),
    };

    if skip_classical {
        checks.mark("classical model", Outcome::Skipped, "skipped");
        return;
    }
    match classical_model(p, &xs) {
        Ok((model, report)) => {
            let corner = model.probability(|w| w.iter().all(|t| *t == int(-1)));
            let law = model.law_below(0, &int(1));
            let ok = report.passed() && model.total() == int(1) && corner == ratio(3, 10) && law == ratio(7, 10);
            checks.record(
                "classical model",
                ok,
                format!(
                    "P(Omega) = {}, P({{(-1,-1,-1)}}) = {}, P(xi1 < 1) = {}, identities hold: {}",
                    show(&model.total()),
                    show(&corner),
                    show(&law),
                    report.passed()
                ),
            )
        }
        Err(e) => checks.record("classical model", false, e.to_string()),
    };
}
