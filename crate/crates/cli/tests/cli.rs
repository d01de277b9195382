use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn qlp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = qlp(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&out)));
    (code(&out), v)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn make_and_check_lattices() {
    let (c, v) = json(&["lattice", "make", "mo:3"]);
    assert_eq!(c, 0);
    assert_eq!(v["lattice"]["elements"].as_array().unwrap().len(), 8);

    let dir = tempfile::tempdir().unwrap();
    let out = qlp(&["--out", path(dir.path()), "lattice", "make", "boolean:3"]);
    assert_eq!(code(&out), 0);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    let lattice_file = files.iter().find(|p| p.file_name().unwrap() != "report.txt").expect("lattice artifact");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(lattice_file).unwrap()).unwrap();
    assert_eq!(doc["elements"].as_array().unwrap().len(), 8);

    assert_eq!(code(&qlp(&["lattice", "check", path(lattice_file)])), 0);
    assert_eq!(code(&qlp(&["lattice", "check", path(&fixture("mo3.json"))])), 0);
}

#[test]
fn broken_orthocomplement_fails_the_check() {
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(fixture("mo3.json")).unwrap()).unwrap();
    let b = doc["elements"].as_array().unwrap().iter().position(|e| e == "b").unwrap();
    doc["ortho"][1] = Value::from(b);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    std::fs::write(&file, doc.to_string()).unwrap();
    let (c, v) = json(&["lattice", "check", path(&file)]);
    assert_eq!(c, 1);
    assert_eq!(v["status"], "fail");
}

#[test]
fn complete_the_listed_values() {
    let (c, v) = json(&["smap", "complete", path(&fixture("example31_partial.json"))]);
    assert_eq!(c, 0);
    assert_eq!(v["cells"], 512);
    assert_eq!(v["given"], 63);

    let dir = tempfile::tempdir().unwrap();
    let out = qlp(&["--out", path(dir.path()), "smap", "complete", path(&fixture("example31_partial.json"))]);
    assert_eq!(code(&out), 0);
    let written = dir.path().join("smap.json");
    assert!(written.exists());
    assert_eq!(code(&qlp(&["smap", "validate", path(&written)])), 0);
    assert_eq!(code(&qlp(&["smap", "props", path(&written)])), 0);
}

#[test]
fn raw_listing_reports_the_conflict() {
    let (c, v) = json(&["smap", "complete", path(&fixture("example31_raw.json"))]);
    assert_eq!(c, 1);
    assert_eq!(v["error"]["kind"], "inconsistent");
    assert!(!v["error"]["first_chain"].as_array().unwrap().is_empty());
    assert!(!v["error"]["second_chain"].as_array().unwrap().is_empty());
}

#[test]
fn distribution_commands() {
    let smap = fixture("example31_partial.json");
    let obs = fixture("observables.json");
    let base = ["--smap", path(&smap), "--observables", path(&obs)];

    let mut args = vec!["dist", "F"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--at", "1,1,1"]);
    let (c, v) = json(&args);
    assert_eq!(c, 0);
    assert_eq!(v["value"], "3/10");

    let mut args = vec!["dist", "F"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--order", "x2,x1,x3", "--at", "1,1,1"]);
    assert_eq!(json(&args).1["value"], "1/5");

    let mut args = vec!["dist", "marginal"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--at", "inf,1,1"]);
    assert!(stdout(&qlp(&args)).contains("3/10"));

    let mut args = vec!["dist", "commutativity"];
    args.extend_from_slice(&base);
    let out = qlp(&args);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("non-commutative"));

    let mut args = vec!["dist", "classical"];
    args.extend_from_slice(&base);
    let out = qlp(&args);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("P(Omega) = 1"));
}

#[test]
fn verify_the_reference_system() {
    let out = qlp(&["verify", "example31"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));

    let out = qlp(&["verify", "example31", "--raw"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("first failing check"));

    let out = qlp(&["verify", "example31", "--skip-classical"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("SKIP"));
}

#[test]
fn synthesis_commands() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    std::fs::write(
        &file,
        r#"[{"tuple": ["a", "a"], "value": "3/10"}, {"tuple": ["a", "1"], "value": "1/5"}]"#,
    )
    .unwrap();
    let (c, v) = json(&["smap", "synth", "mo:3", "2", path(&file)]);
    assert_eq!(c, 1);
    assert_eq!(v["status"], "fail");

    std::fs::write(&file, r#"[{"tuple": ["a", "a"], "value": "3/10"}]"#).unwrap();
    assert_eq!(code(&qlp(&["smap", "synth", "mo:3", "2", path(&file)])), 0);

    std::fs::write(&file, "[]").unwrap();
    let out = qlp(&["smap", "synth", "mo:3", "2", path(&file), "--search", "noncommutative"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn json_output_is_deterministic() {
    let partial = fixture("example31_partial.json");
    let runs = [
        vec!["--format", "json", "verify", "example31"],
        vec!["--format", "json", "smap", "props", path(&partial)],
    ];
    for args in runs {
        let a = qlp(&args);
        let b = qlp(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(code(&qlp(&["lattice", "check", "/nonexistent/file.json"])), 2);
    assert_eq!(code(&qlp(&["frobnicate"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, "{ not json").unwrap();
    assert_eq!(code(&qlp(&["smap", "validate", path(&file)])), 2);
    let out = qlp(&[
        "dist",
        "F",
        "--smap",
        path(&fixture("example31_partial.json")),
        "--observables",
        path(&fixture("observables.json")),
        "--order",
        "x1,x2",
    ]);
    assert_eq!(code(&out), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn arbitrary_bytes_never_crash(bytes in prop::collection::vec(any::<u8>(), 0..200), which in 0usize..3) {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("input.json");
        std::fs::write(&file, &bytes).unwrap();
        let sub: &[&str] = match which {
            0 => &["lattice", "check"],
            1 => &["smap", "validate"],
            _ => &["smap", "complete"],
        };
        let mut args = sub.to_vec();
        args.push(path(&file));
        let c = code(&qlp(&args));
        prop_assert!(c == 1 || c == 2, "exit {}", c);
    }
}
