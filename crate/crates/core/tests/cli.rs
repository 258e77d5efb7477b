//! End-to-end runs of the `msogrid` binary.

use msogrid::graph::LabeledGraph;
use msogrid::report::VerificationReport;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msogrid")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("msogrid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn gen(args: &[&str], name: &str) -> (PathBuf, LabeledGraph) {
    let path = scratch(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = bin(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = LabeledGraph::from_json_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    (path, g)
}

#[test]
fn gen_examples() {
    let (_, d12) = gen(&["--family", "power", "--n", "12"], "d12.json");
    assert_eq!(d12.edge_count(), 30);
    let (_, z3) = gen(&["--family", "bichain", "--n", "3", "--labels"], "z3.json");
    assert_eq!(z3.edge_count(), 9);
    assert_eq!(z3.labels().len(), 5);
    let (_, c4) = gen(&["--family", "grid", "--m", "2", "--n", "2"], "c4.json");
    assert_eq!(c4.edge_count(), 4);
    assert!(c4.is_regular(2));
    let (_, h2) = gen(&["--family", "word", "--alpha", "1212", "--n", "2"], "h2.json");
    assert!(h2.vertex_count() > 0);
    let dot = bin(&["gen", "--family", "Tn", "--n", "3", "--dot"]);
    assert!(stdout(&dot).starts_with("graph"));
}

#[test]
fn eval_examples() {
    let (d12, _) = gen(&["--family", "power", "--n", "12"], "d12e.json");
    let g = d12.to_str().unwrap();
    let odd = bin(&["eval", "--graph", g, "--library", "power", "--predicate", "odd", "--at", "x=7"]);
    assert_eq!(stdout(&odd), "true");
    let dump = bin(&["eval", "--graph", g, "--library", "power", "--predicate", "cliquemin"]);
    assert_eq!(stdout(&dump), "{1, 2, 4, 8}");
    let refl = bin(&["eval", "--graph", g, "--formula", "x = x", "--at", "x=5"]);
    assert_eq!(stdout(&refl), "true");
    let set = bin(&["eval", "--graph", g, "--formula", "exists y. (Y(y) & E(x,y))", "--at", "x=1, Y={2,3}"]);
    assert_eq!(stdout(&set), "true");
}

#[test]
fn apply_examples() {
    let (z4, _) = gen(&["--family", "bichain", "--n", "4", "--labels"], "z4.json");
    let out = scratch("psi.json");
    let o = bin(&["apply", "--interp", "psi-bichain", "--graph", z4.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = LabeledGraph::from_json_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));

    let (d12, original) = gen(&["--family", "power", "--n", "12"], "d12a.json");
    let twice = scratch("cc.json");
    let o = bin(&[
        "apply",
        "--pipeline",
        "complement,complement",
        "--graph",
        d12.to_str().unwrap(),
        "--out",
        twice.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let back = LabeledGraph::from_json_str(&std::fs::read_to_string(&twice).unwrap()).unwrap();
    assert_eq!(back.edges().collect::<Vec<_>>(), original.edges().collect::<Vec<_>>());

    let phi = scratch("phi.json");
    let o = bin(&["apply", "--interp", "phi-power", "--graph", d12.to_str().unwrap(), "--out", phi.to_str().unwrap()]);
    assert!(o.status.success());
    let e = |x: &str, y: &str| {
        let at = format!("x={x}, y={y}");
        stdout(&bin(&["eval", "--graph", phi.to_str().unwrap(), "--formula", "E(x,y)", "--at", &at]))
    };
    assert_eq!(e("2", "4"), "true");
    assert_eq!(e("2", "10"), "false");
}

#[test]
fn width_and_certificates() {
    let (grid, _) = gen(&["--family", "grid", "--n", "3"], "g33.json");
    let (p4, _) = gen(&["--family", "grid", "--m", "1", "--n", "4"], "p4.json");
    let (grid, p4) = (grid.to_str().unwrap(), p4.to_str().unwrap());
    let td = scratch("td.json");
    let o = bin(&["width", "--graph", grid, "--measure", "twd", "--exact", "--witness", td.to_str().unwrap()]);
    assert_eq!(stdout(&o), "3");
    let ok = bin(&["width", "--graph", grid, "--measure", "twd", "--certify", td.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let wrong = bin(&["width", "--graph", p4, "--measure", "twd", "--certify", td.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(1));

    let ke = scratch("ke.json");
    let o = bin(&["width", "--graph", p4, "--measure", "cwd", "--exact", "--witness", ke.to_str().unwrap()]);
    assert_eq!(stdout(&o), "3");
    let ok = bin(&["width", "--graph", p4, "--measure", "cwd", "--certify", ke.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let too_few = bin(&["width", "--graph", p4, "--measure", "cwd", "--certify", ke.to_str().unwrap(), "--k", "2"]);
    assert_eq!(too_few.status.code(), Some(1));

    let capped = bin(&["width", "--graph", grid, "--measure", "cwd", "--exact"]);
    assert_eq!(capped.status.code(), Some(3));
    let extended = bin(&["width", "--graph", grid, "--measure", "cwd", "--exact", "--extended"]);
    assert_eq!(stdout(&extended), "4");
}

#[test]
fn verify_exit_codes_and_report() {
    let out = scratch("report.json");
    let o = bin(&["verify", "--suite", "bichain", "--max-n", "3", "--quiet", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = VerificationReport::from_json_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.passed());
    assert!(r.records.iter().any(|c| c.id == "bichain/psi/n=03"));
    assert_eq!(bin(&["verify", "--suite", "nope"]).status.code(), Some(2));
}
