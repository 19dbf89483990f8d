use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const GHZ3: &str = "N 3\n0 0.7071067811865476 0\n1 0 0\n2 0 0\n3 0.7071067811865476 0\n";
const W3: &str = "N 3\n0 0 0\n1 1 0\n2 0 0\n3 0 0\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_symdecomp"));
    c.env_remove("SYMDECOMP_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no key {key} in\n{report}"))
        .to_string()
}

fn real(report: &str, key: &str) -> f64 {
    value(report, key).parse().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn decompose_ghz3() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ghz3.state", GHZ3);
    let o = run(&["decompose", &f]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert!((real(&r, "y.1") - 1.0).abs() < 1e-10);
    assert!(real(&r, "node_overlap.0.1") < 1e-10);
    assert_eq!(value(&r, "terms"), "2");
}

#[test]
fn schmidt_ghz3() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ghz3.state", GHZ3);
    let r = stdout(&run(&["schmidt", &f]));
    assert_eq!(value(&r, "r"), "2");
    assert_eq!(real(&r, "P"), 1.0);
}

#[test]
fn w3_is_rejected_with_its_exit_code() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "w3.state", W3);
    let o = run(&["decompose", &f]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("NonGeneric") && err.contains("gamma=2"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn parse_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.state", "N 3\n0 1 0\n1 0 0\n3 0 0\n");
    let o = run(&["roots", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("ParseError") && err.contains("index 2"), "{err}");
}

#[test]
fn unnormalized_input_warns() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "big.state", "N 3\n0 1.4142135623730951 0\n1 0 0\n2 0 0\n3 1.4142135623730951 0\n");
    let o = run(&["schmidt", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stderr).unwrap().contains("warning"));
}

#[test]
fn roots_of_w3() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "w3.state", W3);
    let r = stdout(&run(&["roots", &f]));
    assert_eq!(value(&r, "gamma"), "2");
    assert_eq!(value(&r, "generic"), "false");
}

#[test]
fn random_is_deterministic_and_decomposable() {
    let a = stdout(&run(&["random", "--n", "5", "--seed", "17", "--count", "3"]));
    let b = stdout(&run(&["random", "--n", "5", "--seed", "17", "--count", "3"]));
    assert_eq!(a, b);
    let via_env = bin()
        .args(["random", "--n", "5", "--count", "3"])
        .env("SYMDECOMP_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(stdout(&via_env), a);

    let single = stdout(&run(&["random", "--n", "5", "--seed", "17"]));
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.state", &single);
    let o = run(&["decompose", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "terms"), "3");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.state", &stdout(&run(&["random", "--n", "6", "--seed", "2"])));
    for cmd in [vec!["decompose", &f], vec!["canonical", &f, "--mode", "lu"]] {
        let a = run(&cmd);
        let b = run(&cmd);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn canonical_and_compare() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.state", &stdout(&run(&["random", "--n", "5", "--seed", "8"])));
    let lu = stdout(&run(&["canonical", &f, "--mode", "lu"]));
    assert_eq!(value(&lu, "parameters"), "7");
    assert!(lu.contains("[map]"));
    let il = stdout(&run(&["canonical", &f, "--mode", "il"]));
    assert_eq!(value(&il, "mode"), "il");

    let g = write(&dir, "ghz.state", GHZ3);
    let h = write(&dir, "r3.state", &stdout(&run(&["random", "--n", "3", "--seed", "8"])));
    let same = stdout(&run(&["compare", &f, &f, "--mode", "lu"]));
    assert_eq!(value(&same, "equivalent"), "true");
    let il = stdout(&run(&["compare", &g, &h, "--mode", "il"]));
    assert_eq!(value(&il, "equivalent"), "true");
    let lu = stdout(&run(&["compare", &g, &h, "--mode", "lu"]));
    assert_eq!(value(&lu, "equivalent"), "false");
}

#[test]
fn tangle_of_ghz3_and_w3() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "ghz.state", GHZ3);
    let r = stdout(&run(&["tangle", &g]));
    for key in ["tau_decomp", "tau_canonical", "tau_pair", "tau_oracle"] {
        assert!((real(&r, key) - 1.0).abs() < 1e-10, "{key}");
    }
    let w = write(&dir, "w.state", W3);
    let r = stdout(&run(&["tangle", &w]));
    assert!(real(&r, "tau_oracle").abs() < 1e-10);
    assert_eq!(value(&r, "tau_decomp"), "none");
    assert_eq!(value(&r, "formula_error"), "NonGeneric");
}

#[test]
fn bloch_export_writes_one_row_per_term() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.state", &stdout(&run(&["random", "--n", "7", "--seed", "4"])));
    let out = dir.path().join("nodes.csv");
    let o = run(&["bloch-export", &f, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(Path::new(&out)).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "label,x,y,z,length");
    assert_eq!(rows.len(), 1 + 4);
    for row in &rows[1..] {
        let cols: Vec<f64> = row.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        let len = (cols[0] * cols[0] + cols[1] * cols[1] + cols[2] * cols[2]).sqrt();
        assert!(len <= 1.0 + 1e-12 && (len - cols[3]).abs() < 1e-12);
    }
}

#[test]
fn verify_reports_every_property() {
    let o = run(&["verify", "--seed", "3", "--n-max", "5"]);
    let r = stdout(&o);
    for name in [
        "round_trip",
        "lu_covariance",
        "il_invariance",
        "mobius_covariance",
        "tangle_closed_forms_agree",
        "tangle_pair_value_vs_oracle",
        "tangle_closed_forms_vs_oracle",
    ] {
        assert!(r.contains(&format!("[{name}]")), "{name}");
    }
    let any_fail = r.contains("result = FAIL");
    assert_eq!(o.status.code(), Some(if any_fail { 1 } else { 0 }));
}

#[test]
fn usage_errors_are_nonzero() {
    assert_ne!(run(&["canonical", "x.state"]).status.code(), Some(0));
    assert_ne!(run(&["frobnicate"]).status.code(), Some(0));
    let o = run(&["decompose", "/nonexistent/file.state"]);
    assert_eq!(o.status.code(), Some(1));
}
