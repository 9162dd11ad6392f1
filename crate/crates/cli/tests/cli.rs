use std::io::Write;
use std::process::{Command, Output};

use wbrst_core::brst::{brst_w3, nilpotency};
use wbrst_core::cft::A2Mode;
use wbrst_core::ope::parse_field_expr;
use wbrst_core::{OpeEngine, Rational};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbrst")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn critical_w3() {
    let o = run(&["cft", "critical", "w3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "critical c: [100]\n");
}

#[test]
fn critical_w32() {
    let o = run(&["--format", "json", "cft", "critical", "w32"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["critical_roots"], serde_json::json!(["-2"]));
}

#[test]
fn solve_conventional() {
    let o = run(&["cft", "solve-conventional"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "g1=0 g2=-16/261\n");
}

#[test]
fn printed_a2_fails_validation() {
    let o = run(&["cft", "validate", "w3.alg", "--a2", "printed"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  W W pole 1: exchange"));
    let o = run(&["cft", "validate", "w3.alg", "--a2", "consistent"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn nilpotent_report_json() {
    let o = run(&["--format", "json", "cft", "brst", "w32", "--c", "-2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "nilpotent");
    assert_eq!(v["obstruction"], "0");
    assert_eq!(v["unconventional_terms"], serde_json::json!([]));
}

#[test]
fn obstruction_round_trips() {
    let o = run(&["--format", "json", "cft", "brst", "w3", "--c", "26"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "not nilpotent");
    let zero = Rational::default();
    let c = Rational::from_integer(26.into());
    let q = brst_w3(Some(&c), Some(&zero), Some(&zero), A2Mode::Consistent).unwrap();
    let rep = nilpotency(&q).unwrap();
    let e = OpeEngine::new(q.algebra());
    let parsed = parse_field_expr(&e, v["obstruction"].as_str().unwrap()).unwrap();
    assert_eq!(parsed, rep.obstruction);
}

#[test]
fn json_is_deterministic() {
    let args = ["--format", "json", "qla", "check", "super_ef"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn qla_commands() {
    for name in ["so3", "super_ef", "lyubashenko"] {
        let o = run(&["qla", "check", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).contains("pass  jacobi"));
        let o = run(&["qla", "brst", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).ends_with("nilpotent\n"));
    }
}

#[test]
fn qla_failure_exits_one() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "dim 3\nsigma = superperm\nphi = superperm").unwrap();
    for (k, i, j, v) in [(3, 1, 2, 1), (3, 2, 1, 1), (1, 2, 3, 1), (1, 3, 2, -1), (2, 3, 1, 1), (2, 1, 3, -1)] {
        writeln!(f, "c {k} {i} {j} = {v}").unwrap();
    }
    let o = run(&["qla", "check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  antisymmetry"));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "dim 2\nsigma 1 1 1 = 1").unwrap();
    let o = run(&["qla", "check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:1:"));

    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "algebra x\nfield T weight=2 parity=even ghost=0\nope T T : 4 -> 1/2*one ; 2 -> 2*T +").unwrap();
    let o = run(&["cft", "validate", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3:"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["cft", "validate", "w3", "--set", "q=1"]).status.code(), Some(2));
    assert_eq!(run(&["cft", "validate", "w3", "--set", "c=x"]).status.code(), Some(2));
    assert_eq!(run(&["cft", "brst", "w3", "--a2", "other"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "crosscheck", "w3_ghosts"]).status.code(), Some(2));
    assert_eq!(run(&["qla", "frobnicate"]).status.code(), Some(2));
}

#[test]
fn oracle_crosscheck() {
    let o = run(&["oracle", "crosscheck", "w3_ghosts", "--level", "4", "--set", "g1=0", "--set", "g2=0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("match\n"));
}

#[test]
fn ope_output() {
    let o = run(&["cft", "ope", "virasoro", "T", "T", "--set", "c=1/2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4 -> 1/4*one ; 2 -> 2*T ; 1 -> D(T)\n");
    let o = run(&["cft", "jacobi", "virasoro", "T", "T", "T"]);
    assert_eq!(o.status.code(), Some(0));
}
