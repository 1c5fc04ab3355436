use std::process::Command;

use lie_access::cli::run;
use serde_json::Value;

fn strip_wall_time(s: &str) -> String {
    s.lines()
        .filter(|l| !l.contains("wall_time_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn system_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    std::io::Write::write_all(&mut f, body.as_bytes()).unwrap();
    f
}

const HEISENBERG: &str = include_str!("../examples/systems/heisenberg.toml");

#[test]
fn analyze_sl2_is_accessible() {
    let out = run(&["analyze", "paper-sl2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("  verdict: accessible\n"));
    assert!(out.stdout.contains("  dim_h: 3\n"));
    for default in [
        "  tol: 1e-8\n",
        "  fd_step: 1e-5\n",
        "  grid: 11\n",
        "  seed: 0\n",
    ] {
        assert!(out.stdout.contains(default), "missing {default:?}");
    }
}

#[test]
fn adrank_aff2_with_a_zero_exits_one() {
    let out = run(&["adrank", "paper-aff2", "--param", "a=0"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("  rank: 1\n"));
    assert!(out.stdout.contains("  verdict: inconclusive\n"));
    assert_eq!(run(&["adrank", "paper-aff2"]).code, 0);
}

#[test]
fn mismatched_m_exits_two_naming_the_field() {
    let f = system_file(&HEISENBERG.replace("m = 1", "m = 2"));
    let out = run(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("control.lower"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn syntax_errors_carry_a_location() {
    let f = system_file(&HEISENBERG.replace("\"u1\", \"u1/2\"", "\"(u1\", \"u1/2\""));
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("map.F") && out.stderr.contains("byte"),
        "{}",
        out.stderr
    );

    let f = system_file("[group]\nname = \"heisenberg\"\n[control\n");
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
}

#[test]
fn expression_file_matches_catalog() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/systems/heisenberg.toml"
    );
    let file = run(&["adrank", path]);
    let cat = run(&["adrank", "paper-heisenberg"]);
    let results = |s: &str| s.split("results:").nth(1).map(strip_wall_time);
    assert_eq!(results(&file.stdout), results(&cat.stdout));
    assert_eq!(run(&["check", path]).code, 0);
}

#[test]
fn reports_are_reproducible() {
    for args in [
        vec!["analyze", "paper-heisenberg"],
        vec!["regular", "paper-sl2", "--seed", "3"],
        vec!["probe", "paper-sl2"],
        vec!["solve", "paper-aff2", "--controls", "0.5;-0.25;1"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.code, 0, "{args:?}: {}", a.stderr);
        assert_eq!(
            strip_wall_time(&a.stdout),
            strip_wall_time(&b.stdout),
            "{args:?}"
        );
        assert!(a
            .stdout
            .trim_end()
            .lines()
            .last()
            .unwrap()
            .starts_with("wall_time_ms"));
    }
    let a = run(&["sample", "paper-heisenberg", "--count", "50", "--seed", "9"]);
    assert_eq!(
        a,
        run(&["sample", "paper-heisenberg", "--count", "50", "--seed", "9"])
    );
    assert!(a.stdout.starts_with("k,seed,idx,c1,c2,c3\n"));
    assert_eq!(a.stdout.lines().count(), 51);
}

#[test]
fn json_format() {
    let out = run(&["adrank", "paper-sl2", "--format", "json"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["results"]["rank"], 3);
    assert_eq!(v["results"]["V"]["rows"], 4);
    assert_eq!(v["results"]["V"]["cols"], 3);
    assert_eq!(
        v["results"]["V"]["data"][1][0].as_f64().unwrap().round(),
        -9.0
    );
    assert_eq!(v["parameters"]["grid"], 11);
}

#[test]
fn probe_is_gated_on_ad_rank() {
    let out = run(&["probe", "paper-aff2", "--param", "a=0"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("ad-rank"));
    let forced = run(&["probe", "paper-heisenberg", "--force"]);
    assert_eq!(forced.code, 0, "{}", forced.stderr);
    assert!(forced.stdout.contains("  forward_dim: 3\n"));
}

#[test]
fn flag_overrides_and_bad_input() {
    let out = run(&["analyze", "paper-sl2", "--grid", "5", "--tol", "1e-6"]);
    assert!(out.stdout.contains("  grid: 5\n") && out.stdout.contains("  tol: 1e-6\n"));
    assert_eq!(run(&["analyze", "paper-sl2", "--tol", "2"]).code, 2);
    assert_eq!(run(&["adrank", "paper-aff2", "--param", "b=1"]).code, 2);
    assert_eq!(run(&["frobnicate", "paper-sl2"]).code, 2);
    assert_eq!(run(&["solve", "paper-sl2", "--controls", "5"]).code, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_lie-access");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["analyze", "paper-sl2"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("verdict: accessible"));
    assert_eq!(
        status(&["adrank", "paper-aff2", "--param", "a=0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        status(&["analyze", "/does/not/exist.toml"]).status.code(),
        Some(2)
    );
}
