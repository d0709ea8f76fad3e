mod common;

use common::fixture_path;
use lagmon::cli::{run, Outcome};

fn lagmon(args: &[&str]) -> Outcome {
    run(std::iter::once("lagmon").chain(args.iter().copied()))
}

fn line<'a>(out: &'a Outcome, key: &str) -> &'a str {
    out.stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("no `{key}` line in\n{}", out.stdout))
}

#[test]
fn toric_blow_up() {
    let out = lagmon(&["toric", &fixture_path("bl1_cp2.poly")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(line(&out, "H_L order"), "2 generated by (1 3)");
    assert_eq!(line(&out, "H_L^S = H_L"), "true");
    assert_eq!(line(&out, "H_L class"), "1t");
}

#[test]
fn toric_json() {
    let out = lagmon(&["--json", "toric", &fixture_path("cp2.poly")]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["H_L"]["order"], 6);
    assert_eq!(v["H_L class"], "3f");
    assert_eq!(v["relations"][0], "(1,1,1)");
}

#[test]
fn toric_vertex_mode_and_bound() {
    let out = lagmon(&["toric", &fixture_path("orthant3.poly")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("H_L order 6"), "{}", out.stdout);
    let out = lagmon(&["toric", &fixture_path("cube3.poly"), "--bound", "3"]);
    assert_eq!(out.code, 0);
    assert_eq!(line(&out, "H_L^S"), "not computed: 6 facets exceed the search bound 3");
}

#[test]
fn classification_table() {
    let out = lagmon(&["classify2d"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 13);
    let impossible: Vec<&str> =
        out.stdout.lines().filter(|l| l.contains(" IMPOSSIBLE ")).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(impossible, ["2t", "3t", "4", "4ft", "6", "6ft"]);
}

#[test]
fn filter_reports_witness() {
    let out = lagmon(&["filter", &fixture_path("class_2t.grp")]);
    assert_eq!(out.code, 0);
    assert_eq!(line(&out, "admissible"), "false");
    assert_eq!(line(&out, "witness"), "[[0,1],[1,0]] moves (0, 1/2) to (1/2, 0)");
    assert_eq!(line(&out, "class"), "2t");
    let out = lagmon(&["filter", &fixture_path("minus_id2.grp")]);
    assert_eq!(line(&out, "admissible"), "true");
}

#[test]
fn conjecture_catalog() {
    let out = lagmon(&["conjecture", &fixture_path("n3_minus_id.cat")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.matches("RULED_OUT").count(), 6);
    assert!(out.stdout.contains("diag_s2cubed  order 8  BOTH  embeds in S_2 x S_2 x S_2"));
}

#[test]
fn potential_subcommands() {
    let out = lagmon(&["potential", "crit", &fixture_path("w_cp2.lp"), "--bound", "3"]);
    assert_eq!(line(&out, "critical points"), "3 (0, 0) (1/3, 1/3) (2/3, 2/3)");
    let out = lagmon(&["potential", "rk1", &fixture_path("w_cubic1.lp")]);
    assert_eq!(line(&out, "admissible shears"), "12Z");
    let out = lagmon(&["potential", "hessian", &fixture_path("w_cp2.lp"), "--kind", "order3"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(line(&out, "conclusion"), "CP^2 type, epsilon 1");
    let out = lagmon(&["potential", "hessian", &fixture_path("w_cp2.lp"), "--kind", "order2"]);
    assert_eq!(out.code, 2, "{}", out.stdout);
}

#[test]
fn clifford_and_qform() {
    let out = lagmon(&["clifford", &fixture_path("w_p1p1.lp"), "--at", "1/2,1/2"]);
    assert_eq!((line(&out, "lambda"), line(&out, "nu")), ("1", "1"));
    let out = lagmon(&["clifford", &fixture_path("w_p1p1.lp"), "--at", "1/3,0"]);
    assert_eq!(out.code, 2);
    let out = lagmon(&["qform", "1", "1", "0"]);
    assert_eq!(line(&out, "canonical"), "diag(1,-1)");
    let out = lagmon(&["qform", "-3", "2", "-1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let out = lagmon(&["qform", "2", "0", "2"]);
    assert_eq!(out.code, 2);
}

#[test]
fn error_exit_codes() {
    assert_eq!(lagmon(&["toric", "/nonexistent.poly"]).code, 3);
    assert_eq!(lagmon(&["frobnicate"]).code, 3);
    assert_eq!(lagmon(&["toric", &fixture_path("cp2.poly"), "--mode", "sideways"]).code, 3);
    let out = lagmon(&["toric", &fixture_path("w_cp2.lp")]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("line 3: term"), "{}", out.stderr);
}
