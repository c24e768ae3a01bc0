use std::process::{Command, Output};

use serde_json::Value;

const I2: &str = r#"{"n":2,"basis":[["1","0"],["0","1"]]}"#;

fn hbk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbk"))
        .args(args)
        .env_remove("HBK_P")
        .env_remove("HBK_D")
        .env_remove("HBK_N")
        .env_remove("HBK_SEED")
        .env_remove("HBK_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .trim_end()
        .to_string()
}

fn ok(args: &[&str]) -> String {
    let o = hbk(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

fn ok_json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("valid JSON")
}

#[test]
fn val_example() {
    assert_eq!(ok(&["val", "--elem", "t^2*u^-3"]), r#""(2,-3)""#);
    assert_eq!(
        ok(&["--format", "text", "val", "--elem", "t^2*u^-3"]),
        "(2,-3)"
    );
    assert_eq!(ok(&["val", "--elem", "t^2*u^-3", "--s", "1"]), r#""(2)""#);
    assert_eq!(ok(&["val", "--elem", "0"]), r#""inf""#);
}

#[test]
fn dist_example() {
    let l2 = r#"{"n":2,"basis":[["1","0"],["0","t"]]}"#;
    assert_eq!(
        ok(&["dist", "--kind", "sum", "--l1", I2, "--l2", l2]),
        r#""(1,0)""#
    );
    assert_eq!(
        ok(&["dist", "--kind", "max", "--l1", I2, "--l2", l2]),
        r#""(1,0)""#
    );
}

#[test]
fn relpos_of_diagonal() {
    let l2 = r#"{"n":2,"basis":[["u","0"],["0","t"]]}"#;
    assert_eq!(
        ok(&["relpos", "--l1", I2, "--l2", l2]),
        r#"["(0,0)","(1,-1)"]"#
    );
}

#[test]
fn psi_round_trip() {
    let x = ok(&["apartment", "--point", r#"{"coords":["(0,0)","(1,-1)"]}"#]);
    let back = ok(&["apartment", "--class", &x]);
    assert_eq!(back, r#"{"coords":["(0,0)","(1,-1)"]}"#);
    let l = r#"{"n":2,"basis":[["u","0"],["0","t"]]}"#;
    assert_eq!(ok(&["dist", "--l1", &x, "--l2", l]), r#""(0,0)""#);
}

#[test]
fn common_apartment_points_match_distance() {
    let l2 = r#"{"n":2,"basis":[["1","u^-1"],["0","t"]]}"#;
    let ap = ok_json(&["apartment", "--l1", I2, "--l2", l2]);
    assert!(ap["basis"].is_array());
    assert_eq!(ap["x2"]["coords"].as_array().unwrap().len(), 2);
}

#[test]
fn enclosure_contains_its_points() {
    let pts = r#"[{"coords":["(0,0)","(1,0)"]},{"coords":["(0,0)","(0,2)"]}]"#;
    let out = ok_json(&[
        "enclosure",
        "--points",
        pts,
        "--contains",
        r#"{"coords":["(0,0)","(0,5)"]}"#,
    ]);
    assert_eq!(out["contains"], Value::Bool(true));
    assert_eq!(out["bounds"].as_array().unwrap().len(), 2);
    let out = ok_json(&[
        "enclosure",
        "--points",
        pts,
        "--contains",
        r#"{"coords":["(0,0)","(0,1)"]}"#,
    ]);
    assert_eq!(out["contains"], Value::Bool(false));
}

#[test]
fn decompositions_round_trip() {
    let g = r#"[["1","u"],["t^-1*u^2","1+t^-1*u^3"]]"#;
    for mode in ["iwasawa", "bruhat"] {
        let out = ok_json(&["decompose", "--mode", mode, "--matrix", g]);
        assert_eq!(out["mode"], mode);
        assert_eq!(out["weyl"]["perm"], serde_json::json!([2, 1]));
        let m = out["m"].to_string();
        let again = ok_json(&["decompose", "--mode", mode, "--matrix", &m]);
        assert_eq!(again["weyl"], out["weyl"]);
        let shuffled = ok_json(&["decompose", "--mode", mode, "--matrix", g, "--shuffle", "5"]);
        assert_eq!(shuffled["weyl"], out["weyl"]);
    }
}

#[test]
fn stabilizer_membership() {
    let origin = r#"{"coords":["(0,0)","(0,0)"]}"#;
    let inside = ok_json(&[
        "stabilizes",
        "--point",
        origin,
        "--matrix",
        r#"[["1","u"],["0","1"]]"#,
    ]);
    assert_eq!(inside["stabilizes"], Value::Bool(true));
    let outside = ok_json(&[
        "stabilizes",
        "--point",
        origin,
        "--matrix",
        r#"[["1","1/t"],["0","1"]]"#,
    ]);
    assert_eq!(outside["stabilizes"], Value::Bool(false));
}

#[test]
fn project_residue_lift_chain() {
    let l = r#"{"n":2,"basis":[["1","0"],["0","u"]]}"#;
    let base = ok(&["project", "--s", "1", "--class", l]);
    let tag: Value = serde_json::from_str(&base).unwrap();
    assert_eq!(tag["context"], serde_json::json!({"rank": 2, "coarse": 1}));
    let r = ok(&["residue", "--base", &base, "--class", l]);
    let rv: Value = serde_json::from_str(&r).unwrap();
    assert_eq!(rv["context"], serde_json::json!({"rank": 1}));
    let lifted = ok(&["lift", "--base", &base, "--class", &r]);
    assert_eq!(ok(&["dist", "--l1", &lifted, "--l2", l]), r#""(0,0)""#);
}

#[test]
fn tree_json_and_dot() {
    let j = ok_json(&["--p", "2", "tree", "--center", I2, "--radius", "2"]);
    assert_eq!(j["vertices"].as_array().unwrap().len(), 10);
    assert_eq!(j["edges"].as_array().unwrap().len(), 9);
    assert_eq!(j["ends"].as_array().unwrap().len(), 6);
    assert_eq!(j["tree"], Value::Bool(true));
    let leaf = j["vertices"][4]["class"].to_string();
    assert_eq!(
        ok(&["--p", "2", "dist", "--l1", I2, "--l2", &leaf]),
        r#""(0,2)""#
    );
    let dot = ok(&[
        "--p", "2", "--format", "dot", "tree", "--center", I2, "--radius", "1",
    ]);
    assert!(dot.starts_with("graph fiber_tree {"));
    assert_eq!(dot.matches(" -- ").count(), 6);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(hbk(&["val"]).status.code(), Some(1));
    assert_eq!(hbk(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hbk(&["--d", "4", "val", "--elem", "t"]).status.code(),
        Some(1)
    );
    assert_eq!(hbk(&["val", "--elem", "t^^2"]).status.code(), Some(1));
    assert_eq!(
        hbk(&["dist", "--l1", "{", "--l2", I2]).status.code(),
        Some(1)
    );
    assert_eq!(
        hbk(&["--n", "3", "dist", "--l1", I2, "--l2", I2])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hbk(&["verify", "--suite", "12"]).status.code(), Some(1));
    assert_eq!(hbk(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_2_with_module() {
    let o = hbk(&["decompose", "--matrix", r#"[["u","0"],["0","1"]]"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[group_algorithms]"));
    let o = hbk(&["--p", "4", "val", "--elem", "t"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[valued_field]"));
    let o = hbk(&[
        "dist",
        "--l1",
        I2,
        "--l2",
        r#"{"n":2,"basis":[["1","1"],["1","1"]]}"#,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[lattice_building]"));
    let o = hbk(&["--d", "3", "tree", "--center", I2]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[sl2_boundary]"));
    let o = hbk(&["project", "--s", "2", "--class", I2]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[projections]"));
}

#[test]
fn env_fallback() {
    let o = Command::new(env!("CARGO_BIN_EXE_hbk"))
        .args(["val", "--elem", "u3^2*u2^-3*u1"])
        .env("HBK_D", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), r#""(2,-3,1)""#);
}

#[test]
fn verify_subset_is_deterministic() {
    let a = ok(&["verify", "--suite", "1,3", "--seed", "11"]);
    let b = ok(&["verify", "--suite", "1,3", "--seed", "11"]);
    assert_eq!(a, b);
    assert!(a
        .lines()
        .next()
        .unwrap()
        .starts_with("PASS  1 valuation law"));
    assert!(a.ends_with("2/2 criteria passed"));
    let j = ok_json(&["--format", "json", "verify", "--suite", "3"]);
    assert_eq!(j["criteria"][0]["passed"], Value::Bool(true));
}

#[test]
fn verify_all_example() {
    let o = hbk(&["verify", "--suite", "all", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 10);
}
