use std::process::Command;

use maxsym::expr::parse;

fn maxsym(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_maxsym")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn without_timing(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    for report in v.as_array_mut().unwrap() {
        for claim in report["claims"].as_array_mut().unwrap() {
            claim.as_object_mut().unwrap().remove("millis");
        }
    }
    v
}

#[test]
fn generators_of_order_four() {
    let (code, out, _) = maxsym(&["generators", "--n", "4"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = out.lines().map(|l| l.split(':').next().unwrap()).collect();
    assert_eq!(names, ["V0", "V1", "V2", "V3", "Wy", "F4", "G4", "H4"]);
}

#[test]
fn canonical_generators_at_zero_potential() {
    let (code, out, _) = maxsym(&["generators", "--n", "4", "--q", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("H4: xi = -x^2; psi = -3*x*y"), "{out}");
}

#[test]
fn first_integral_of_third_order() {
    let (code, out, _) = maxsym(&["first-integral", "--vf", "0;y", "--n", "3"]);
    assert_eq!(code, 0);
    let expected = parse("2*q*y^2 - y1^2/2 + y*y2").unwrap();
    assert_eq!(parse(out.trim()).unwrap(), expected);
}

#[test]
fn check_without_order_is_a_usage_error() {
    let (code, _, err) = maxsym(&["check", "--kind", "divergence", "--vf", "0;y", "--eq", "y2+q*y"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn variational_check_needs_a_lagrangian() {
    let (code, _, _) = maxsym(&[
        "check",
        "--kind",
        "variational",
        "--vf",
        "1;0",
        "--eq",
        "y2",
        "--order",
        "2",
    ]);
    assert_eq!(code, 2);
    let (code, out, _) = maxsym(&[
        "check",
        "--kind",
        "variational",
        "--vf",
        "1;0",
        "--lagrangian",
        "y1^2/2",
        "--order",
        "1",
    ]);
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = maxsym(&[
        "check",
        "--kind",
        "variational",
        "--vf",
        "x;0",
        "--lagrangian",
        "y1^2/2",
        "--order",
        "1",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn transform_of_trivial_equation() {
    let (code, out, _) = maxsym(&["transform", "--map", "z=x; w=k2 - ln(y)", "--eq", "w4"]);
    assert_eq!(code, 0);
    let expected = parse(maxsym::maxsym::reference::NONLINEAR_EQUATION).unwrap();
    assert_eq!(parse(out.trim()).unwrap(), expected);
}

#[test]
fn parse_error_position() {
    let (code, _, err) = maxsym(&["lagrangian", "--n", "4", "--kind", "natural", "--q", "x)"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1, column 2"), "{err}");
}

#[test]
fn reproduce_writes_deterministic_json() {
    let dir = std::env::temp_dir();
    let a = dir.join(format!("maxsym-c1-a-{}.json", std::process::id()));
    let b = dir.join(format!("maxsym-c1-b-{}.json", std::process::id()));
    let (code, out, _) = maxsym(&["reproduce", "C1", "--json", a.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    maxsym(&["reproduce", "c1", "--json", b.to_str().unwrap()]);
    let ja = std::fs::read_to_string(&a).unwrap();
    let jb = std::fs::read_to_string(&b).unwrap();
    assert_eq!(without_timing(&ja), without_timing(&jb));
    let v = without_timing(&ja);
    assert!(v[0]["claims"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] == "verified"));
    let _ = std::fs::remove_file(a);
    let _ = std::fs::remove_file(b);
}

#[test]
fn unknown_case_is_a_usage_error() {
    assert_eq!(maxsym(&["reproduce", "C9"]).0, 2);
}
