use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use mfact::catalog::{load_catalog, Label};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfact")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = run(&a);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().expect("exit code"), v)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mfact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture(rel: &str) -> String {
    fixtures().join(rel).display().to_string()
}

#[test]
fn repro_e6_all_facts() {
    let (code, v) = json(&["repro", "e6"]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["result"]["total"], 14);
    assert_eq!(v["result"]["passed"], 14);
    assert!(v["result"]["first_violation"].is_null());
}

#[test]
fn repro_names_first_violation() {
    let out = run(&["repro", "e8"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let (code, v) = json(&["repro", "e8"]);
    let first = &v["result"]["first_violation"];
    if code == 0 {
        assert!(first.is_null());
    } else {
        assert_eq!(code, 1);
        let id = first["id"].as_str().unwrap();
        assert!(text.contains(&format!("first violated fact: {id}")), "{text}");
        assert!(text.contains(&format!("  - {}", first["expected"].as_str().unwrap())));
        assert!(text.contains(&format!("  + {}", first["actual"].as_str().unwrap())));
    }
}

#[test]
fn bounds_example() {
    let (code, v) = json(&["bounds", "--exponents", "4,3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["bounds"]["loewy"], 4);
    assert_eq!(v["result"]["bounds"]["bfk"], 7);
}

#[test]
fn decompose_double() {
    let cat = load_catalog(Label::E6).unwrap();
    let x = cat.get("X").unwrap();
    let path = scratch("xx.mf");
    std::fs::write(&path, x.direct_sum(x).unwrap().to_file_string()).unwrap();
    let (code, v) = json(&["decompose", path.to_str().unwrap(), "--catalog", "e6"]);
    assert_eq!(code, 0, "{v:#}");
    let pieces = v["result"]["pieces"].as_object().unwrap();
    assert_eq!(pieces.len(), 1);
    assert_eq!(pieces["X"], 2);
    assert_eq!(v["result"]["free_rank"], 0);
}

#[test]
fn reports_are_deterministic() {
    let f = fixture("e6/A.mf");
    for args in [
        vec!["approx", f.as_str(), "--catalog", "e6", "--json"],
        vec!["quiver", "--catalog", "e8", "--json"],
        vec!["verify", f.as_str(), "--seed", "11", "--json"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn cover_output_round_trips() {
    // x^3 with the factorization (x, x^2), covered by y^2
    let base = scratch("base.mf");
    std::fs::write(&base, "ring x\nprec 30\nfield fp:32003\npotential x^3\nphi\n[x]\npsi\n[x^2]\n").unwrap();
    let out = scratch("cover.mf");
    let (code, v) = json(&["cover", base.to_str().unwrap(), "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["result"]["round_trip"], true);
    assert_eq!(v["result"]["var"], "y");
    let (code, v) = json(&["verify", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["result"]["validation"]["valid"], true);
    assert_eq!(v["result"]["round_trip"], true);
}

#[test]
fn tensor_of_fixtures() {
    let a = scratch("ta.mf");
    let b = scratch("tb.mf");
    std::fs::write(&a, "ring x\nprec 20\nfield q\npotential x^2\nphi\n[x]\npsi\n[x]\n").unwrap();
    std::fs::write(&b, "ring z\nprec 20\nfield q\npotential z^3\nphi\n[z]\npsi\n[z^2]\n").unwrap();
    let (code, v) = json(&["tensor", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["result"]["size"], 2);
    assert_eq!(v["result"]["potential"], "x^2+z^3");
}

#[test]
fn broken_identity_fails_verify() {
    let p = scratch("broken.mf");
    std::fs::write(&p, "ring x,y\nprec 30\nfield fp:32003\npotential x^4+y^3\nphi\n[x^3, -y]\n[y^2, x]\npsi\n[x, y]\n[y^2, x^3]\n").unwrap();
    let (code, v) = json(&["verify", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["result"]["validation"]["valid"], false);
}

#[test]
fn usage_errors_exit_3() {
    let (code, v) = json(&["bounds"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, v) = json(&["verify", "/definitely/not/here.mf"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "io");
    let (code, v) = json(&["bounds", "--exponents", "3,5", "--field", "fp:5"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "field");
    let (code, _) = json(&["approx", &fixture("e6/A.mf"), "--k", "7"]);
    assert_eq!(code, 3);
}

#[test]
fn field_override_changes_ring() {
    let (code, v) = json(&["verify", &fixture("e6/N1.mf"), "--field", "q"]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["config"]["field"], "q");
}

#[test]
fn sigma_and_quiver() {
    let (code, v) = json(&["sigma", &fixture("e6/A.mf"), "--catalog", "e6"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["least_k"], 2);
    assert_eq!(v["result"]["coherent"], true);
    let (code, v) = json(&[
        "quiver", "--ring", "3,4", "--ideals", "M1=(t^3,t^8)", "N1=(t^3,t^4)", "M2=(t^6,t^8)",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["arrow_count"], 9);
}

#[test]
fn resolve_all_vertices_periodic() {
    let (code, v) = json(&["resolve", "--catalog", "e6"]);
    assert_eq!(code, 0, "{v:#}");
    let rs = v["result"]["resolutions"].as_array().unwrap();
    assert_eq!(rs.len(), 4);
    assert!(rs.iter().all(|r| r["periodic"] == true));
}
