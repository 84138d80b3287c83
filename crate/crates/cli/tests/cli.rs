use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use tempfile::TempDir;

struct Run {
    code: i32,
    report: Value,
    stdout: Vec<u8>,
}

fn sixr(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_sixr"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let report = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not one JSON document ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    Run { code: out.status.code().unwrap(), report, stdout: out.stdout }
}

fn builtin(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let run = sixr(dir, &["family", "--builtin", name, "--out", path.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    path
}

const GENERIC: &str = r#"{"d": [1, "2/3", -3, "5/7", 2, "-1/4"], "s": [1, 2, 3, 4, "1/2", 5], "w": ["1/2", 3, "-2/5", 7, "3/4", "5/9"]}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let new = builtin(dir.path(), "new_example");
    let bricard = builtin(dir.path(), "bricard_example");
    let generic = write(dir.path(), "generic.json", GENERIC);

    let run = sixr(dir.path(), &["check", s(&new)]);
    assert_eq!(run.code, 0);
    assert_eq!(run.report["exit_code"], 0);
    assert_eq!(sixr(dir.path(), &["check", s(&bricard)]).code, 0);
    assert_eq!(sixr(dir.path(), &["--exact", "check", s(&new)]).code, 0);

    let run = sixr(dir.path(), &["check", s(&generic)]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report["results"]["rigid"], true);
    assert_eq!(sixr(dir.path(), &["--exact", "check", s(&generic)]).code, 1);
}

#[test]
fn trace_new_example_keeps_first_and_fourth_angles_equal() {
    let dir = TempDir::new().unwrap();
    let new = builtin(dir.path(), "new_example");
    let csv = dir.path().join("new.csv");
    let run = sixr(dir.path(), &["trace", s(&new), "--out", s(&csv)]);
    assert_eq!(run.code, 0);
    let curve = &run.report["results"]["curve"];
    assert_eq!(curve["closed"], true);
    assert!(curve["max_far_pair_angle_difference"]["1-4"].as_f64().unwrap() < 1e-9);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("theta_1,"));
    assert_eq!(text.lines().count() as u64, curve["points"].as_u64().unwrap() + 1);
}

#[test]
fn trace_bricard_example_satisfies_its_curve_polynomials() {
    let dir = TempDir::new().unwrap();
    let bricard = builtin(dir.path(), "bricard_example");
    let polys = serde_json::json!({ "polynomials": sixr::tpoly::BRICARD_CURVE });
    let polys = write(dir.path(), "polys.json", &polys.to_string());
    let run = sixr(dir.path(), &["trace", s(&bricard), "--verify-poly", s(&polys)]);
    assert_eq!(run.code, 0);
    let maxima = run.report["results"]["verification"]["polynomials"].as_array().unwrap();
    assert_eq!(maxima.len(), 6);
    for m in maxima {
        assert!(m["max_abs"].as_f64().unwrap() < 1e-7, "{m}");
    }
}

#[test]
fn trace_generic_linkage_finds_no_curve() {
    let dir = TempDir::new().unwrap();
    let generic = write(dir.path(), "generic.json", GENERIC);
    let run = sixr(dir.path(), &["trace", s(&generic), "--attempts", "40"]);
    assert_eq!(run.code, 1);
    assert!(run.report["results"]["start"].is_null());
}

#[test]
fn hypothesis_checks() {
    let dir = TempDir::new().unwrap();
    let sample = dir.path().join("ls.json");
    assert_eq!(sixr(dir.path(), &["--seed", "3", "family", "--name", "line_symmetric", "--out", s(&sample)]).code, 0);
    let h = write(
        dir.path(),
        "h.json",
        r#"{"near":[false,false,false,false,false,false],"far_plus":[2,2,2],"far_minus":[0,0,0]}"#,
    );
    let run = sixr(dir.path(), &["check", s(&sample), "--hypothesis", s(&h)]);
    assert_eq!(run.code, 0);
    assert_eq!(run.report["results"]["verdict"], "necessary conditions hold");

    let generic = write(dir.path(), "generic.json", GENERIC);
    let run = sixr(dir.path(), &["check", s(&generic), "--hypothesis", s(&h)]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report["results"]["verdict"], "hypothesis excluded");
}

#[test]
fn quad_outputs() {
    let dir = TempDir::new().unwrap();
    let bricard = builtin(dir.path(), "bricard_example");
    let q1 = sixr(dir.path(), &["quad", s(&bricard), "--index", "1"]);
    let q4 = sixr(dir.path(), &["quad", s(&bricard), "--index", "4"]);
    assert_eq!(q1.code, 0);
    assert_eq!(q1.report["results"]["coefficients"], q4.report["results"]["coefficients"]);
    assert_eq!(q1.report["results"]["coefficients"]["a1"]["re"], "-1/25");
    assert_eq!(q1.report["results"]["coefficients"]["a0"]["im"], "326/325");

    let orth = dir.path().join("orth.json");
    assert_eq!(sixr(dir.path(), &["--seed", "7", "family", "--name", "orthogonal", "--out", s(&orth)]).code, 0);
    for sign in ["plus", "minus"] {
        for i in 1..=3 {
            let a = sixr(dir.path(), &["quad", s(&orth), "--index", &i.to_string(), "--sign", sign]);
            let b = sixr(dir.path(), &["quad", s(&orth), "--index", &(i + 3).to_string(), "--sign", sign]);
            assert_eq!(a.report["results"]["coefficients"], b.report["results"]["coefficients"]);
        }
    }

    let run = sixr(dir.path(), &["quad", s(&bricard), "--index", "9"]);
    assert_eq!(run.code, 2);
    assert!(run.report["results"]["error"].is_string());
}

#[test]
fn diagram_commands() {
    let dir = TempDir::new().unwrap();
    let list = dir.path().join("h.jsonl");
    let run = sixr(dir.path(), &["diagram", "enumerate", "--out", s(&list)]);
    assert_eq!(run.code, 0);
    assert_eq!(run.report["results"]["count"], 40296);
    let known = run.report["results"]["known_diagrams"].as_array().unwrap();
    assert!(!known.is_empty());
    assert!(known.iter().all(|k| k["position"].is_u64()));
    assert_eq!(fs::read_to_string(&list).unwrap().lines().count(), 40296);

    let new_family = write(
        dir.path(),
        "c.json",
        r#"{"near":[false,false,false,false,false,false],"far_plus":[2,2,2],"far_minus":[0,2,2]}"#,
    );
    let run = sixr(dir.path(), &["diagram", "conditions", s(&new_family)]);
    assert_eq!(run.code, 0);
    let far = run.report["results"]["system"]["far_conditions"].as_array().unwrap();
    assert_eq!(far.len(), 5);
    assert!(far.iter().all(|f| f["kind"] == "equality"));

    let uncovered = write(
        dir.path(),
        "bad.json",
        r#"{"near":[true,false,false,false,false,false],"far_plus":[0,0,0],"far_minus":[0,0,0]}"#,
    );
    assert_eq!(sixr(dir.path(), &["diagram", "conditions", s(&uncovered)]).code, 2);
    let garbage = write(dir.path(), "garbage.json", r#"{"near": 3}"#);
    assert_eq!(sixr(dir.path(), &["diagram", "conditions", s(&garbage)]).code, 2);
}

#[test]
fn family_commands() {
    let dir = TempDir::new().unwrap();
    let run = sixr(dir.path(), &["--seed", "7", "family", "--name", "orthogonal"]);
    assert_eq!(run.code, 0);
    assert!(run.report["results"]["members_of"].as_array().unwrap().contains(&"orthogonal".into()));

    let run = sixr(dir.path(), &["family", "--name", "nonsense"]);
    assert_eq!(run.code, 2);

    let bricard = builtin(dir.path(), "bricard_example");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&bricard).unwrap()).unwrap();
    let expected = sixr::families::builtin_instance(sixr::families::Builtin::BricardExample).to_document();
    assert_eq!(doc, serde_json::to_value(expected).unwrap());
}

#[test]
fn reports_and_curves_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let new = builtin(dir.path(), "new_example");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let ra = sixr(dir.path(), &["--seed", "4", "trace", s(&new), "--out", s(&a)]);
    let rb = sixr(dir.path(), &["--seed", "4", "trace", s(&new), "--out", s(&b)]);
    assert_eq!(ra.code, 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // the command line differs only in the output path
    let strip = |v: &Value| {
        let mut v = v.clone();
        v["command"] = Value::Null;
        v
    };
    assert_eq!(strip(&ra.report), strip(&rb.report));

    let c1 = sixr(dir.path(), &["check", s(&new)]);
    let c2 = sixr(dir.path(), &["check", s(&new)]);
    assert_eq!(c1.stdout, c2.stdout);
    assert_eq!(c1.report["inputs_digest"].as_str().unwrap().len(), 64);
}
