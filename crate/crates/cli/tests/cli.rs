use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_telegate"))
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn scenario(name: &str) -> PathBuf {
    crate_dir().join("scenarios").join(name)
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = fs::read_to_string(crate_dir().join("schemas").join(name)).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn run_to(file: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg(file)
        .arg("--out")
        .arg(out)
        .args(["--no-timestamp", "--quiet"])
        .args(extra)
        .output()
        .unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{what}: {errors:#?}");
}

#[test]
fn every_example_report_matches_the_schemas() {
    let report_schema = schema("report.schema.json");
    let scenario_schema = schema("scenario.schema.json");
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in fs::read_dir(crate_dir().join("scenarios")).unwrap() {
        let path = entry.unwrap().path();
        let input: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid(&scenario_schema, &input, &path.display().to_string());
        let out = dir.path().join("report.json");
        let o = run_to(&path, &out, &[]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&o.stderr)
        );
        let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_valid(&report_schema, &report, &path.display().to_string());
        assert_valid(&scenario_schema, &report["scenario"], "scenario echo");
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn reports_are_byte_identical_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario("cnot_entangling_shots.json");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(run_to(&file, &a, &[]).status.success());
    assert!(run_to(&file, &b, &[]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.path().join("c.json");
    assert!(run_to(&file, &c, &["--seed", "99"]).status.success());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn timestamp_is_present_by_default() {
    let o = bin()
        .arg("run")
        .arg(scenario("cphase_replay.json"))
        .arg("--quiet")
        .output()
        .unwrap();
    assert!(o.status.success());
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["generated_unix"].as_u64().unwrap() > 1_600_000_000);
}

#[test]
fn malformed_scenario_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, "{\n  \"gate\": \"cnot\",\n  \"noise\": { \"p2\": 0.5 }\n}\n").unwrap();
    let out = dir.path().join("out.json");
    let o = run_to(&file, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");
    assert!(!out.exists());

    fs::write(&file, "{ \"gate\": \"cnot\", ").unwrap();
    assert_eq!(run_to(&file, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn zero_acceptance_exits_3_with_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("few.json");
    fs::write(&file, r#"{ "gate": "cnot", "mode": { "shots": 2 }, "seed": 1 }"#).unwrap();
    let out = dir.path().join("out.json");
    let o = run_to(&file, &out, &[]);
    assert_eq!(o.status.code(), Some(3));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["status"], "zero-acceptance");
    assert_valid(&schema("report.schema.json"), &report, "zero acceptance report");
}

#[test]
fn replay_bounds_follow_from_the_fidelities() {
    let o = bin()
        .arg("run")
        .arg(scenario("cphase_replay.json"))
        .args(["--no-timestamp", "--quiet"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let m = &r["metrics"];
    let num = |v: &Value| v["value"].as_f64().unwrap();
    assert!((num(&m["bounds"]["process"]["lower"]) - 0.61).abs() < 1e-12);
    assert!((num(&m["bounds"]["process"]["upper"]) - 0.79).abs() < 1e-12);
    assert!((num(&m["bounds"]["concurrence"]) - 0.22).abs() < 1e-12);
    assert_eq!(r["model"], "replay");
}

#[test]
fn sweep_writes_a_fixed_header() {
    let o = bin()
        .arg("sweep")
        .arg(scenario("cphase_photon.json"))
        .args(["--axis", "noise.overlap.resource", "--values", "1,0.8", "--quiet"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), telegate::scenario::SWEEP_COLUMNS.join(","));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("noise.overlap.resource,1,photon,ok,"));
    assert!(rows[1].starts_with("noise.overlap.resource,0.8,photon,ok,"));
}

#[test]
fn sweep_rejects_an_unknown_axis() {
    let o = bin()
        .arg("sweep")
        .arg(scenario("cphase_photon.json"))
        .args(["--axis", "noise.colour", "--values", "1", "--quiet"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corrupted_assets_fail_verification_with_a_diff() {
    let dir = tempfile::tempdir().unwrap();
    let builtin = crate_dir().join("../core/assets");
    for name in ["cnot_byproducts.json", "cphase_corrections.json"] {
        fs::copy(builtin.join(name), dir.path().join(name)).unwrap();
    }
    let ok = bin()
        .args(["verify", "--quick", "--assets"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));

    let path = dir.path().join("cphase_corrections.json");
    let text = fs::read_to_string(&path).unwrap();
    let corrupted = text.replacen("\"Z4' X6'\"", "\"X4' X6'\"", 1);
    assert_ne!(text, corrupted);
    fs::write(&path, corrupted).unwrap();

    let o = bin()
        .args(["verify", "--quick", "--assets"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    let out = String::from_utf8_lossy(&o.stdout);
    let line = out.lines().find(|l| l.contains("printed-table/cphase")).unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
    assert!(line.contains("X4' X6'"), "{line}");
}
