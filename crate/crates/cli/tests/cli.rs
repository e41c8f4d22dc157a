use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> PathBuf {
    repo().join("configs").join(name)
}

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).output().expect("verify runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("verify-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Run a scenario, check the exit code and validate the report against the published schema.
fn run(scenario: &str, cfg: &Path, extra: &[&str], code: i32) -> Value {
    let out = scratch(&format!("{scenario}-{}.json", cfg.file_stem().unwrap().to_string_lossy()));
    let mut args = vec![scenario, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend(extra);
    let o = verify(&args);
    assert_eq!(o.status.code(), Some(code), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(repo().join("docs/report-schema.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    assert_eq!(report["pass"], Value::Bool(code == 0));
    report
}

fn checks(report: &Value) -> &Vec<Value> {
    report["checks"].as_array().unwrap()
}

#[test]
fn lists_nine_scenarios() {
    let o = verify(&[]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["axioms", "extend", "markov", "cover", "hamiltonian", "ltqo", "weight-reduce", "domain-wall", "modular"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    let o = verify(&["--json"]);
    let list: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(list.as_array().unwrap().len(), 9);
    assert!(list[0]["required_keys"].is_array());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(verify(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(verify(&["teleport", "--config", "x.json"]).status.code(), Some(2));
    assert_eq!(verify(&["axioms"]).status.code(), Some(2));
    assert_eq!(verify(&["axioms", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
    let bad = write_config("bad.json", "{ \"backend\": { \"builtin\": \"toric-code\" }, \"colour\": 1 }");
    assert_eq!(verify(&["axioms", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let other = config("markov.json");
    let o = verify(&["axioms", "--config", other.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scenario markov"));
}

#[test]
fn dense_cap_is_named() {
    let cfg = write_config(
        "dense-big.json",
        r#"{ "backend": { "builtin": "toric-code", "rows": 6, "cols": 6, "dense": true } }"#,
    );
    let o = verify(&["axioms", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap 8192"));
}

#[test]
fn toric_axioms_pass_on_every_face() {
    let report = run("axioms", &config("axioms-toric.json"), &[], 0);
    let checks = checks(&report);
    assert_eq!(checks.len(), 72);
    for c in checks {
        assert_eq!(c["value"], 0.0, "{}", c["name"]);
        if c["name"].as_str().unwrap().starts_with("A1") {
            assert_eq!(c["detail"]["deficits"].as_array().unwrap().len(), 15);
        }
    }
}

#[test]
fn ghz_axioms_fail_by_one_bit() {
    let report = run("axioms", &config("axioms-ghz.json"), &[], 1);
    let a0: Vec<&Value> = checks(&report).iter().filter(|c| c["name"].as_str().unwrap().starts_with("A0")).collect();
    assert_eq!(a0.len(), 36);
    assert!(a0.iter().all(|c| c["value"] == 1.0 && c["pass"] == false));
    assert_eq!(report["summary"]["failed"], 36);
}

#[test]
fn product_hamiltonian_passes() {
    let report = run("hamiltonian", &config("hamiltonian-product.json"), &[], 0);
    let names: Vec<&str> = checks(&report).iter().map(|c| c["name"].as_str().unwrap()).collect();
    for n in ["cover condition", "markov overlaps", "commuting", "frustration free", "dense cross-check", "ground space"] {
        assert!(names.contains(&n), "{n} missing");
    }
}

#[test]
fn manifest_is_written() {
    let manifest = scratch("h.json");
    let cfg = write_config(
        "manifest.json",
        &format!(
            r#"{{ "backend": {{ "builtin": "toric-code", "rows": 20, "cols": 20 }},
                 "params": {{ "cross_check_union": 0, "manifest_out": "{}" }} }}"#,
            manifest.display()
        ),
    );
    run("hamiltonian", &cfg, &[], 0);
    let (h, stamps) = bootstrap_core::hamiltonian::read_manifest(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(h.terms.len(), 16);
    assert_eq!(stamps.commuting, Some(true));
}

#[test]
fn reports_are_deterministic_and_flags_win() {
    let cfg = write_config("markov-small.json", r#"{ "seed": 3, "params": { "instances": 4, "max_dim": 32 } }"#);
    let a = run("markov", &cfg, &["--seed", "11", "--tol-cmi", "1e-7"], 0);
    let first = std::fs::read(scratch("markov-markov-small.json")).unwrap();
    let b = run("markov", &cfg, &["--seed", "11", "--tol-cmi", "1e-7"], 0);
    let second = std::fs::read(scratch("markov-markov-small.json")).unwrap();
    assert_eq!(first, second);
    assert_eq!(a, b);
    assert_eq!(a["seed"], 11);
    assert_eq!(a["tolerances"]["cmi"], 1e-7);
    assert_eq!(checks(&a).len(), 5);
    let c = run("markov", &cfg, &[], 0);
    assert_eq!(c["seed"], 3);
    assert_ne!(checks(&a)[0]["detail"]["spec"], checks(&c)[0]["detail"]["spec"]);
}

#[test]
fn cover_and_weight_reduction() {
    let report = run("cover", &config("cover-red.json"), &[], 0);
    let red = checks(&report).iter().find(|c| c["name"] == "red distances").unwrap();
    assert_eq!(red["detail"]["distances"], serde_json::json!([0, 1, 2, 3]));
    let report = run("weight-reduce", &config("weight-reduce-toric.json"), &[], 0);
    let w = checks(&report).iter().find(|c| c["name"] == "max weight").unwrap();
    assert!(w["value"].as_f64().unwrap() <= 3.0);
}

#[test]
fn dense_bond_ltqo() {
    let report = run("ltqo", &config("ltqo-dense-bond.json"), &[], 0);
    let s = checks(&report).iter().find(|c| c["name"].as_str().unwrap().starts_with("sandwich")).unwrap();
    assert!(s["value"].as_f64().unwrap() < 1e-8);
    assert_eq!(s["detail"]["kernel_dim"], 4);
}

#[test]
fn modular_commutator_vanishes() {
    let report = run("modular", &config("modular-toric.json"), &[], 0);
    assert_eq!(checks(&report).len(), 3);
}

#[test]
fn ltqo_margin_too_small_fails() {
    let cfg = write_config(
        "ltqo-ell1.json",
        r#"{ "backend": { "builtin": "toric-code", "rows": 20, "cols": 20 },
             "params": { "ell": 1, "r_max": 0, "centres": [{ "q": 10, "r": 10 }] } }"#,
    );
    run("ltqo", &cfg, &[], 1);
}
