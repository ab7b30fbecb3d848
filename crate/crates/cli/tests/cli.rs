//! End-to-end runs of the `idlaw` binary: exit codes, report schema and
//! golden outputs. Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_idlaw"));
    c.env_remove("IDLAW_QUAD_TOL");
    c
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    root().join("tests/fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schemas").join(name)).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn golden(name: &str, actual: &str) {
    let path = root().join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, want, "output differs from {}", path.display());
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn eval_prints_jbeta_of_standard_normal() {
    let o = run(&["eval", "--law", &fixture("gaussian.json"), "--map", "jbeta", "--beta", "1", "--y", "1"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    let re: f64 = line.split_whitespace().next().unwrap().parse().unwrap();
    assert!((re + 1.0 / 6.0).abs() < 1e-12, "{line}");
}

#[test]
fn verify_eq3_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "verify", "--identity", "eq3", "--law", &fixture("gaussian.json"), "--beta", "1", "--tol", "1e-8",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert!(r["max_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["points"].as_array().unwrap().len(), 41);
    assert_valid(&schema("report.schema.json"), &r);
}

#[test]
fn input_errors_exit_with_two() {
    let o = run(&["verify", "--identity", "eq3", "--law", "missing.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));
    let o = run(&["verify", "--identity", "eq4", "--law", &fixture("gaussian.json")]);
    assert_eq!(code(&o), 2);
    let o = run(&["eval", "--law", &fixture("gaussian.json")]);
    assert_eq!(code(&o), 2);
    let o = run(&["eval", "--law", &fixture("gaussian.json"), "--y", "1", "--map", "jbeta", "--beta", "-1"]);
    assert_eq!(code(&o), 2);
    let o = bin()
        .args(["eval", "--law", &fixture("gaussian.json"), "--y", "1"])
        .env("IDLAW_QUAD_TOL", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    // jump measure with a segment cannot be sampled exactly
    let o = run(&["simulate", "--law", &fixture("heavy_tail.json"), "--n", "10"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn failed_checks_exit_with_one() {
    let o = run(&["verify", "--identity", "eq3", "--law", &fixture("compound_poisson.json"), "--beta", "2", "--tol", "1e-20"]);
    assert_eq!(code(&o), 1);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["pass"], Value::Bool(false));
}

#[test]
fn quadrature_failure_exits_with_one() {
    let o = bin()
        .args(["eval", "--law", &fixture("heavy_tail.json"), "--map", "i", "--y", "3"])
        .env("IDLAW_QUAD_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("quadrature"));
}

#[test]
fn reports_match_the_published_schema() {
    let reports = schema("report.schema.json");
    let runs: Vec<Vec<String>> = vec![
        vec!["verify", "--identity", "cor5", "--law", &fixture("compound_poisson.json"), "--beta", "2"],
        vec!["verify", "--identity", "prop2", "--law", &fixture("heavy_tail.json"), "--beta", "1", "--y", "-1,0.5,2"],
        vec!["verify", "--identity", "eq2-timechange", "--law", &fixture("compound_poisson.json"), "--beta", "2", "--n", "5000"],
        vec!["verify", "--identity", "area", "--u", "2"],
        vec!["area-demo", "--u", "1"],
        vec!["eval", "--law", &fixture("heavy_tail.json"), "--map", "ubetaf", "--beta", "2", "--y", "1,-2", "--format", "json"],
        vec!["simulate", "--law", &fixture("compound_poisson.json"), "--map", "jbeta", "--n", "2000", "--report", "ecf"],
        vec!["simulate", "--law", &fixture("compound_poisson.json"), "--map", "ijbeta", "--n", "2000", "--report", "compare"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for args in runs {
        let o = bin().args(&args).output().unwrap();
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_valid(&reports, &doc);
    }
}

#[test]
fn law_files_and_transform_output_match_the_law_schema() {
    let laws = schema("law.schema.json");
    for name in ["gaussian.json", "compound_poisson.json", "heavy_tail.json"] {
        assert_valid(&laws, &read_json(Path::new(&fixture(name))));
    }
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("image.json");
    let o = run(&["transform", "--law", &fixture("heavy_tail.json"), "--beta", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_valid(&laws, &read_json(&out));
    // the written image is itself a law the tool accepts
    let o = run(&["eval", "--law", out.to_str().unwrap(), "--y", "1.5"]);
    assert_eq!(code(&o), 0);
    let direct = run(&["eval", "--law", &fixture("heavy_tail.json"), "--map", "jbeta", "--beta", "2", "--y", "1.5"]);
    let parse = |s: String| -> Vec<f64> { s.split_whitespace().map(|v| v.parse().unwrap()).collect() };
    let (a, b) = (parse(stdout(&o)), parse(stdout(&direct)));
    assert!((a[0] - b[0]).abs() < 1e-5 && (a[1] - b[1]).abs() < 1e-5, "{a:?} vs {b:?}");
}

#[test]
fn golden_verify_report() {
    let o = run(&["verify", "--identity", "eq15", "--law", &fixture("gaussian.json"), "--beta", "1", "--y", "-2,-1,0,1,2"]);
    assert_eq!(code(&o), 0);
    golden("verify_eq15_gaussian.json", &stdout(&o));
}

#[test]
fn golden_area_demo_csv() {
    let o = run(&["area-demo", "--u", "1", "--y", "0.5,1,2,4", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    golden("area_demo_u1.csv", &stdout(&o));
}

#[test]
fn sample_csv_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(format!("s{w}.csv"));
        let o = run(&[
            "simulate", "--law", &fixture("compound_poisson.json"), "--map", "ijbeta", "--n", "5000", "--seed", "11",
            "--workers", w, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert!(text.starts_with("x1\n"));
    assert_eq!(text.lines().count(), 5001);
}

#[test]
fn suite_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    std::fs::copy(fixture("gaussian.json"), dir.path().join("gaussian.json")).unwrap();
    let small = write(
        "small.json",
        r#"{ "identities": ["eq3", "cor1a", "area"], "laws": ["gaussian.json"], "betas": [1.0], "u": [1.0] }"#,
    );
    let o = run(&["suite", "--config", &small]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("report.schema.json"), &summary);
    assert_eq!(summary["passed"], 3);

    let o = run(&["suite", "--config", &small, "--tol", "1e-20"]);
    assert_eq!(code(&o), 1);

    let empty = write("empty.json", r#"{ "identities": [] }"#);
    assert_eq!(code(&run(&["suite", "--config", &empty])), 2);
    let unknown = write("unknown.json", r#"{ "identities": ["eq4"] }"#);
    assert_eq!(code(&run(&["suite", "--config", &unknown])), 2);
}

#[test]
fn default_suite_passes() {
    let o = run(&["suite"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["failed"], 0);
    // six law identities on four laws and four betas, plus two area runs
    assert_eq!(summary["passed"], 6 * 16 + 2);
}
