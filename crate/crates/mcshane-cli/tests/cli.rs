use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcshane"))
        .args(args)
        .env_remove("MCSHANE_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn identity_at_the_systole_cutoff() {
    let out = run(&["identity", "--seed", "fuchsian", "--cutoff", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["library_version"], mcshane::VERSION);
    let total = v["report"]["total"].as_f64().unwrap();
    let phi4 = ((1.0 + 5f64.sqrt()) / 2.0).powi(4);
    assert!((total - 4.0 / (1.0 + phi4)).abs() < 1e-12);
    assert_eq!(v["report"]["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["report"]["rows"][0]["slope"], "0/1+");
    assert!(v["report"]["rows"][0]["B1mu"].is_number());
}

#[test]
fn malformed_seeds_exit_with_code_two() {
    for seed in [r#"{"a1":0}"#, r#"{"a1":1"#, "no-such-file.json", "fuchsian:1,2"] {
        let out = run(&["identity", "--seed", seed, "--cutoff", "1"]);
        assert_eq!(out.status.code(), Some(2), "{seed}");
        assert!(!out.stderr.is_empty());
    }
    let zero = r#"{"a1":0,"a2":1,"b_prev":1,"c_prev":1,"c_cur":1,"b_cur":1,"d_prev":1,"e_prev":1}"#;
    let out = run(&["identity", "--seed", zero]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a1"));
}

#[test]
fn usage_errors_exit_with_code_two() {
    assert_eq!(run(&["identity", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(run(&["identity", "--cutoff", "0"]).status.code(), Some(2));
    assert_eq!(run(&["identity", "--precision", "quad"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["twist-orbit", "--slope", "2/4+"]).status.code(), Some(2));
}

#[test]
fn inline_json_seed_is_accepted() {
    let seed = r#"{"a1":"3/2","a2":1,"b_prev":2,"c_prev":"1/2","c_cur":1,"b_cur":1.25,"d_prev":1,"e_prev":2}"#;
    let out = run(&["identity", "--seed", seed, "--cutoff", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["seed"]["b_cur"], "5/4");
}

#[test]
fn reports_are_reproducible() {
    let args = ["identity", "--seed", "random", "--rng-seed", "17", "--cutoff", "5", "--jobs", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut seq = json(&run(&["identity", "--seed", "random", "--rng-seed", "17", "--cutoff", "5", "--jobs", "1"]));
    let mut par = json(&a);
    assert_eq!(par["config"]["rng_seed"], 17);
    seq["config"]["jobs"] = Value::Null;
    par["config"]["jobs"] = Value::Null;
    assert_eq!(seq, par);
}

#[test]
fn csv_tables() {
    let out = run(&["identity", "--cutoff", "2", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("slope,word,l1,l2,tau,B1mu,gap,partial_sum"));
    assert_eq!(lines.count(), 8);
    let out = run(&["collar", "--cutoff", "3", "--csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("beta,gamma,lhs"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("mcshane-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let p = path.to_str().unwrap();
    let out = run(&["dual", "--cutoff", "3", "--output", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, run(&["dual", "--cutoff", "3"]).stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn every_command_passes_on_small_inputs() {
    let cases: [&[&str]; 8] = [
        &["dual", "--seed", "random", "--cutoff", "4"],
        &["halfpants", "--seed", "random", "--cutoff", "4"],
        &["pants", "--seed", "random", "--cutoff", "4"],
        &["gapmetric", "--other", "fuchsian:1,2,3", "--cutoff", "6"],
        &["spectrum", "--cutoff", "8", "--fit-lo", "2", "--fit-hi", "5"],
        &["collar", "--seed", "random", "--cutoff", "5"],
        &["fuchsian-check", "--depth", "2"],
        &["twist-orbit", "--seed", "random", "--slope", "-1/2+"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["passed"], true, "{args:?}");
    }
}

#[test]
fn fuchsian_check_reports_rigidity() {
    let v = json(&run(&["fuchsian-check"]));
    assert_eq!(v["report"]["fuchsian"], true);
    let v = json(&run(&["fuchsian-check", "--seed", "random", "--depth", "1"]));
    assert_eq!(v["report"]["fuchsian"], false);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_mcshane"))
        .args(["identity", "--cutoff", "2"])
        .env("MCSHANE_PRECISION", "extended")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["precision"], "extended");
    let out = Command::new(env!("CARGO_BIN_EXE_mcshane"))
        .args(["identity", "--cutoff", "2"])
        .env("MCSHANE_PRECISION", "bogus")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
