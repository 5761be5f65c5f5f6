use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_a4diff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

const S5: &str = r#"{"num":[0,0,0,0,0,1]}"#;

#[test]
fn analyze_s5_verifies() {
    let o = run(&["analyze", "--alpha", S5, "--m", "8", "--verify", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["ram"]["genus"], 6);
    assert_eq!(v["verification"]["status"], "PASS");
    let keys: Vec<&str> = v["kG"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["label"].as_str().unwrap())
        .collect();
    assert_eq!(keys, ["S[i=0]", "M[2n+1=3,x=1,i=1]", "N[2n=2,*=0,i=2]"]);
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "examples", "--which", "2", "--n", "1", "--trunc", "3", "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let trivial = run(&["analyze", "--alpha", r#"{"num":[0,1,1]}"#]);
    assert_eq!(trivial.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&trivial.stderr).contains("xi^2 - xi"));
    let trace = run(&["analyze", "--alpha", r#"{"num":[0,0,0,1]}"#]);
    assert_eq!(trace.status.code(), Some(2));
    assert_eq!(
        run(&["analyze", "--alpha", "not json"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(&["analyze", "--alpha", S5, "--m", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn example1_end_to_end() {
    let o = run(&[
        "examples", "--which", "1", "--n", "1", "--x", "1", "--verify", "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["ram"]["genus"], 69);
    assert_eq!(v["kG"]["total_dim"], 69);
    assert_eq!(v["verification"]["status"], "PASS");
}

#[test]
fn example3_reports_enlarged_field() {
    let o = run(&[
        "examples", "--which", "3", "--n", "1", "--mu", "2", "--m", "4", "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["field"]["m"], 12);
}

#[test]
fn batch_runs_every_job() {
    let dir = std::env::temp_dir().join(format!("a4diff-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("jobs.json");
    std::fs::write(
        &path,
        format!(r#"[{{"alpha": {S5}}}, {{"example": {{"which": 2, "n": 1}}}}, {{"alpha": {{"num": [0,1,1]}}}}]"#),
    )
    .unwrap();
    let o = run(&["verify", "--batch", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    let jobs = v["jobs"].as_array().unwrap();
    assert_eq!(jobs.len(), 3);
    assert_eq!(jobs[0]["report"]["verification"]["status"], "PASS");
    assert_eq!(jobs[1]["report"]["ram"]["genus"], 24);
    assert!(jobs[2]["error"].as_str().unwrap().contains("trivial"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn hkg_mode() {
    let o = run(&["hkg", "--alpha", S5, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let e2 = run(&["examples", "--which", "2", "--json"]);
    let alpha = json(&e2)["alpha"].to_string();
    assert_eq!(run(&["hkg", "--alpha", &alpha]).status.code(), Some(2));
}

#[test]
fn zoo_dictionary() {
    let o = run(&["zoo", "--label", "B:6:1", "--dictionary"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["total_dim"], 6);
    let o = run(&["zoo", "--side", "kh", "--label", "M:3:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["zoo", "--label", "Q:1"]).status.code(), Some(1));
}
