use std::path::PathBuf;
use std::process::{Command, Output};

fn belltest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_belltest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("artifact is JSON")
}

#[test]
fn three_pair_selection_vertex_summary() {
    let o = belltest(&["vertices", "--class", "2,2,2", "--pairs", "0:0,0:1,1:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("256 vertices, ambient dimension 48"), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["vertex_count"], 256);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 256);
}

#[test]
fn single_pair_has_four_vertices() {
    let o = belltest(&["vertices", "--class", "1,1,1", "--pairs", "0:0", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("4 vertices"));
}

#[test]
fn oversized_class_is_a_capacity_error() {
    let o = belltest(&["vertices", "--class", "2,2,10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cap"));
}

#[test]
fn facet_counts() {
    for (class, pairs, facets, equalities) in [
        ("1,1,1", "0:0", 4, 1),
        ("1,1,2", "0:0,0:1,1:0,1:1", 24, 8),
        ("2,2,2", "0:0,0:1,1:1", 48, 9),
    ] {
        let o = belltest(&["facets", "--class", class, "--pairs", pairs]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v = json(&o);
        assert_eq!(v["facet_count"], facets);
        assert_eq!(v["equality_count"], equalities);
        assert_eq!(v["verified"], true);
        assert!(v.get("note").is_none());
    }
}

#[test]
fn tiny_memory_cap_is_a_capacity_error() {
    let o = belltest(&["facets", "--class", "1,1,2", "--mem-cap", "64"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("memory cap"), "{}", stderr(&o));
}

#[test]
fn uniform_counts_are_local() {
    let o = belltest(&["test", "--data", &fixture("uniform_counts.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verdict"], "local");
}

#[test]
fn mixture_weights_are_reported() {
    let o = belltest(&["test", "--data", &fixture("mixture.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let weights = v["weights"].as_array().unwrap();
    let total: Vec<&str> = weights.iter().map(|w| w["weight"].as_str().unwrap()).collect();
    assert_eq!(total, vec!["1/2", "1/2"]);
}

#[test]
fn singlet_is_nonlocal_with_a_chsh_certificate() {
    let o = belltest(&["test", "--data", &fixture("singlet.json")]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["verdict"], "nonlocal");
    let coeffs = v["certificate"]["coeffs"].as_array().unwrap();
    let nonzero: Vec<i64> = coeffs
        .iter()
        .map(|c| c.as_i64().unwrap())
        .filter(|&c| c != 0)
        .collect();
    assert_eq!(nonzero.len(), 4);
    assert!(nonzero.iter().all(|c| c.abs() == 1));
    // Exact rationals only.
    assert!(v["violation"].as_str().unwrap().contains('/'));
}

#[test]
fn slack_can_absorb_the_singlet_violation() {
    let o = belltest(&["test", "--data", &fixture("singlet.json"), "--slack", "1/10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn missing_pair_is_named() {
    let o = belltest(&["test", "--data", &fixture("missing_pair.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no data for pair (1,1)"), "{}", stderr(&o));

    let o = belltest(&[
        "test",
        "--data",
        &fixture("uniform_counts.json"),
        "--pairs",
        "0:0,0:1,1:0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(1,1)"), "{}", stderr(&o));
}

#[test]
fn malformed_number_reports_position() {
    let o = belltest(&["test", "--data", &fixture("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("0.2.5") && err.contains("line 4 column"), "{err}");
}

#[test]
fn class_flag_must_match_file() {
    let o = belltest(&["test", "--data", &fixture("uniform_counts.json"), "--class", "1,1,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(belltest(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(belltest(&["facets"]).status.code(), Some(2));
    assert_eq!(belltest(&["vertices", "--class", "2,x,2"]).status.code(), Some(2));
    assert_eq!(belltest(&["vertices", "--class", "1,1,2", "--pairs", "0:5"]).status.code(), Some(2));
    assert_eq!(belltest(&["test", "--data", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(
        belltest(&["test", "--data", &fixture("singlet.json"), "--slack", "-1"]).status.code(),
        Some(2)
    );
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<String>> = vec![
        vec!["facets".into(), "--class".into(), "2,2,2".into(), "--pairs".into(), "0:0,0:1,1:1".into()],
        vec!["facets".into(), "--class".into(), "1,1,2".into(), "--format".into(), "text".into()],
        vec!["vertices".into(), "--class".into(), "2,2,2".into()],
        vec!["test".into(), "--data".into(), fixture("singlet.json")],
        vec!["test".into(), "--data".into(), fixture("uniform_counts.json"), "--format".into(), "text".into()],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("{i}-{rep}.out"));
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            let p = path.to_string_lossy().into_owned();
            full.extend(["--out", &p]);
            let o = belltest(&full);
            assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
            assert!(o.stdout.is_empty());
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "run {i} differs");
    }
}
